#![allow(clippy::neg_cmp_op_on_partial_ord)]

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use curvesgd::engine::multi_seed_sweep;
use curvesgd::io::{emit_plot_script, fetch_dataset, write_results, Experiment, PlotTable, RunFile};
use curvesgd::omega::{fit_curvature, SampleRegion, Sampling};
use curvesgd::schedule::{rate_envelope, RateFunction, ScheduleSpec};
use curvesgd::verify::{run_all, VerifyOptions};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(name = "curvesgd", version, about = "Curvature-aware SGD step sizes and experiments")]
struct Cli {
    /// Seed for `run` and `sweep` (replaces the run file's seed list), and
    /// for the samplers of `verify` and `estimate-curvature`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the run file's epoch count.
    #[arg(long, global = true)]
    epochs: Option<u64>,
    /// Overrides the run file's record stride (iterations).
    #[arg(long, global = true)]
    stride: Option<u64>,
    /// Overrides the run file's output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Smaller sample sizes for `verify` and `estimate-curvature`.
    #[arg(long, global = true)]
    quick: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Runs every schedule of a run file once, with a single seed.
    Run { runfile: PathBuf },
    /// Runs every schedule over all seeds; writes one CSV per schedule and a gnuplot script.
    Sweep { runfile: PathBuf },
    /// Runs the invariant suite and reports pass/fail per check.
    Verify,
    /// Fits the curvature exponent h of a run file's objective around its minimizer.
    EstimateCurvature { runfile: PathBuf },
    /// Tabulates η_t, M(t), C(t) and C̄(t) for a schedule string.
    Schedule {
        spec: String,
        /// Times to tabulate (repeatable or comma-separated).
        #[arg(long = "t", value_delimiter = ',', num_args = 1.., default_values_t = [0.0, 1.0, 10.0, 100.0, 1000.0, 10000.0])]
        times: Vec<f64>,
        /// β of the rate v(η) = βhη^{1−h} for schedules that do not carry one.
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        /// h of that rate; defaults to the schedule's own h, or 1.
        #[arg(long)]
        h: Option<f64>,
    },
    /// Copies or downloads a LIBSVM file (such as mushrooms) and checks that it parses.
    FetchData { source: String, dest: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Run { runfile } => {
            let exp = experiment(cli, runfile)?;
            let seed = exp.seeds[0];
            execute(&exp, &[seed], false)
        }
        Command::Sweep { runfile } => {
            let exp = experiment(cli, runfile)?;
            execute(&exp, &exp.seeds.clone(), true)
        }
        Command::Verify => Ok(verify(cli)),
        Command::EstimateCurvature { runfile } => estimate_curvature(cli, runfile),
        Command::Schedule { spec, times, beta, h } => schedule_table(spec, times, *beta, *h),
        Command::FetchData { source, dest } => {
            let rows = fetch_dataset(source, dest)?;
            println!("wrote {} ({rows} examples)", dest.display());
            Ok(true)
        }
    }
}

fn experiment(cli: &Cli, path: &Path) -> Result<Experiment> {
    let mut rf = RunFile::load(path)?;
    if let Some(seed) = cli.seed {
        rf.seeds = vec![seed];
    }
    if let Some(epochs) = cli.epochs {
        rf.epochs = epochs;
    }
    if cli.stride.is_some() {
        rf.stride = cli.stride;
    }
    let base = path.parent().unwrap_or(Path::new("."));
    let mut exp = rf.build(base).with_context(|| format!("building {}", path.display()))?;
    if let Some(out) = &cli.out {
        exp.out = out.clone();
    }
    Ok(exp)
}

/// File-system friendly form of a schedule label.
fn slug(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '.' || c == '-' { c } else { '_' })
        .collect()
}

fn execute(exp: &Experiment, seeds: &[u64], plot: bool) -> Result<bool> {
    std::fs::create_dir_all(&exp.out).with_context(|| format!("creating {}", exp.out.display()))?;
    let components = exp.objective.component_count();
    let mut tables = Vec::new();
    for (index, (label, spec)) in exp.schedules.iter().enumerate() {
        let sweep = multi_seed_sweep(&exp.config(*spec), seeds).with_context(|| format!("schedule {label}"))?;
        let path = exp.out.join(format!("{index:02}_{}.csv", slug(label)));
        let rows = write_results(&sweep, label, components, &path)?;
        let violations: u64 = sweep.traces.iter().map(|t| t.region_violations).sum();
        let last = sweep.mean.last().expect("a sweep records t = 0");
        let gap = last.gap.map_or_else(|| "-".to_string(), |e| format!("{e:.6e}"));
        println!(
            "{label}: {} rows -> {} | final mean F {:.6e}, E {gap}, region violations {violations}",
            rows.len(),
            path.display(),
            last.value,
        );
        tables.push(PlotTable { csv: path, title: label.clone(), seed: seeds[0] });
    }
    if plot {
        let script = exp.out.join("plot.gp");
        emit_plot_script(&tables, &script)?;
        println!("plot script -> {}", script.display());
    }
    Ok(true)
}

fn verify(cli: &Cli) -> bool {
    let options = VerifyOptions { quick: cli.quick, seed: cli.seed.unwrap_or(0) };
    let outcomes = run_all(options);
    for o in &outcomes {
        let status = if o.passed { "PASS" } else { "FAIL" };
        println!("{status}  {:<26} {} ({:.2} s)", o.name, o.detail, o.elapsed.as_secs_f64());
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!("{} checks, {failed} failed", outcomes.len());
    failed == 0
}

fn estimate_curvature(cli: &Cli, path: &Path) -> Result<bool> {
    let exp = experiment(cli, path)?;
    let Some(reference) = &exp.reference else {
        bail!("the objective has no unique minimizer; curvature is estimated around w_*");
    };
    let mut region = SampleRegion::uniform(reference.w_star.clone(), exp.region, cli.seed.unwrap_or(0));
    if exp.objective.dim() > 1 {
        region.sampling = Sampling::MultiScale { decades: 4.0 };
    }
    if cli.quick {
        region.samples /= 10;
    }
    let fit = fit_curvature(&exp.objective, reference, &region)?;
    let empty = fit.estimate.empty_bands().len();
    println!("h = {:.4}", fit.h);
    if let Some(cert) = exp.objective.curvature_certificate() {
        println!("certified h = {}", cert.h);
    }
    if empty > 0 {
        println!("{empty} of {} ε bands had no samples", fit.estimate.epsilon_grid.len());
    }
    Ok(true)
}

fn schedule_table(text: &str, times: &[f64], beta: f64, h: Option<f64>) -> Result<bool> {
    let spec: ScheduleSpec = text.parse()?;
    let rate = match (&spec, h) {
        (ScheduleSpec::PaperOptimal(p), None) => p.rate(),
        (ScheduleSpec::PowerLaw { h: own, .. }, None) => RateFunction::Power { beta, h: *own },
        (_, h) => RateFunction::Power { beta, h: h.unwrap_or(1.0) },
    };
    println!("# {spec}");
    println!("t\teta\tM\tC\tC_bar\texp_neg_M");
    for row in rate_envelope(&spec, &rate, times)? {
        let c_bar = row.c_bar.map_or_else(|| "-".to_string(), |c| format!("{c:?}"));
        println!("{:?}\t{:?}\t{:?}\t{:?}\t{c_bar}\t{:?}", row.t, row.eta, row.m, row.c, row.exp_neg_m);
    }
    Ok(true)
}
