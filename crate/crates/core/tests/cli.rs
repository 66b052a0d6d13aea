use std::path::Path;
use std::process::{Command, Output};

fn curvesgd(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_curvesgd")).args(args).current_dir(dir).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const RUN_FILE: &str = r#"
loss = "least_squares"
objective = "norm2_squared"
lambda = 2.0
schedules = [
    "power:scale=0.1,h=0",
    "power:scale=0.1,h=0.25",
    "power:scale=0.1,h=0.5",
    "power:scale=0.1,h=0.75",
    "power:scale=0.1,h=1",
]
seeds = [0, 1, 2]
epochs = 3
out = "results"

[dataset]
source = "linear"
n = 40
d = 3
seed = 2
feature_var = 3.0
noise = 0.5
"#;

#[test]
fn schedule_prints_initial_step() {
    let dir = tempfile::tempdir().unwrap();
    let o = curvesgd(&["schedule", "paper-opt:h=1,beta=0.5,L=1,r=inf", "--t", "0"], dir.path());
    assert!(o.status.success());
    let text = stdout(&o);
    let row = text.lines().find(|l| l.starts_with("0.0\t")).unwrap();
    let cells: Vec<&str> = row.split('\t').collect();
    assert_eq!(cells[1].parse::<f64>().unwrap(), 0.5);
    assert!(text.contains("C_bar"));
}

#[test]
fn verify_quick_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = curvesgd(&["verify", "--quick"], dir.path());
    let text = stdout(&o);
    assert!(o.status.success(), "{text}");
    for name in
        ["co-coercivity", "G-inequality", "v closed form vs numeric", "c_alpha", "ODE residual", "C <= C_bar", "recurrence oracle"]
    {
        let line = text.lines().find(|l| l.contains(name)).unwrap_or_else(|| panic!("{name} missing"));
        assert!(line.starts_with("PASS"), "{line}");
    }
}

#[test]
fn sweep_writes_tables_and_plot_script() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("fig1.run"), RUN_FILE).unwrap();
    let o = curvesgd(&["sweep", "fig1.run"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = dir.path().join("results");
    let mut csvs = 0;
    for entry in std::fs::read_dir(&out).unwrap() {
        let p = entry.unwrap().path();
        if p.extension().is_some_and(|e| e == "csv") {
            csvs += 1;
            // 3 seeds × 4 records (t = 0, 40, 80, 120) plus the header.
            assert_eq!(std::fs::read_to_string(&p).unwrap().lines().count(), 13);
        }
    }
    assert_eq!(csvs, 5);
    let script = std::fs::read_to_string(out.join("plot.gp")).unwrap();
    assert_eq!(script.matches("with lines").count(), 5);
}

#[test]
fn flags_override_the_run_file() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("exp.run"), RUN_FILE).unwrap();
    let args = ["run", "exp.run", "--seed", "9", "--epochs", "1", "--stride", "10", "--out", "elsewhere"];
    let o = curvesgd(&args, dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = dir.path().join("elsewhere/00_power_scale_0.1_h_0.0.csv");
    let text = std::fs::read_to_string(csv).unwrap();
    assert_eq!(text.lines().count(), 1 + 5);
    assert!(text.lines().skip(1).all(|l| l.split(',').nth(2) == Some("9")));
    assert!(!dir.path().join("elsewhere/plot.gp").exists());
}

#[test]
fn estimate_curvature_reports_h() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("exp.run"), RUN_FILE).unwrap();
    let o = curvesgd(&["estimate-curvature", "exp.run", "--quick"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let h: f64 = text.lines().find_map(|l| l.strip_prefix("h = ")).unwrap().parse().unwrap();
    assert!((h - 1.0).abs() < 0.05, "{text}");
}

#[test]
fn failures_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    assert!(!curvesgd(&["frobnicate"], dir.path()).status.success());
    assert!(!curvesgd(&["verify", "--no-such-flag"], dir.path()).status.success());
    assert!(!curvesgd(&["run", "missing.run"], dir.path()).status.success());
    std::fs::write(dir.path().join("bad.run"), RUN_FILE.replace("epochs = 3", "epochs = 3\ncolour = 1")).unwrap();
    let o = curvesgd(&["run", "bad.run"], dir.path());
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("colour"));
    assert!(!curvesgd(&["schedule", "warp:9"], dir.path()).status.success());
}

#[test]
fn thread_cap_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("exp.run"), RUN_FILE).unwrap();
    let mut outputs = Vec::new();
    for threads in ["1", "4"] {
        let out = format!("t{threads}");
        let o = Command::new(env!("CARGO_BIN_EXE_curvesgd"))
            .args(["sweep", "exp.run", "--out", &out])
            .env("CURVESGD_THREADS", threads)
            .current_dir(dir.path())
            .output()
            .unwrap();
        assert!(o.status.success());
        outputs.push(std::fs::read(dir.path().join(&out).join("04_power_scale_0.1_h_1.0.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}
