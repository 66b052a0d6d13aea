//! CSV result tables.
//!
//! Schema version 1: `run,seed,epoch,t,eta,F,E,Y,smoothed_F`. Reals are written
//! in scientific notation with 17 significant digits; `E` and `Y` are empty
//! when the run has no reference solution.

use super::IoError;
use crate::engine::SweepResult;
use std::path::Path;

pub const RESULTS_SCHEMA_VERSION: u32 = 1;
pub const RESULTS_HEADER: [&str; 9] = ["run", "seed", "epoch", "t", "eta", "F", "E", "Y", "smoothed_F"];

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub run: String,
    pub seed: u64,
    pub epoch: u64,
    pub t: u64,
    pub eta: f64,
    pub value: f64,
    pub gap: Option<f64>,
    pub distance_sq: Option<f64>,
    pub smoothed_value: f64,
}

fn real(x: f64) -> String {
    format!("{x:.16e}")
}

fn optional(x: Option<f64>) -> String {
    x.map(real).unwrap_or_default()
}

/// Flattens a sweep into rows: seeds in sweep order, records in time order.
/// `components` is the number of iterations per epoch.
pub fn sweep_rows(sweep: &SweepResult, run: &str, components: usize) -> Vec<ResultRow> {
    let per_epoch = components.max(1) as u64;
    sweep
        .traces
        .iter()
        .flat_map(|trace| {
            trace.records.iter().zip(&sweep.smoothed_value).map(move |(r, &s)| ResultRow {
                run: run.to_string(),
                seed: trace.seed,
                epoch: r.t / per_epoch,
                t: r.t,
                eta: r.eta,
                value: r.value,
                gap: r.gap,
                distance_sq: r.distance_sq,
                smoothed_value: s,
            })
        })
        .collect()
}

pub fn write_rows(rows: &[ResultRow], path: &Path) -> Result<(), IoError> {
    let io_err = |e: csv::Error| IoError::Io { path: path.display().to_string(), message: e.to_string() };
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(path).map_err(io_err)?;
    w.write_record(RESULTS_HEADER).map_err(io_err)?;
    for r in rows {
        w.write_record([
            r.run.clone(),
            r.seed.to_string(),
            r.epoch.to_string(),
            r.t.to_string(),
            real(r.eta),
            real(r.value),
            optional(r.gap),
            optional(r.distance_sq),
            real(r.smoothed_value),
        ])
        .map_err(io_err)?;
    }
    w.flush().map_err(|e| IoError::Io { path: path.display().to_string(), message: e.to_string() })
}

/// Writes one sweep as a CSV table and returns the rows written.
pub fn write_results(sweep: &SweepResult, run: &str, components: usize, path: &Path) -> Result<Vec<ResultRow>, IoError> {
    let rows = sweep_rows(sweep, run, components);
    write_rows(&rows, path)?;
    Ok(rows)
}

pub fn read_results(path: &Path) -> Result<Vec<ResultRow>, IoError> {
    let io_err = |e: csv::Error| IoError::Io { path: path.display().to_string(), message: e.to_string() };
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_path(path).map_err(io_err)?;
    let header = r.headers().map_err(io_err)?.clone();
    if header.iter().ne(RESULTS_HEADER) {
        return Err(IoError::Parse { line: 1, message: format!("unexpected header {:?}", header) });
    }
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(io_err)?;
        let perr = |field: &str| IoError::Parse { line, message: format!("bad {field} field") };
        let int = |k: usize| rec[k].parse::<u64>().map_err(|_| perr(RESULTS_HEADER[k]));
        let num = |k: usize| rec[k].parse::<f64>().map_err(|_| perr(RESULTS_HEADER[k]));
        let opt = |k: usize| if rec[k].is_empty() { Ok(None) } else { num(k).map(Some) };
        rows.push(ResultRow {
            run: rec[0].to_string(),
            seed: int(1)?,
            epoch: int(2)?,
            t: int(3)?,
            eta: num(4)?,
            value: num(5)?,
            gap: opt(6)?,
            distance_sq: opt(7)?,
            smoothed_value: num(8)?,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(t: u64, y: Option<f64>) -> ResultRow {
        ResultRow {
            run: "h=0.5".into(),
            seed: 3,
            epoch: t / 10,
            t,
            eta: 0.1 / 3.0,
            value: std::f64::consts::PI * 1e-7,
            gap: y.map(|v| v * 0.5),
            distance_sq: y,
            smoothed_value: 1.0 / 7.0,
        }
    }

    #[test]
    fn round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        let rows = vec![row(0, Some(2.0 / 3.0)), row(10, None)];
        write_rows(&rows, &path).unwrap();
        assert_eq!(read_results(&path).unwrap(), rows);
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("run,seed,epoch,t,eta,F,E,Y,smoothed_F\n"));
        assert!(text.ends_with('\n'));
        assert_eq!(text.lines().count(), 3);
        assert!(text.lines().nth(2).unwrap().contains(",,,"));
    }

    #[test]
    fn wrong_header_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "a,b\n1,2\n").unwrap();
        assert!(read_results(&path).is_err());
    }
}
