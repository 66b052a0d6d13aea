//! gnuplot script emission.

use super::IoError;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// One curve: a results CSV and the seed whose rows carry the curve.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotTable {
    pub csv: PathBuf,
    pub title: String,
    /// Any seed present in the table; `smoothed_F` is identical across seeds.
    pub seed: u64,
}

/// Builds the script text. CSVs are referenced by file name, relative to the
/// script's directory.
pub fn plot_script(tables: &[PlotTable]) -> Result<String, IoError> {
    if tables.is_empty() {
        return Err(IoError::Config("plot script needs at least one table".into()));
    }
    let mut s = String::new();
    let _ = writeln!(s, "# columns: run,seed,epoch,t,eta,F,E,Y,smoothed_F");
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set logscale y");
    let _ = writeln!(s, "set xlabel 'epoch'");
    let _ = writeln!(s, "set ylabel 'F(w) (moving mean of 3)'");
    let _ = writeln!(s, "set key outside right");
    let mut curves = Vec::with_capacity(tables.len());
    for t in tables {
        let name = t
            .csv
            .file_name()
            .and_then(|n| n.to_str())
            .ok_or_else(|| IoError::Config(format!("table path {} has no file name", t.csv.display())))?;
        let title = t.title.replace('\'', "");
        curves.push(format!(
            "'{name}' every ::1 using 3:(column(2) == {} ? column(9) : 1/0) with lines title '{title}'",
            t.seed
        ));
    }
    let _ = writeln!(s, "plot {}", curves.join(", \\\n     "));
    Ok(s)
}

pub fn emit_plot_script(tables: &[PlotTable], path: &Path) -> Result<(), IoError> {
    let text = plot_script(tables)?;
    std::fs::write(path, text).map_err(|e| IoError::Io { path: path.display().to_string(), message: e.to_string() })
}
