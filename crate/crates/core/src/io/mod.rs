//! Data ingestion, run files and result output.

mod fetch;
mod libsvm;
mod plot;
mod results;
mod runfile;
mod synth;

pub use fetch::fetch_dataset;
pub use libsvm::{load_libsvm, parse_libsvm, parse_libsvm_str, LabelMap};
pub use plot::{emit_plot_script, plot_script, PlotTable};
pub use results::{
    read_results, sweep_rows, write_results, write_rows, ResultRow, RESULTS_HEADER, RESULTS_SCHEMA_VERSION,
};
pub use runfile::{DatasetSource, Experiment, LossName, ObjectiveVariant, RunFile};
pub use synth::{synthesize, synthesize_dataset, SyntheticData, SyntheticKind, SyntheticSpec};

use crate::objectives::ObjectiveError;
use crate::schedule::ScheduleError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IoError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Data(#[from] ObjectiveError),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
}
