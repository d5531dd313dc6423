//! Experiment grids, CSV ingestion and result files.
//!
//! An [`ExperimentConfig`] names algorithms, schedules and data sources; every
//! combination is a cell. Trials inside a cell draw streams from seeds keyed
//! on `(base_seed, data id, trial)`, so all algorithms and schedules see the
//! same streams and reordering the grid changes nothing. A cell that fails
//! (for example an infeasible boost sequence) records its error and the rest
//! of the grid proceeds.

mod config;
mod experiment;
mod io;

pub use config::{AlgorithmSpec, BoostChoice, DataSpec, ExperimentConfig, MetricsMode, NamedOffset, OffsetChoice};
pub use experiment::{
    cell_id, run_experiment, run_experiment_with, CellPaths, CellResult, CellSummary, Execution, ResultsBundle,
};
pub use io::{
    emit_results, file_stem_for, fmt_f64, ingest_csv, read_stream, read_summary, write_paths, write_stream,
    write_stream_csv, write_summary, SummaryRow, PATH_COLUMNS, SUMMARY_COLUMNS,
};
