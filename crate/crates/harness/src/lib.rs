//! Benchmark orchestration: solver × instance × budget grids, a resumable
//! result store, time-to-match and run-time ratio reports.

pub mod error;
pub mod grid;
pub mod metrics;
pub mod report;
pub mod results;
pub mod stats;

pub use error::{HarnessError, Result};
pub use grid::{run_grid, BenchmarkGrid, GridSummary, SolverSpec, Vary};
pub use metrics::{best_so_far, relative_difference, time_to_match};
pub use report::{runtime_ratios, MatchReport, Reference, ReportRow};
pub use results::{read_external, read_instances, read_results, splice, ExternalRow, InstanceRow, ResultRow};
