//! Heuristic Ising solvers. Every solver returns a [`SolveTrace`]: the
//! history of best-so-far energies with elapsed times, plus the best
//! configuration found.

pub mod anneal;
pub mod betas;
pub mod budget;
pub mod config;
pub mod ensemble;
pub mod error;
pub mod glauber;
pub mod min_sum;
pub mod pt_icm;
pub mod rng;
pub mod scd;
pub mod schedule;
pub mod svmc;
pub mod tabu;
pub mod trace;

pub use anneal::{simulated_annealing, AnnealParams};
pub use betas::{default_betas, tuned_betas, BetaLadder};
pub use budget::SolverBudget;
pub use config::{PtIcmConfig, SolverConfig, SvmcConfig, SOLVER_NAMES};
pub use ensemble::parallel_restarts;
pub use error::{Result, SolverError};
pub use glauber::glauber;
pub use min_sum::{min_sum, MinSumParams};
pub use pt_icm::{pt_icm, pt_icm_with_diagnostics, PtDiagnostics, PtIcmParams};
pub use rng::{derive_seed, solver_rng};
pub use scd::scd;
pub use schedule::ScheduleTable;
pub use svmc::{svmc, SvmcParams};
pub use tabu::{tabu, TabuParams};
pub use trace::{SolveTrace, TraceEvent};
