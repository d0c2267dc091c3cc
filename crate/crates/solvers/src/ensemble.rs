//! Independent restarts run concurrently, reporting the best member.

use rayon::prelude::*;
use serde_json::Value;

use crate::error::{Result, SolverError};
use crate::rng::derive_seed;
use crate::trace::{merge_traces, SolveTrace};

pub const DEFAULT_PARALLEL: usize = 8;

/// Runs `k` members with seeds `derive_seed(seed, 0..k)` and merges them.
pub fn parallel_restarts<F>(solver: &str, params: Value, k: usize, seed: u64, run: F) -> Result<SolveTrace>
where
    F: Fn(u64) -> Result<SolveTrace> + Sync,
{
    if k == 0 {
        return Err(SolverError::InvalidParams("parallel must be at least 1".into()));
    }
    if k == 1 {
        let mut t = run(derive_seed(seed, 0))?;
        t.seed = seed;
        t.params = params;
        return Ok(t);
    }
    let members = (0..k as u64)
        .into_par_iter()
        .map(|i| run(derive_seed(seed, i)))
        .collect::<Result<Vec<_>>>()?;
    Ok(merge_traces(solver, params, seed, members))
}
