//! Min-sum message passing with the symmetric saturating linear transfer.
//!
//! A message `ε_{i→j}` is the cost difference `m(+1) − m(−1)` it adds to
//! site `j`. Minimising `h_i σ_i + J_ij σ_i σ_j` plus the cavity field of `i`
//! over `σ_i` gives `ε_{i→j} = SSL(−2 J_ij, 2 h_i + Σ_{k ≠ j} ε_{k→i})`.

use isingbench_core::IsingModel;
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Result, SolverError};
use crate::rng::solver_rng;
use crate::trace::{Deadline, SolveTrace, TraceRecorder};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MinSumParams {
    pub max_iterations: u64,
    /// Converged once no message moves by more than this.
    pub tolerance: f64,
    pub time_limit_s: Option<f64>,
}

impl Default for MinSumParams {
    fn default() -> Self {
        Self {
            max_iterations: 1000,
            tolerance: 1e-9,
            time_limit_s: None,
        }
    }
}

/// `min(x, y) − min(−x, y) − x`.
#[inline]
pub fn ssl(x: f64, y: f64) -> f64 {
    x.min(y) - (-x).min(y) - x
}

/// Outcome of a run beyond the trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinSumStatus {
    pub iterations: u64,
    pub converged: bool,
}

pub fn min_sum_with_status(model: &IsingModel, params: &MinSumParams, seed: u64) -> Result<(SolveTrace, MinSumStatus)> {
    if params.max_iterations == 0 && params.time_limit_s.is_none() {
        return Err(SolverError::InvalidParams("max_iterations must be at least 1".into()));
    }
    if !(params.tolerance >= 0.0) {
        return Err(SolverError::InvalidParams("tolerance must be non-negative".into()));
    }
    let deadline = Deadline::new(params.time_limit_s);
    let mut rec = TraceRecorder::new(model);
    let mut rng = solver_rng(seed);
    let n = model.n();

    // Incoming messages laid out like the adjacency: slot `offset[j] + p`
    // holds the message from the p-th neighbour of j into j.
    let mut offset = vec![0usize; n + 1];
    for i in 0..n {
        offset[i + 1] = offset[i] + model.degree(i);
    }
    // Slot of the message i → (p-th neighbour of i) inside the receiver's range.
    let mut outgoing = vec![0usize; offset[n]];
    for i in 0..n {
        for (p, nb) in model.neighbors(i).iter().enumerate() {
            let j = nb.site as usize;
            let q = model
                .neighbors(j)
                .iter()
                .position(|b| b.site as usize == i)
                .expect("adjacency is symmetric");
            outgoing[offset[i] + p] = offset[j] + q;
        }
    }

    let mut incoming = vec![0.0f64; offset[n]];
    let mut next = vec![0.0f64; offset[n]];
    let mut spins = vec![1i8; n];
    let mut iterations = 0;
    let mut converged = false;

    let decide = |incoming: &[f64], spins: &mut [i8], rng: &mut rand_chacha::ChaCha8Rng| {
        for i in 0..n {
            let total = 2.0 * model.field(i) + incoming[offset[i]..offset[i + 1]].iter().sum::<f64>();
            spins[i] = if total > 0.0 {
                -1
            } else if total < 0.0 {
                1
            } else if rng.gen::<bool>() {
                1
            } else {
                -1
            };
        }
    };

    while iterations < params.max_iterations && !deadline.expired() {
        let mut change = 0.0f64;
        for i in 0..n {
            let total = 2.0 * model.field(i) + incoming[offset[i]..offset[i + 1]].iter().sum::<f64>();
            for (p, nb) in model.neighbors(i).iter().enumerate() {
                let cavity = total - incoming[offset[i] + p];
                let slot = outgoing[offset[i] + p];
                let msg = ssl(-2.0 * nb.coupling, cavity);
                change = change.max((msg - incoming[slot]).abs());
                next[slot] = msg;
            }
        }
        std::mem::swap(&mut incoming, &mut next);
        iterations += 1;
        decide(&incoming, &mut spins, &mut rng);
        rec.offer(model.energy_of(&spins), &spins);
        if change <= params.tolerance {
            converged = true;
            break;
        }
    }
    if iterations == 0 {
        decide(&incoming, &mut spins, &mut rng);
        rec.offer(model.energy_of(&spins), &spins);
    }
    let status = MinSumStatus { iterations, converged };
    let trace = rec.finish(
        "min-sum",
        json!({ "params": params, "iterations": iterations, "converged": converged }),
        seed,
    );
    Ok((trace, status))
}

pub fn min_sum(model: &IsingModel, params: &MinSumParams, seed: u64) -> Result<SolveTrace> {
    min_sum_with_status(model, params, seed).map(|(t, _)| t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn ssl_values() {
        for y in [-3.0, -0.5, 0.0, 0.5, 7.0] {
            assert_eq!(ssl(0.0, y), 0.0);
        }
        // x ≤ y and −x ≤ y: min(1,5) − min(−1,5) − 1 = 1 + 1 − 1.
        assert_eq!(ssl(1.0, 5.0), 1.0);
        assert_eq!(ssl(1.0, -5.0), -1.0);
        assert_eq!(ssl(1.0, 0.25), 0.25);
        assert_eq!(ssl(-2.0, 1.0), -1.0);
    }

    proptest! {
        #[test]
        fn ssl_is_odd_in_x_and_bounded(x in -10.0f64..10.0, y in -10.0f64..10.0) {
            prop_assert!((ssl(-x, y) + ssl(x, y)).abs() < 1e-12);
            prop_assert!(ssl(x, y).abs() <= x.abs() + 1e-12);
        }
    }

    #[test]
    fn single_edge_is_exact() {
        for (j, h0, h1) in [(1.0, 0.3, -0.2), (-1.0, 0.3, 0.1), (0.5, -2.0, 0.7)] {
            let m = IsingModel::new(2, vec![(0, h0), (1, h1)], vec![(0, 1, j)]).unwrap();
            let exact = isingbench_core::brute_force(&m).unwrap().energy;
            let (t, st) = min_sum_with_status(&m, &MinSumParams::default(), 0).unwrap();
            assert!(st.converged);
            assert_eq!(t.best_energy, exact);
        }
    }

    #[test]
    fn chain_converges_within_diameter() {
        let n = 12;
        let chain = (0..n - 1).map(|i| (i, i + 1, if i % 3 == 0 { 1.0 } else { -0.7 })).collect();
        let fields = (0..n).map(|i| (i, 0.1 * (i as f64 - 5.5))).collect();
        let m = IsingModel::new(n, fields, chain).unwrap();
        let (t, st) = min_sum_with_status(&m, &MinSumParams::default(), 0).unwrap();
        assert!(st.converged);
        // One more sweep than the diameter confirms the fixed point.
        assert!(st.iterations <= n as u64 + 1, "{}", st.iterations);
        assert_eq!(t.best_energy, isingbench_core::brute_force(&m).unwrap().energy);
    }
}
