//! Multistart single-flip tabu search.
//!
//! Each read starts from a random configuration and repeatedly takes the
//! best admissible flip (lowest `ΔE`, uniform among ties). A flipped site
//! stays tabu for `tenure` iterations unless flipping it would beat the
//! read's best energy (aspiration). A read ends after `stall_limit`
//! iterations without improving its best, or at its timeout.

use std::time::Instant;

use isingbench_core::IsingModel;
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Result, SolverError};
use crate::rng::solver_rng;
use crate::trace::{Deadline, SolveTrace, TraceRecorder};

const EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TabuParams {
    pub reads: u64,
    /// Defaults to `min(20, n / 4)`.
    pub tenure: Option<usize>,
    /// Per-read wall-clock limit.
    pub read_timeout_s: Option<f64>,
    /// Non-improving iterations before a read ends; defaults to `max(1000, 10 n)`.
    pub stall_limit: Option<u64>,
    /// Overall wall-clock limit across reads.
    pub time_limit_s: Option<f64>,
}

impl Default for TabuParams {
    fn default() -> Self {
        Self {
            reads: 1,
            tenure: None,
            read_timeout_s: Some(1.0),
            stall_limit: None,
            time_limit_s: None,
        }
    }
}

impl TabuParams {
    pub fn tenure_for(&self, n: usize) -> usize {
        let t = self.tenure.unwrap_or_else(|| 20.min(n / 4));
        // Keeps at least one site admissible.
        t.min(n.saturating_sub(1))
    }

    pub fn stall_for(&self, n: usize) -> u64 {
        self.stall_limit.unwrap_or_else(|| (10 * n as u64).max(1000))
    }
}

/// Result of one read.
#[derive(Debug, Clone)]
pub struct TabuRead {
    pub best: Vec<i8>,
    pub best_energy: f64,
    pub iterations: u64,
}

/// Runs one tabu read from `start`.
pub fn tabu_read<R: Rng + ?Sized>(
    model: &IsingModel,
    start: &[i8],
    tenure: usize,
    stall_limit: u64,
    deadline: &Deadline,
    rng: &mut R,
) -> TabuRead {
    let n = model.n();
    let mut spins = start.to_vec();
    let mut field: Vec<f64> = (0..n).map(|i| model.local_field(&spins, i)).collect();
    let mut energy = model.energy_of(&spins);
    let mut best = spins.clone();
    let mut best_energy = energy;
    let mut tabu_until = vec![0u64; n];
    let mut iter = 0u64;
    let mut stall = 0u64;

    while n > 0 && stall < stall_limit {
        if iter % 64 == 0 && deadline.expired() {
            break;
        }
        let mut choice: Option<(usize, f64)> = None;
        let mut ties = 0u32;
        for i in 0..n {
            let d = -2.0 * f64::from(spins[i]) * field[i];
            let admissible = tabu_until[i] <= iter || energy + d < best_energy - EPS;
            if !admissible {
                continue;
            }
            match choice {
                Some((_, bd)) if d > bd + EPS => {}
                Some((_, bd)) if d >= bd - EPS => {
                    ties += 1;
                    if rng.gen_range(0..ties) == 0 {
                        choice = Some((i, bd));
                    }
                }
                _ => {
                    choice = Some((i, d));
                    ties = 1;
                }
            }
        }
        let Some((site, _)) = choice else { break };
        let d = -2.0 * f64::from(spins[site]) * field[site];
        spins[site] = -spins[site];
        energy += d;
        let s = f64::from(spins[site]);
        for nb in model.neighbors(site) {
            field[nb.site as usize] += 2.0 * nb.coupling * s;
        }
        tabu_until[site] = iter + tenure as u64 + 1;
        iter += 1;
        if energy < best_energy - EPS {
            best_energy = energy;
            best.copy_from_slice(&spins);
            stall = 0;
        } else {
            stall += 1;
        }
    }
    let best_energy = model.energy_of(&best);
    TabuRead {
        best,
        best_energy,
        iterations: iter,
    }
}

pub fn tabu(model: &IsingModel, params: &TabuParams, seed: u64) -> Result<SolveTrace> {
    if params.reads == 0 && params.time_limit_s.is_none() {
        return Err(SolverError::InvalidParams("tabu needs reads >= 1".into()));
    }
    let start = Instant::now();
    let overall = Deadline::starting_at(start, params.time_limit_s);
    let mut rec = TraceRecorder::starting_at(model, start);
    let mut rng = solver_rng(seed);
    let n = model.n();
    let tenure = params.tenure_for(n);
    let stall = params.stall_for(n);
    let mut reads = 0;
    while reads < params.reads && !overall.expired() {
        let init: Vec<i8> = (0..n).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect();
        let limit = match (params.read_timeout_s, params.time_limit_s) {
            (Some(r), Some(t)) => Some(r.min((t - overall.elapsed_s()).max(0.0))),
            (r, t) => r.or(t),
        };
        let read = tabu_read(model, &init, tenure, stall, &Deadline::new(limit), &mut rng);
        rec.offer(read.best_energy, &read.best);
        reads += 1;
    }
    Ok(rec.finish(
        "tabu",
        json!({ "params": params, "tenure": tenure, "stall_limit": stall, "reads_done": reads }),
        seed,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_spin_positive_field() {
        let m = IsingModel::new(1, vec![(0, 1.0)], vec![]).unwrap();
        let t = tabu(&m, &TabuParams::default(), 0).unwrap();
        assert_eq!(t.best.as_slice(), &[-1]);
        assert_eq!(t.best_energy, -1.0);
    }

    #[test]
    fn tenure_defaults() {
        let p = TabuParams::default();
        assert_eq!(p.tenure_for(1000), 20);
        assert_eq!(p.tenure_for(16), 4);
        assert_eq!(p.tenure_for(1), 0);
        let explicit = TabuParams {
            tenure: Some(20),
            ..p
        };
        assert_eq!(explicit.tenure_for(8), 7);
    }

    /// Plain steepest descent.
    fn steepest(model: &IsingModel, spins: &mut [i8]) -> f64 {
        loop {
            let mut best = (usize::MAX, -EPS);
            for i in 0..model.n() {
                let d = model.flip_delta(spins, i);
                if d < best.1 - EPS {
                    best = (i, d);
                }
            }
            if best.0 == usize::MAX {
                return model.energy_of(spins);
            }
            spins[best.0] = -spins[best.0];
        }
    }

    #[test]
    fn never_worse_than_greedy_descent_from_same_start() {
        let base = isingbench_core::generate(&isingbench_core::InstanceSpec {
            family: isingbench_core::Family::CbfmP,
            m: 3,
            seed: 4,
            mask: None,
        })
        .unwrap();
        // Generic coefficients, so descent has no ties.
        let mut rng = solver_rng(1);
        let lin = (0..base.n()).map(|i| (i, rng.gen_range(-1.0..1.0))).collect();
        let quad = base.quadratic().iter().map(|&(i, j, c)| (i, j, c + rng.gen_range(-0.1..0.1))).collect();
        let m = IsingModel::new(base.n(), lin, quad).unwrap();
        for _ in 0..10 {
            let start: Vec<i8> = (0..m.n()).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect();
            let greedy = steepest(&m, &mut start.clone());
            let read = tabu_read(&m, &start, 20, 500, &Deadline::new(None), &mut rng);
            assert!(read.best_energy <= greedy, "{} > {greedy}", read.best_energy);
        }
    }

    #[test]
    fn replay_is_deterministic() {
        let m = IsingModel::new(3, vec![(0, 0.5)], vec![(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap();
        let p = TabuParams {
            reads: 4,
            read_timeout_s: None,
            ..TabuParams::default()
        };
        let a = tabu(&m, &p, 3).unwrap();
        let b = tabu(&m, &p, 3).unwrap();
        assert_eq!(a.energies(), b.energies());
        assert_eq!(a.best, b.best);
        a.validate(&m).unwrap();
    }
}
