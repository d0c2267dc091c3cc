//! Spin-vector Monte Carlo: each spin becomes a planar rotor `θ_i ∈ [0, π)`
//! evolving under
//!
//! `E(θ, s) = -A(s) Σ sin θ_i + B(s) (Σ h_i cos θ_i + Σ J_ij cos θ_i cos θ_j)`
//!
//! at a fixed inverse temperature while `s` runs from `Δs` to 1. Rotors are
//! projected to spins by the sign of `cos θ_i` at the end of each anneal.

use std::f64::consts::{FRAC_PI_2, PI};

use isingbench_core::IsingModel;
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Result, SolverError};
use crate::rng::solver_rng;
use crate::schedule::ScheduleTable;
use crate::trace::{Deadline, SolveTrace, TraceRecorder};

/// Inverse temperature in GHz⁻¹ (12 mK).
pub const SVMC_BETA: f64 = 3.9983;

/// `|cos θ|` at or below this projects to a random spin.
pub const ZERO_COS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SvmcParams {
    pub steps: u64,
    pub sweeps_per_step: u64,
    pub restarts: u64,
    pub beta: f64,
    pub time_limit_s: Option<f64>,
}

impl Default for SvmcParams {
    fn default() -> Self {
        Self {
            steps: 1000,
            sweeps_per_step: 1,
            restarts: 1,
            beta: SVMC_BETA,
            time_limit_s: None,
        }
    }
}

/// Rotor angles, each in `[0, π)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RotorState {
    theta: Vec<f64>,
}

impl RotorState {
    pub fn new(n: usize) -> Self {
        Self {
            theta: vec![FRAC_PI_2; n],
        }
    }

    pub fn angles(&self) -> &[f64] {
        &self.theta
    }

    /// Rotor energy at schedule values `a`, `b`.
    pub fn energy(&self, model: &IsingModel, a: f64, b: f64) -> f64 {
        let cos: Vec<f64> = self.theta.iter().map(|t| t.cos()).collect();
        let transverse: f64 = self.theta.iter().map(|t| t.sin()).sum();
        let field: f64 = model.linear().iter().map(|&(i, h)| h * cos[i]).sum();
        let coupling: f64 = model.quadratic().iter().map(|&(i, j, c)| c * cos[i] * cos[j]).sum();
        -a * transverse + b * (field + coupling)
    }
}

/// Projects an angle to a spin; `None` when `cos θ` is zero.
pub fn project_angle(theta: f64) -> Option<i8> {
    let c = theta.cos();
    if c > ZERO_COS {
        Some(1)
    } else if c < -ZERO_COS {
        Some(-1)
    } else {
        None
    }
}

/// One anneal; returns the rotor state at `s = 1`.
pub fn svmc_anneal<R: Rng + ?Sized>(
    model: &IsingModel,
    schedule: &ScheduleTable,
    params: &SvmcParams,
    rng: &mut R,
    deadline: &Deadline,
) -> RotorState {
    let n = model.n();
    let mut state = RotorState::new(n);
    let mut cos: Vec<f64> = state.theta.iter().map(|t| t.cos()).collect();
    let mut sin: Vec<f64> = state.theta.iter().map(|t| t.sin()).collect();
    for k in 1..=params.steps {
        let (a, b) = schedule.at(k as f64 / params.steps as f64);
        for _ in 0..params.sweeps_per_step {
            for i in 0..n {
                let proposal = rng.gen_range(0.0..PI);
                let (ps, pc) = proposal.sin_cos();
                let mut f = model.field(i);
                for nb in model.neighbors(i) {
                    f += nb.coupling * cos[nb.site as usize];
                }
                let delta = -a * (ps - sin[i]) + b * f * (pc - cos[i]);
                if delta <= 0.0 || rng.gen::<f64>() < (-params.beta * delta).exp() {
                    state.theta[i] = proposal;
                    cos[i] = pc;
                    sin[i] = ps;
                }
            }
        }
        if deadline.expired() {
            break;
        }
    }
    state
}

pub fn project<R: Rng + ?Sized>(state: &RotorState, rng: &mut R) -> Vec<i8> {
    state
        .theta
        .iter()
        .map(|&t| project_angle(t).unwrap_or_else(|| if rng.gen::<bool>() { 1 } else { -1 }))
        .collect()
}

pub fn svmc(model: &IsingModel, schedule: &ScheduleTable, params: &SvmcParams, seed: u64) -> Result<SolveTrace> {
    if params.steps == 0 || params.sweeps_per_step == 0 {
        return Err(SolverError::InvalidParams("steps and sweeps per step must be at least 1".into()));
    }
    if params.restarts == 0 && params.time_limit_s.is_none() {
        return Err(SolverError::InvalidParams("restarts must be at least 1".into()));
    }
    if !(params.beta > 0.0 && params.beta.is_finite()) {
        return Err(SolverError::InvalidParams(format!("beta must be positive, got {}", params.beta)));
    }
    let deadline = Deadline::new(params.time_limit_s);
    let mut rec = TraceRecorder::new(model);
    let mut rng = solver_rng(seed);
    let mut done = 0;
    while done < params.restarts && !deadline.expired() {
        let state = svmc_anneal(model, schedule, params, &mut rng, &deadline);
        let spins = project(&state, &mut rng);
        rec.offer(model.energy_of(&spins), &spins);
        done += 1;
    }
    Ok(rec.finish("svmc", json!({ "params": params, "restarts_done": done }), seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projection_by_cosine_sign() {
        assert_eq!(project_angle(0.0), Some(1));
        assert_eq!(project_angle(PI - 1e-6), Some(-1));
        assert_eq!(project_angle(FRAC_PI_2), None);
    }

    #[test]
    fn rotor_energy_at_corners_equals_ising_energy() {
        let m = IsingModel::new(3, vec![(0, 0.5), (2, -1.0)], vec![(0, 1, -1.0), (1, 2, 0.25)]).unwrap();
        for bits in 0..8u64 {
            let spins: Vec<i8> = (0..3).map(|i| if bits >> i & 1 == 1 { 1 } else { -1 }).collect();
            let state = RotorState {
                theta: spins.iter().map(|&s| if s == 1 { 0.0 } else { PI }).collect(),
            };
            let e = state.energy(&m, 0.0, 1.0);
            assert!((e - m.energy_of(&spins)).abs() < 1e-12);
        }
    }

    #[test]
    fn angles_stay_in_range() {
        let m = IsingModel::new(4, vec![(0, 1.0)], vec![(0, 1, -1.0), (1, 2, 1.0), (2, 3, -1.0)]).unwrap();
        let p = SvmcParams {
            steps: 50,
            ..SvmcParams::default()
        };
        let st = svmc_anneal(&m, &ScheduleTable::linear_fallback(), &p, &mut solver_rng(1), &Deadline::new(None));
        assert!(st.angles().iter().all(|&t| (0.0..PI).contains(&t)));
    }

    #[test]
    fn single_spin_aligns_with_field() {
        let m = IsingModel::new(1, vec![(0, -1.0)], vec![]).unwrap();
        let p = SvmcParams {
            steps: 1000,
            restarts: 8,
            ..SvmcParams::default()
        };
        let sched = ScheduleTable::linear_fallback();
        let mut hits = 0;
        for seed in 0..100 {
            let t = svmc(&m, &sched, &p, seed).unwrap();
            if t.best.as_slice() == [1] {
                hits += 1;
            }
        }
        assert!(hits >= 99, "{hits}/100");
    }

    #[test]
    fn replay_is_deterministic() {
        let m = IsingModel::new(3, vec![(1, 0.5)], vec![(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap();
        let p = SvmcParams {
            steps: 40,
            restarts: 3,
            ..SvmcParams::default()
        };
        let s = ScheduleTable::linear_fallback();
        let a = svmc(&m, &s, &p, 4).unwrap();
        let b = svmc(&m, &s, &p, 4).unwrap();
        assert_eq!(a.energies(), b.energies());
        assert_eq!(a.best, b.best);
    }
}
