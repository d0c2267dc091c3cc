//! Simulated annealing with the Metropolis criterion over a geometric
//! inverse-temperature schedule.

use isingbench_core::IsingModel;
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Result, SolverError};
use crate::rng::solver_rng;
use crate::trace::{Deadline, SolveTrace, TraceRecorder};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AnnealParams {
    pub reads: u64,
    pub sweeps: u64,
    /// `(beta_hot, beta_cold)`; derived from the model when unset.
    pub beta_range: Option<(f64, f64)>,
    pub time_limit_s: Option<f64>,
}

impl Default for AnnealParams {
    fn default() -> Self {
        Self {
            reads: 100,
            sweeps: 1000,
            beta_range: None,
            time_limit_s: None,
        }
    }
}

/// Metropolis test for a move changing the energy by `delta`, given a
/// uniform draw `u` in `[0, 1)`.
#[inline]
pub fn metropolis_accept(delta: f64, beta: f64, u: f64) -> bool {
    delta <= 0.0 || u < (-beta * delta).exp()
}

/// Default schedule endpoints: the largest single-flip change is accepted
/// with probability 1/2 at the hot end, and the smallest nonzero one
/// (twice the smallest coefficient) with probability 1e-6 at the cold end.
pub fn default_beta_range(model: &IsingModel) -> (f64, f64) {
    let max_flip = model.max_flip_magnitude();
    let min_flip = model.min_nonzero_coefficient().map(|c| 2.0 * c);
    match (max_flip > 0.0, min_flip) {
        (true, Some(min_flip)) => {
            let hot = std::f64::consts::LN_2 / max_flip;
            let cold = (1e6f64).ln() / min_flip;
            (hot, cold.max(hot))
        }
        _ => (0.1, 1.0),
    }
}

/// `steps` inverse temperatures interpolated geometrically from `hot` to `cold`.
pub fn geometric_betas(hot: f64, cold: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![cold],
        _ => {
            let ratio = (cold / hot).powf(1.0 / (steps - 1) as f64);
            (0..steps).map(|k| hot * ratio.powi(k as i32)).collect()
        }
    }
}

/// One anneal from `spins`; returns the final energy.
pub fn anneal_once<R: Rng + ?Sized>(
    model: &IsingModel,
    spins: &mut [i8],
    betas: &[f64],
    rng: &mut R,
    deadline: &Deadline,
) -> f64 {
    let n = model.n();
    let mut field: Vec<f64> = (0..n).map(|i| model.local_field(spins, i)).collect();
    let mut energy = model.energy_of(spins);
    for &beta in betas {
        for i in 0..n {
            let d = -2.0 * f64::from(spins[i]) * field[i];
            if metropolis_accept(d, beta, rng.gen::<f64>()) {
                spins[i] = -spins[i];
                energy += d;
                let s = f64::from(spins[i]);
                for nb in model.neighbors(i) {
                    field[nb.site as usize] += 2.0 * nb.coupling * s;
                }
            }
        }
        if deadline.expired() {
            break;
        }
    }
    energy
}

pub fn simulated_annealing(model: &IsingModel, params: &AnnealParams, seed: u64) -> Result<SolveTrace> {
    if params.sweeps == 0 {
        return Err(SolverError::InvalidParams("sweeps must be at least 1".into()));
    }
    if params.reads == 0 && params.time_limit_s.is_none() {
        return Err(SolverError::InvalidParams("reads must be at least 1".into()));
    }
    let (hot, cold) = match params.beta_range {
        Some((h, c)) if h > 0.0 && c >= h && c.is_finite() => (h, c),
        Some((h, c)) => {
            return Err(SolverError::InvalidParams(format!(
                "beta range must satisfy 0 < hot <= cold, got ({h}, {c})"
            )))
        }
        None => default_beta_range(model),
    };
    let betas = geometric_betas(hot, cold, params.sweeps as usize);
    let deadline = Deadline::new(params.time_limit_s);
    let mut rec = TraceRecorder::new(model);
    let mut rng = solver_rng(seed);
    let n = model.n();
    let mut spins = vec![1i8; n];
    let mut reads = 0;
    while reads < params.reads && !deadline.expired() {
        for s in spins.iter_mut() {
            *s = if rng.gen::<bool>() { 1 } else { -1 };
        }
        let e = anneal_once(model, &mut spins, &betas, &mut rng, &deadline);
        rec.offer(e, &spins);
        reads += 1;
    }
    Ok(rec.finish(
        "sa",
        json!({ "params": params, "beta_hot": hot, "beta_cold": cold, "reads_done": reads }),
        seed,
    ))
}
