//! Zero-temperature Glauber dynamics with random restarts.

use isingbench_core::IsingModel;
use rand::seq::SliceRandom;
use rand::Rng;
use serde_json::json;

use crate::budget::SolverBudget;
use crate::error::Result;
use crate::rng::solver_rng;
use crate::trace::{Deadline, SolveTrace, TraceRecorder};

/// Flips are taken only when they lower the energy by more than this.
pub const IMPROVEMENT: f64 = 1e-12;

/// Sweeps `spins` in fresh random orders, flipping every improving site,
/// until a sweep makes no flip. Returns the energy change, or `None` if the
/// deadline expired first.
pub fn descend<R: Rng + ?Sized>(
    model: &IsingModel,
    spins: &mut [i8],
    order: &mut [usize],
    rng: &mut R,
    deadline: &Deadline,
) -> Option<f64> {
    let mut change = 0.0;
    loop {
        order.shuffle(rng);
        let mut flipped = false;
        for &i in order.iter() {
            let d = model.flip_delta(spins, i);
            if d < -IMPROVEMENT {
                spins[i] = -spins[i];
                change += d;
                flipped = true;
            }
        }
        if !flipped {
            return Some(change);
        }
        if deadline.expired() {
            return None;
        }
    }
}

pub fn glauber(model: &IsingModel, budget: &SolverBudget, seed: u64) -> Result<SolveTrace> {
    budget.validate()?;
    let deadline = Deadline::new(budget.time_limit_s);
    let mut rec = TraceRecorder::new(model);
    let mut rng = solver_rng(seed);
    let n = model.n();
    let mut order: Vec<usize> = (0..n).collect();
    let mut spins = vec![1i8; n];
    let mut restarts = 0;
    while budget.allows(restarts, &deadline) {
        for s in spins.iter_mut() {
            *s = if rng.gen::<bool>() { 1 } else { -1 };
        }
        let start = model.energy_of(&spins);
        match descend(model, &mut spins, &mut order, &mut rng, &deadline) {
            Some(change) => {
                rec.offer(start + change, &spins);
                restarts += 1;
            }
            // An interrupted descent is not a local minimum; it only counts
            // if nothing else has been recorded yet.
            None => {
                if rec.best_energy().is_infinite() {
                    rec.offer(model.energy_of(&spins), &spins);
                }
                break;
            }
        }
    }
    Ok(rec.finish("glauber", json!({ "budget": budget, "restarts": restarts }), seed))
}
