//! Steepest coordinate descent: a greedy constructive heuristic.
//!
//! Starting from an all-unassigned configuration, each step assigns the
//! `(site, value)` pair that lowers the partial energy the most (ties broken
//! uniformly at random). Setting an unassigned site `i` to `v` changes the
//! energy by `v · f_i` where `f_i = h_i + Σ_j J_ij σ_j` over assigned
//! neighbours, so the best move picks the largest `|f_i|` with `v = -sign f_i`.

use isingbench_core::IsingModel;
use rand::Rng;
use serde_json::json;

use crate::budget::SolverBudget;
use crate::error::Result;
use crate::rng::solver_rng;
use crate::trace::{Deadline, SolveTrace, TraceRecorder};

const TIE: f64 = 1e-12;

/// One greedy pass; returns the complete configuration and its energy
/// (accumulated incrementally).
pub fn scd_pass<R: Rng + ?Sized>(model: &IsingModel, rng: &mut R) -> (Vec<i8>, f64) {
    let n = model.n();
    let mut spins = vec![0i8; n];
    let mut field: Vec<f64> = model.fields().to_vec();
    let mut open: Vec<usize> = (0..n).collect();
    let mut energy = 0.0;

    while !open.is_empty() {
        let mut best = f64::NEG_INFINITY;
        let mut weight = 0u32;
        let mut pick = (0usize, 1i8);
        for (pos, &i) in open.iter().enumerate() {
            let f = field[i];
            let mag = f.abs();
            if mag > best + TIE {
                best = mag;
                weight = 0;
            } else if mag < best - TIE {
                continue;
            }
            // A zero field ties both values, which counts as two options.
            let options: &[i8] = if mag <= TIE {
                &[1, -1]
            } else if f > 0.0 {
                &[-1]
            } else {
                &[1]
            };
            for &v in options {
                weight += 1;
                if rng.gen_range(0..weight) == 0 {
                    pick = (pos, v);
                }
            }
        }
        let (pos, v) = pick;
        let site = open.swap_remove(pos);
        energy += f64::from(v) * field[site];
        spins[site] = v;
        for nb in model.neighbors(site) {
            field[nb.site as usize] += nb.coupling * f64::from(v);
        }
    }
    (spins, energy)
}

/// Repeats greedy passes until the budget is exhausted; returns the best.
pub fn scd(model: &IsingModel, budget: &SolverBudget, seed: u64) -> Result<SolveTrace> {
    budget.validate()?;
    let deadline = Deadline::new(budget.time_limit_s);
    let mut rec = TraceRecorder::new(model);
    let mut rng = solver_rng(seed);
    let mut passes = 0;
    while budget.allows(passes, &deadline) {
        let (spins, energy) = scd_pass(model, &mut rng);
        rec.offer(energy, &spins);
        passes += 1;
    }
    Ok(rec.finish("scd", json!({ "budget": budget, "passes": passes }), seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Every sequence of greedy choices (all argmin ties explored).
    fn all_greedy_outcomes(model: &IsingModel, spins: &mut Vec<i8>, out: &mut Vec<f64>) {
        let n = model.n();
        let open: Vec<usize> = (0..n).filter(|&i| spins[i] == 0).collect();
        if open.is_empty() {
            out.push(model.energy_of(spins));
            return;
        }
        let partial = |s: &[i8]| model.energy_of(s);
        let mut moves = Vec::new();
        for &i in &open {
            for v in [-1i8, 1] {
                spins[i] = v;
                moves.push((partial(spins), i, v));
                spins[i] = 0;
            }
        }
        let best = moves.iter().map(|m| m.0).fold(f64::INFINITY, f64::min);
        for &(e, i, v) in &moves {
            if e == best {
                spins[i] = v;
                all_greedy_outcomes(model, spins, out);
                spins[i] = 0;
            }
        }
    }

    #[test]
    fn ferromagnetic_pair_every_path() {
        let m = IsingModel::new(2, vec![], vec![(0, 1, -1.0)]).unwrap();
        let mut outcomes = Vec::new();
        all_greedy_outcomes(&m, &mut vec![0; 2], &mut outcomes);
        assert_eq!(outcomes.len(), 4);
        assert!(outcomes.iter().all(|&e| e == -1.0));
        for seed in 0..50 {
            let mut rng = solver_rng(seed);
            assert_eq!(scd_pass(&m, &mut rng).1, -1.0);
        }
    }

    #[test]
    fn single_spin_one_step() {
        let m = IsingModel::new(1, vec![(0, -1.0)], vec![]).unwrap();
        let t = scd(&m, &SolverBudget::restarts(1), 0).unwrap();
        assert_eq!(t.best.as_slice(), &[1]);
        assert_eq!(t.best_energy, -1.0);
    }

    #[test]
    fn ferromagnetic_chain_reaches_ground_state() {
        let n = 16;
        let chain = (0..n - 1).map(|i| (i, i + 1, -1.0)).collect();
        let m = IsingModel::new(n, vec![], chain).unwrap();
        let exact = isingbench_core::brute_force(&m).unwrap().energy;
        assert_eq!(exact, -15.0);
        for seed in 0..20 {
            let t = scd(&m, &SolverBudget::restarts(1), seed).unwrap();
            assert_eq!(t.best_energy, exact);
        }
    }

    #[test]
    fn pass_matches_some_enumerated_path() {
        let m = IsingModel::new(
            4,
            vec![(0, 0.5), (3, -1.0)],
            vec![(0, 1, 1.0), (1, 2, -1.0), (2, 3, 1.0), (0, 3, 0.25)],
        )
        .unwrap();
        let mut outcomes = Vec::new();
        all_greedy_outcomes(&m, &mut vec![0; 4], &mut outcomes);
        for seed in 0..30 {
            let (spins, e) = scd_pass(&m, &mut solver_rng(seed));
            assert_eq!(e, m.energy_of(&spins));
            assert!(outcomes.contains(&e));
        }
    }

    #[test]
    fn time_budget_stops() {
        let m = IsingModel::new(3, vec![(0, 1.0)], vec![(0, 1, 1.0)]).unwrap();
        let t = scd(&m, &SolverBudget::seconds(0.05), 3).unwrap();
        t.validate(&m).unwrap();
        assert!(t.elapsed_s < 1.0);
    }
}
