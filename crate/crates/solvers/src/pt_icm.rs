//! Parallel tempering with isoenergetic cluster moves.
//!
//! Two independent stacks of replicas share one inverse-temperature ladder.
//! A round is: two Metropolis sweeps per replica, one pass of
//! neighbour-temperature swaps in random pair order (per stack), then a
//! Houdayer cluster move between the two stacks at every `β > 1`.

use std::collections::VecDeque;

use isingbench_core::IsingModel;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::betas::{BetaLadder, REPLICAS};
use crate::error::{Result, SolverError};
use crate::rng::solver_rng;
use crate::trace::{Deadline, SolveTrace, TraceRecorder};

pub const SWEEPS_PER_ROUND: usize = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PtIcmParams {
    pub betas: BetaLadder,
    pub rounds: u64,
    pub restarts: u64,
    pub time_limit_s: Option<f64>,
    /// Recomputes energies and overlaps around every cluster move.
    pub check_invariants: bool,
}

impl Default for PtIcmParams {
    fn default() -> Self {
        Self {
            betas: BetaLadder::Default,
            rounds: 1000,
            restarts: 1,
            time_limit_s: None,
            check_invariants: false,
        }
    }
}

/// Counters collected over a run.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct PtDiagnostics {
    pub rounds: u64,
    /// Per neighbouring pair `(k, k + 1)`, summed over both stacks.
    pub swap_attempts: Vec<u64>,
    pub swap_accepts: Vec<u64>,
    pub icm_moves: u64,
    /// Cluster moves skipped because the replicas agreed everywhere.
    pub icm_skipped: u64,
    /// Checked moves only.
    pub icm_checked: u64,
    pub max_energy_sum_error: f64,
    pub overlap_violations: u64,
    pub incremental_energy_error: f64,
}

impl PtDiagnostics {
    pub fn swap_rates(&self) -> Vec<f64> {
        self.swap_attempts
            .iter()
            .zip(&self.swap_accepts)
            .map(|(&a, &s)| if a == 0 { 0.0 } else { s as f64 / a as f64 })
            .collect()
    }

    pub fn median_swap_rate(&self) -> f64 {
        let mut r = self.swap_rates();
        if r.is_empty() {
            return 0.0;
        }
        r.sort_by(f64::total_cmp);
        let k = r.len();
        if k % 2 == 1 {
            r[k / 2]
        } else {
            0.5 * (r[k / 2 - 1] + r[k / 2])
        }
    }
}

/// `min(1, exp((β_r − β_r')(E_r − E_r')))`.
pub fn swap_probability(beta_r: f64, energy_r: f64, beta_s: f64, energy_s: f64) -> f64 {
    ((beta_r - beta_s) * (energy_r - energy_s)).exp().min(1.0)
}

#[derive(Debug, Clone)]
struct Replica {
    spins: Vec<i8>,
    field: Vec<f64>,
    energy: f64,
}

impl Replica {
    fn random<R: Rng + ?Sized>(model: &IsingModel, rng: &mut R) -> Self {
        let spins: Vec<i8> = (0..model.n()).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect();
        let field = (0..model.n()).map(|i| model.local_field(&spins, i)).collect();
        let energy = model.energy_of(&spins);
        Self { spins, field, energy }
    }

    #[inline]
    fn flip(&mut self, model: &IsingModel, i: usize) {
        let d = -2.0 * f64::from(self.spins[i]) * self.field[i];
        self.spins[i] = -self.spins[i];
        self.energy += d;
        let s = f64::from(self.spins[i]);
        for nb in model.neighbors(i) {
            self.field[nb.site as usize] += 2.0 * nb.coupling * s;
        }
    }

    fn sweep<R: Rng + ?Sized>(&mut self, model: &IsingModel, beta: f64, rng: &mut R) {
        for i in 0..model.n() {
            let d = -2.0 * f64::from(self.spins[i]) * self.field[i];
            if d <= 0.0 || rng.gen::<f64>() < (-beta * d).exp() {
                self.flip(model, i);
            }
        }
    }
}

/// Flips the connected `q = -1` cluster containing a random disagreeing
/// site in both replicas. Returns `false` when the replicas agree everywhere.
fn cluster_move<R: Rng + ?Sized>(
    model: &IsingModel,
    a: &mut Replica,
    b: &mut Replica,
    rng: &mut R,
    seen: &mut [bool],
    queue: &mut VecDeque<usize>,
    cluster: &mut Vec<usize>,
) -> bool {
    let disagree: Vec<usize> = (0..model.n()).filter(|&i| a.spins[i] != b.spins[i]).collect();
    let Some(&root) = disagree.choose(rng) else {
        return false;
    };
    cluster.clear();
    queue.clear();
    seen[root] = true;
    queue.push_back(root);
    while let Some(i) = queue.pop_front() {
        cluster.push(i);
        for nb in model.neighbors(i) {
            let j = nb.site as usize;
            if !seen[j] && a.spins[j] != b.spins[j] {
                seen[j] = true;
                queue.push_back(j);
            }
        }
    }
    for &i in cluster.iter() {
        seen[i] = false;
        a.flip(model, i);
        b.flip(model, i);
    }
    true
}

struct Run<'a, R> {
    model: &'a IsingModel,
    betas: &'a [f64],
    rng: &'a mut R,
    diag: PtDiagnostics,
    check: bool,
    seen: Vec<bool>,
    queue: VecDeque<usize>,
    cluster: Vec<usize>,
    pairs: Vec<usize>,
}

impl<R: Rng> Run<'_, R> {
    fn round(&mut self, stacks: &mut [Vec<Replica>; 2], rec: &mut TraceRecorder) {
        let model = self.model;
        for stack in stacks.iter_mut() {
            for (rep, &beta) in stack.iter_mut().zip(self.betas) {
                for _ in 0..SWEEPS_PER_ROUND {
                    rep.sweep(model, beta, self.rng);
                }
                rec.offer(rep.energy, &rep.spins);
            }
        }
        for stack in stacks.iter_mut() {
            self.pairs.shuffle(self.rng);
            for &k in &self.pairs {
                let p = swap_probability(self.betas[k], stack[k].energy, self.betas[k + 1], stack[k + 1].energy);
                self.diag.swap_attempts[k] += 1;
                if p >= 1.0 || self.rng.gen::<f64>() < p {
                    stack.swap(k, k + 1);
                    self.diag.swap_accepts[k] += 1;
                }
            }
        }
        let [s0, s1] = stacks;
        for (k, &beta) in self.betas.iter().enumerate() {
            if beta <= 1.0 {
                continue;
            }
            let (a, b) = (&mut s0[k], &mut s1[k]);
            let before = self
                .check
                .then(|| (model.energy_of(&a.spins) + model.energy_of(&b.spins), overlaps(a, b)));
            let moved = cluster_move(
                model,
                a,
                b,
                self.rng,
                &mut self.seen,
                &mut self.queue,
                &mut self.cluster,
            );
            if !moved {
                self.diag.icm_skipped += 1;
                continue;
            }
            self.diag.icm_moves += 1;
            if let Some((sum, q)) = before {
                let ea = model.energy_of(&a.spins);
                let eb = model.energy_of(&b.spins);
                let err = (ea + eb - sum).abs();
                self.diag.icm_checked += 1;
                self.diag.max_energy_sum_error = self.diag.max_energy_sum_error.max(err);
                if overlaps(a, b) != q {
                    self.diag.overlap_violations += 1;
                }
                let drift = (ea - a.energy).abs().max((eb - b.energy).abs());
                self.diag.incremental_energy_error = self.diag.incremental_energy_error.max(drift);
            }
            rec.offer(a.energy, &a.spins);
            rec.offer(b.energy, &b.spins);
        }
        self.diag.rounds += 1;
    }
}

fn overlaps(a: &Replica, b: &Replica) -> Vec<i8> {
    a.spins.iter().zip(&b.spins).map(|(x, y)| x * y).collect()
}

/// Runs PT-ICM and also returns its diagnostics.
pub fn pt_icm_with_diagnostics(
    model: &IsingModel,
    params: &PtIcmParams,
    seed: u64,
) -> Result<(SolveTrace, PtDiagnostics)> {
    let betas = params.betas.values()?;
    if params.rounds == 0 {
        return Err(SolverError::InvalidParams("rounds must be at least 1".into()));
    }
    if params.restarts == 0 && params.time_limit_s.is_none() {
        return Err(SolverError::InvalidParams("restarts must be at least 1".into()));
    }
    let deadline = Deadline::new(params.time_limit_s);
    let mut rec = TraceRecorder::new(model);
    let mut rng = solver_rng(seed);
    let n = model.n();
    let mut run = Run {
        model,
        betas: &betas,
        rng: &mut rng,
        diag: PtDiagnostics {
            swap_attempts: vec![0; REPLICAS - 1],
            swap_accepts: vec![0; REPLICAS - 1],
            ..PtDiagnostics::default()
        },
        check: params.check_invariants,
        seen: vec![false; n],
        queue: VecDeque::new(),
        cluster: Vec::new(),
        pairs: (0..REPLICAS - 1).collect(),
    };
    let mut done = 0;
    'restarts: while done < params.restarts && !deadline.expired() {
        let mut stacks: [Vec<Replica>; 2] = [0, 1].map(|_| {
            (0..REPLICAS).map(|_| Replica::random(model, run.rng)).collect()
        });
        for _ in 0..params.rounds {
            run.round(&mut stacks, &mut rec);
            if deadline.expired() {
                break 'restarts;
            }
        }
        done += 1;
    }
    let diag = run.diag;
    let trace = rec.finish(
        "pt-icm",
        json!({ "params": params, "restarts_done": done, "rounds_done": diag.rounds }),
        seed,
    );
    Ok((trace, diag))
}

pub fn pt_icm(model: &IsingModel, params: &PtIcmParams, seed: u64) -> Result<SolveTrace> {
    pt_icm_with_diagnostics(model, params, seed).map(|(t, _)| t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use isingbench_core::{generate, Family, InstanceSpec};

    #[test]
    fn equal_betas_always_swap() {
        assert_eq!(swap_probability(2.0, -5.0, 2.0, 7.0), 1.0);
    }

    #[test]
    fn swap_probability_is_label_symmetric() {
        let cases = [(0.5, -3.0, 1.5, -1.0), (2.0, 4.0, 0.3, -2.5), (1.0, 1.0, 3.0, 2.0)];
        for (b1, e1, b2, e2) in cases {
            assert_eq!(swap_probability(b1, e1, b2, e2), swap_probability(b2, e2, b1, e1));
        }
        // Colder replica holding the higher energy always swaps.
        assert_eq!(swap_probability(1.0, -10.0, 2.0, -5.0), 1.0);
        assert!((swap_probability(1.0, -5.0, 2.0, -10.0) - (-5.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn cluster_moves_conserve_energy_and_overlap() {
        let model = generate(&InstanceSpec {
            family: Family::CbfmP,
            m: 3,
            seed: 2,
            mask: None,
        })
        .unwrap();
        let params = PtIcmParams {
            rounds: 20,
            check_invariants: true,
            ..PtIcmParams::default()
        };
        let (trace, diag) = pt_icm_with_diagnostics(&model, &params, 5).unwrap();
        trace.validate(&model).unwrap();
        assert!(diag.icm_checked > 100);
        assert_eq!(diag.overlap_violations, 0);
        assert!(diag.max_energy_sum_error <= 1e-9, "{}", diag.max_energy_sum_error);
        assert!(diag.incremental_energy_error <= 1e-9);
    }

    #[test]
    fn identical_replicas_skip_cluster_move() {
        let model = IsingModel::new(2, vec![], vec![(0, 1, -1.0)]).unwrap();
        let mut a = Replica::random(&model, &mut solver_rng(0));
        let mut b = a.clone();
        let moved = cluster_move(
            &model,
            &mut a,
            &mut b,
            &mut solver_rng(1),
            &mut [false; 2],
            &mut VecDeque::new(),
            &mut Vec::new(),
        );
        assert!(!moved);
    }

    #[test]
    fn rejects_bad_ladder() {
        let model = IsingModel::empty(2);
        let p = PtIcmParams {
            betas: BetaLadder::Custom(vec![1.0, 0.5]),
            ..PtIcmParams::default()
        };
        assert!(matches!(pt_icm(&model, &p, 0), Err(SolverError::Ladder(_))));
    }

    #[test]
    fn replay_is_deterministic() {
        let model = generate(&InstanceSpec {
            family: Family::Cbfm,
            m: 2,
            seed: 1,
            mask: None,
        })
        .unwrap();
        let p = PtIcmParams {
            rounds: 10,
            ..PtIcmParams::default()
        };
        let a = pt_icm(&model, &p, 8).unwrap();
        let b = pt_icm(&model, &p, 8).unwrap();
        assert_eq!(a.energies(), b.energies());
        assert_eq!(a.best, b.best);
    }
}
