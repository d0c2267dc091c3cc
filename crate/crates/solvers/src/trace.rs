use std::time::{Duration, Instant};

use isingbench_core::{IsingModel, SpinConfiguration};
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// One improvement of the best-so-far energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceEvent {
    /// Seconds since the solver started.
    pub elapsed_s: f64,
    pub energy: f64,
}

/// Outcome of a solver run: the best-so-far history and the best
/// configuration found.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveTrace {
    pub solver: String,
    pub params: Value,
    pub seed: u64,
    pub events: Vec<TraceEvent>,
    pub best: SpinConfiguration,
    pub best_energy: f64,
    /// Total wall-clock time of the run.
    pub elapsed_s: f64,
}

impl SolveTrace {
    /// Energies of the events, i.e. the trace with wall-clock fields removed.
    pub fn energies(&self) -> Vec<f64> {
        self.events.iter().map(|e| e.energy).collect()
    }

    /// Checks the trace invariants against `model`.
    pub fn validate(&self, model: &IsingModel) -> Result<(), String> {
        for w in self.events.windows(2) {
            if w[1].energy > w[0].energy {
                return Err(format!("energy increased: {:?} -> {:?}", w[0], w[1]));
            }
            if w[1].elapsed_s < w[0].elapsed_s {
                return Err(format!("time decreased: {:?} -> {:?}", w[0], w[1]));
            }
        }
        if !self.best.is_complete() {
            return Err("best configuration has unassigned sites".into());
        }
        let e = model.energy(&self.best).map_err(|e| e.to_string())?;
        if e != self.best_energy {
            return Err(format!("best energy {} but configuration has {e}", self.best_energy));
        }
        match self.events.last() {
            Some(last) if last.energy == self.best_energy => Ok(()),
            Some(last) => Err(format!(
                "final event {} differs from best energy {}",
                last.energy, self.best_energy
            )),
            None => Err("trace has no events".into()),
        }
    }
}

/// Wall-clock limit measured from solver start.
#[derive(Debug, Clone, Copy)]
pub struct Deadline {
    start: Instant,
    limit: Option<Duration>,
}

impl Deadline {
    pub fn new(limit_s: Option<f64>) -> Self {
        Self {
            start: Instant::now(),
            limit: limit_s.map(Duration::from_secs_f64),
        }
    }

    pub fn starting_at(start: Instant, limit_s: Option<f64>) -> Self {
        Self {
            start,
            limit: limit_s.map(Duration::from_secs_f64),
        }
    }

    pub fn expired(&self) -> bool {
        self.limit.is_some_and(|l| self.start.elapsed() >= l)
    }

    pub fn elapsed_s(&self) -> f64 {
        self.start.elapsed().as_secs_f64()
    }
}

/// Collects best-so-far improvements. Candidate energies are the solver's
/// running totals; improvements are re-evaluated exactly before recording.
pub struct TraceRecorder<'m> {
    model: &'m IsingModel,
    start: Instant,
    events: Vec<TraceEvent>,
    best: Option<Vec<i8>>,
    best_energy: f64,
}

const DRIFT: f64 = 1e-9;

impl<'m> TraceRecorder<'m> {
    pub fn new(model: &'m IsingModel) -> Self {
        Self::starting_at(model, Instant::now())
    }

    pub fn starting_at(model: &'m IsingModel, start: Instant) -> Self {
        Self {
            model,
            start,
            events: Vec::new(),
            best: None,
            best_energy: f64::INFINITY,
        }
    }

    pub fn best_energy(&self) -> f64 {
        self.best_energy
    }

    /// Would `approx_energy` possibly improve on the current best?
    #[inline]
    pub fn is_candidate(&self, approx_energy: f64) -> bool {
        approx_energy < self.best_energy - DRIFT || self.best.is_none()
    }

    /// Offers a complete configuration; returns whether it was recorded.
    pub fn offer(&mut self, approx_energy: f64, spins: &[i8]) -> bool {
        if !self.is_candidate(approx_energy) {
            return false;
        }
        let exact = self.model.energy_of(spins);
        if exact < self.best_energy || self.best.is_none() {
            debug_assert!(spins.iter().all(|&s| s == 1 || s == -1));
            self.best_energy = exact;
            match &mut self.best {
                Some(b) => b.copy_from_slice(spins),
                None => self.best = Some(spins.to_vec()),
            }
            self.events.push(TraceEvent {
                elapsed_s: self.start.elapsed().as_secs_f64(),
                energy: exact,
            });
            true
        } else {
            false
        }
    }

    pub fn finish(self, solver: &str, params: Value, seed: u64) -> SolveTrace {
        let elapsed_s = self.start.elapsed().as_secs_f64();
        let n = self.model.n();
        let (best, best_energy, events) = match self.best {
            Some(b) => (b, self.best_energy, self.events),
            // Only reachable with n = 0 or a zero budget.
            None => {
                let b = vec![-1; n];
                let e = self.model.energy_of(&b);
                (b, e, vec![TraceEvent { elapsed_s, energy: e }])
            }
        };
        SolveTrace {
            solver: solver.to_string(),
            params,
            seed,
            events,
            best: SpinConfiguration::new(best).expect("spins are +-1"),
            best_energy,
            elapsed_s,
        }
    }
}

/// Merges member traces of a parallel ensemble into one: the best member
/// wins (lowest index on ties) and events are interleaved by time.
pub fn merge_traces(solver: &str, params: Value, seed: u64, members: Vec<SolveTrace>) -> SolveTrace {
    assert!(!members.is_empty());
    let mut all: Vec<TraceEvent> = members.iter().flat_map(|t| t.events.iter().copied()).collect();
    all.sort_by(|a, b| {
        a.elapsed_s
            .total_cmp(&b.elapsed_s)
            .then(a.energy.total_cmp(&b.energy))
    });
    let mut events: Vec<TraceEvent> = Vec::new();
    for e in all {
        if events.last().is_none_or(|last| e.energy < last.energy) {
            events.push(e);
        }
    }
    let elapsed_s = members.iter().map(|t| t.elapsed_s).fold(0.0, f64::max);
    let winner = members
        .into_iter()
        .reduce(|a, b| if b.best_energy < a.best_energy { b } else { a })
        .unwrap();
    debug_assert_eq!(events.last().map(|e| e.energy), Some(winner.best_energy));
    SolveTrace {
        solver: solver.to_string(),
        params,
        seed,
        events,
        best: winner.best,
        best_energy: winner.best_energy,
        elapsed_s,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recorder_keeps_strict_improvements() {
        let model = IsingModel::new(2, vec![], vec![(0, 1, -1.0)]).unwrap();
        let mut rec = TraceRecorder::new(&model);
        assert!(rec.offer(1.0, &[1, -1]));
        assert!(!rec.offer(1.0, &[-1, 1]));
        assert!(rec.offer(-1.0, &[1, 1]));
        assert!(!rec.offer(-1.0, &[-1, -1]));
        let t = rec.finish("test", Value::Null, 0);
        assert_eq!(t.energies(), vec![1.0, -1.0]);
        t.validate(&model).unwrap();
    }

    #[test]
    fn empty_model_trace() {
        let model = IsingModel::empty(0);
        let t = TraceRecorder::new(&model).finish("x", Value::Null, 1);
        assert_eq!(t.best_energy, 0.0);
        t.validate(&model).unwrap();
    }

    #[test]
    fn merge_picks_best_member() {
        let model = IsingModel::new(1, vec![(0, 1.0)], vec![]).unwrap();
        let mk = |e: f64, s: i8, t: f64| SolveTrace {
            solver: "m".into(),
            params: Value::Null,
            seed: 0,
            events: vec![TraceEvent { elapsed_s: t, energy: e }],
            best: SpinConfiguration::new(vec![s]).unwrap(),
            best_energy: e,
            elapsed_s: t,
        };
        let merged = merge_traces("m", Value::Null, 0, vec![mk(1.0, 1, 0.5), mk(-1.0, -1, 0.7)]);
        assert_eq!(merged.best_energy, -1.0);
        assert_eq!(merged.energies(), vec![1.0, -1.0]);
        merged.validate(&model).unwrap();
    }
}
