//! Serializable solver selection, shared by the CLI and benchmark grids.

use std::path::PathBuf;

use isingbench_core::IsingModel;
use serde::{Deserialize, Serialize};

use crate::anneal::{simulated_annealing, AnnealParams};
use crate::budget::SolverBudget;
use crate::ensemble::{parallel_restarts, DEFAULT_PARALLEL};
use crate::error::Result;
use crate::glauber::glauber;
use crate::min_sum::{min_sum, MinSumParams};
use crate::pt_icm::{pt_icm, PtIcmParams};
use crate::scd::scd;
use crate::schedule::ScheduleTable;
use crate::svmc::{svmc, SvmcParams};
use crate::tabu::{tabu, TabuParams};
use crate::trace::SolveTrace;

pub const SOLVER_NAMES: [&str; 7] = ["scd", "glauber", "tabu", "sa", "svmc", "pt-icm", "min-sum"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SvmcConfig {
    #[serde(flatten)]
    pub params: SvmcParams,
    /// Schedule CSV; the linear stand-in is used when absent.
    pub schedule: Option<PathBuf>,
    pub parallel: usize,
}

impl Default for SvmcConfig {
    fn default() -> Self {
        Self {
            params: SvmcParams::default(),
            schedule: None,
            parallel: DEFAULT_PARALLEL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PtIcmConfig {
    #[serde(flatten)]
    pub params: PtIcmParams,
    pub parallel: usize,
}

impl Default for PtIcmConfig {
    fn default() -> Self {
        Self {
            params: PtIcmParams::default(),
            parallel: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "solver", rename_all = "kebab-case")]
pub enum SolverConfig {
    Scd(SolverBudget),
    Glauber(SolverBudget),
    Tabu(TabuParams),
    Sa(AnnealParams),
    Svmc(SvmcConfig),
    PtIcm(PtIcmConfig),
    MinSum(MinSumParams),
}

impl SolverConfig {
    pub fn name(&self) -> &'static str {
        match self {
            SolverConfig::Scd(_) => "scd",
            SolverConfig::Glauber(_) => "glauber",
            SolverConfig::Tabu(_) => "tabu",
            SolverConfig::Sa(_) => "sa",
            SolverConfig::Svmc(_) => "svmc",
            SolverConfig::PtIcm(_) => "pt-icm",
            SolverConfig::MinSum(_) => "min-sum",
        }
    }

    /// Default configuration for a solver name.
    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "scd" => SolverConfig::Scd(SolverBudget::restarts(1)),
            "glauber" => SolverConfig::Glauber(SolverBudget::restarts(1000)),
            "tabu" => SolverConfig::Tabu(TabuParams::default()),
            "sa" => SolverConfig::Sa(AnnealParams::default()),
            "svmc" => SolverConfig::Svmc(SvmcConfig::default()),
            "pt-icm" => SolverConfig::PtIcm(PtIcmConfig::default()),
            "min-sum" => SolverConfig::MinSum(MinSumParams::default()),
            _ => return None,
        })
    }

    /// Parameters as JSON, without the solver tag.
    pub fn params_json(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("configs serialize");
        if let Some(obj) = v.as_object_mut() {
            obj.remove("solver");
        }
        v
    }

    pub fn run(&self, model: &IsingModel, seed: u64) -> Result<SolveTrace> {
        let mut trace = match self {
            SolverConfig::Scd(b) => scd(model, b, seed)?,
            SolverConfig::Glauber(b) => glauber(model, b, seed)?,
            SolverConfig::Tabu(p) => tabu(model, p, seed)?,
            SolverConfig::Sa(p) => simulated_annealing(model, p, seed)?,
            SolverConfig::Svmc(c) => {
                let schedule = match &c.schedule {
                    Some(path) => ScheduleTable::load(path)?,
                    None => ScheduleTable::linear_fallback(),
                };
                parallel_restarts("svmc", self.params_json(), c.parallel, seed, |s| {
                    svmc(model, &schedule, &c.params, s)
                })?
            }
            SolverConfig::PtIcm(c) => {
                c.params.betas.values()?;
                parallel_restarts("pt-icm", self.params_json(), c.parallel, seed, |s| {
                    pt_icm(model, &c.params, s)
                })?
            }
            SolverConfig::MinSum(p) => min_sum(model, p, seed)?,
        };
        trace.solver = self.name().to_string();
        trace.params = self.params_json();
        Ok(trace)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for name in SOLVER_NAMES {
            let c = SolverConfig::from_name(name).unwrap();
            assert_eq!(c.name(), name);
            let json = serde_json::to_string(&c).unwrap();
            let back: SolverConfig = serde_json::from_str(&json).unwrap();
            assert_eq!(back, c, "{json}");
        }
        assert!(SolverConfig::from_name("qa").is_none());
    }

    #[test]
    fn parses_partial_json() {
        let c: SolverConfig = serde_json::from_str(r#"{"solver": "sa", "sweeps": 64}"#).unwrap();
        assert_eq!(
            c,
            SolverConfig::Sa(AnnealParams {
                sweeps: 64,
                ..AnnealParams::default()
            })
        );
        let c: SolverConfig = serde_json::from_str(r#"{"solver": "pt-icm", "betas": "tuned", "rounds": 5}"#).unwrap();
        match c {
            SolverConfig::PtIcm(p) => {
                assert_eq!(p.params.rounds, 5);
                assert_eq!(p.parallel, 1);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn every_solver_runs() {
        let m = IsingModel::new(4, vec![(0, -1.0)], vec![(0, 1, -1.0), (1, 2, 1.0), (2, 3, -1.0)]).unwrap();
        let exact = isingbench_core::brute_force(&m).unwrap().energy;
        for name in SOLVER_NAMES {
            let mut c = SolverConfig::from_name(name).unwrap();
            match &mut c {
                SolverConfig::Svmc(s) => {
                    s.params.steps = 100;
                    s.parallel = 2;
                }
                SolverConfig::PtIcm(p) => p.params.rounds = 20,
                _ => {}
            }
            let t = c.run(&m, 1).unwrap();
            t.validate(&m).unwrap();
            assert_eq!(t.solver, name);
            assert_eq!(t.best_energy, exact, "{name}");
        }
    }
}
