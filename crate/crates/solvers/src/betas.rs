//! Inverse-temperature ladders for parallel tempering.

use std::str::FromStr;

use isingbench_core::IsingModel;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SolverError};
use crate::pt_icm::{pt_icm_with_diagnostics, PtIcmParams};

pub const REPLICAS: usize = 64;
pub const BETA_MIN: f64 = 0.1;
pub const BETA_MAX: f64 = 8.0;

/// Geometric ladder of 64 values over `[0.1, 8]`.
pub fn default_betas() -> Vec<f64> {
    crate::anneal::geometric_betas(BETA_MIN, BETA_MAX, REPLICAS)
}

/// Ladder tuned for even neighbour swap rates on a size-16 CBFM-P instance
/// (produced by `examples/tune_ladder.rs`).
pub fn tuned_betas() -> Vec<f64> {
    TUNED.to_vec()
}

#[rustfmt::skip]
const TUNED: [f64; REPLICAS] = [
    0.1, 0.10944751, 0.11897330, 0.12875575, 0.13884666, 0.14849186, 0.15813360, 0.16786861,
    0.17735835, 0.18666821, 0.19623836, 0.20574483, 0.21540840, 0.22491745, 0.23454602, 0.24390186,
    0.25349222, 0.26333394, 0.27326330, 0.28314915, 0.29311768, 0.30350393, 0.31425037, 0.32501370,
    0.33605204, 0.34774320, 0.35968268, 0.37186438, 0.38469469, 0.39876343, 0.41313469, 0.42855243,
    0.44497925, 0.46238335, 0.48091012, 0.50094660, 0.52314844, 0.54725725, 0.57332374, 0.60231472,
    0.63455623, 0.67049424, 0.71091418, 0.75696960, 0.80912328, 0.86792788, 0.93402880, 1.01246950,
    1.10455942, 1.21425557, 1.34701770, 1.50982983, 1.71182653, 1.98152093, 2.35540568, 2.88382194,
    3.61241393, 4.51814971, 5.43341084, 6.18414179, 6.80895775, 7.29872520, 7.70238312, 8.0,
];

/// Which ladder a PT-ICM run uses.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum BetaLadder {
    #[default]
    Default,
    Tuned,
    Custom(Vec<f64>),
}

impl BetaLadder {
    pub fn values(&self) -> Result<Vec<f64>> {
        let v = match self {
            BetaLadder::Default => default_betas(),
            BetaLadder::Tuned => tuned_betas(),
            BetaLadder::Custom(v) => v.clone(),
        };
        validate_ladder(&v)?;
        Ok(v)
    }
}

pub fn validate_ladder(betas: &[f64]) -> Result<()> {
    if betas.len() != REPLICAS {
        return Err(SolverError::Ladder(format!(
            "expected {REPLICAS} values, got {}",
            betas.len()
        )));
    }
    if let Some(b) = betas.iter().find(|b| !(b.is_finite() && **b > 0.0)) {
        return Err(SolverError::Ladder(format!("values must be positive and finite, got {b}")));
    }
    if let Some(k) = betas.windows(2).position(|w| w[1] <= w[0]) {
        return Err(SolverError::Ladder(format!(
            "values must be strictly increasing (position {} has {} after {})",
            k + 1,
            betas[k + 1],
            betas[k]
        )));
    }
    Ok(())
}

impl FromStr for BetaLadder {
    type Err = String;

    /// `default`, `tuned`, or a comma-separated list of values.
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "default" => Ok(BetaLadder::Default),
            "tuned" => Ok(BetaLadder::Tuned),
            list => list
                .split(',')
                .map(|t| t.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map(BetaLadder::Custom)
                .map_err(|_| format!("expected 'default', 'tuned' or a comma-separated list, got '{s}'")),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum LadderRepr {
    Named(String),
    Values(Vec<f64>),
}

impl Serialize for BetaLadder {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            BetaLadder::Default => LadderRepr::Named("default".into()),
            BetaLadder::Tuned => LadderRepr::Named("tuned".into()),
            BetaLadder::Custom(v) => LadderRepr::Values(v.clone()),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for BetaLadder {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        match LadderRepr::deserialize(de)? {
            LadderRepr::Named(name) => match name.as_str() {
                "default" | "tuned" => name.parse().map_err(serde::de::Error::custom),
                other => Err(serde::de::Error::custom(format!(
                    "unknown ladder '{other}', expected 'default', 'tuned' or a list"
                ))),
            },
            LadderRepr::Values(v) => Ok(BetaLadder::Custom(v)),
        }
    }
}

/// One feedback step: places new interior values so that each interval's
/// share of `Σ sqrt(-ln rate)` is equal. Endpoints are kept.
pub fn rebalance(betas: &[f64], rates: &[f64], damping: f64) -> Vec<f64> {
    let k = betas.len();
    // Cost of crossing each interval grows roughly with the square of its width.
    let cost: Vec<f64> = rates.iter().map(|&r| (-(r.clamp(1e-4, 0.9999)).ln()).sqrt()).collect();
    let mut cum = vec![0.0; k];
    for i in 1..k {
        cum[i] = cum[i - 1] + cost[i - 1];
    }
    let total = cum[k - 1];
    let mut out = vec![betas[0]; k];
    let mut seg = 0;
    for (j, slot) in out.iter_mut().enumerate().skip(1) {
        let target = total * j as f64 / (k - 1) as f64;
        while seg + 1 < k - 1 && cum[seg + 1] < target {
            seg += 1;
        }
        let span = cum[seg + 1] - cum[seg];
        let t = if span > 0.0 { (target - cum[seg]) / span } else { 0.0 };
        // Interpolate in log β so the geometric shape is the neutral point.
        let lb = betas[seg].ln() + t * (betas[seg + 1].ln() - betas[seg].ln());
        *slot = lb.exp();
    }
    for (o, b) in out.iter_mut().zip(betas) {
        *o = (b.ln() * damping + o.ln() * (1.0 - damping)).exp();
    }
    out[0] = betas[0];
    out[k - 1] = betas[k - 1];
    out
}

/// Iteratively equalises swap rates on `model`, starting from the default ladder.
pub fn tune_ladder(model: &IsingModel, iterations: usize, rounds: u64, seed: u64) -> Result<Vec<f64>> {
    let mut betas = default_betas();
    for it in 0..iterations {
        let params = PtIcmParams {
            betas: BetaLadder::Custom(betas.clone()),
            rounds,
            ..PtIcmParams::default()
        };
        let (_, diag) = pt_icm_with_diagnostics(model, &params, seed.wrapping_add(it as u64))?;
        let rates = diag.swap_rates();
        log::info!(
            "iteration {it}: median swap rate {:.3}, min {:.3}",
            diag.median_swap_rate(),
            rates.iter().copied().fold(1.0, f64::min)
        );
        betas = rebalance(&betas, &rates, 0.5);
    }
    validate_ladder(&betas)?;
    Ok(betas)
}
