//! Annealing schedules `A(s)`, `B(s)` in GHz, read from CSV.

use std::path::Path;

use serde::Deserialize;

use crate::error::{Result, SolverError};

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
pub struct ScheduleRow {
    pub s: f64,
    #[serde(rename = "A_GHz")]
    pub a: f64,
    #[serde(rename = "B_GHz")]
    pub b: f64,
}

/// Piecewise-linear schedule over `s ∈ [0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleTable {
    rows: Vec<ScheduleRow>,
}

const ENDPOINT_TOL: f64 = 1e-12;

impl ScheduleTable {
    pub fn new(rows: Vec<ScheduleRow>) -> Result<Self> {
        if rows.len() < 2 {
            return Err(SolverError::Schedule("need at least two rows".into()));
        }
        for (k, r) in rows.iter().enumerate() {
            if !(r.s.is_finite() && r.a.is_finite() && r.b.is_finite()) {
                return Err(SolverError::Schedule(format!("row {k} has a non-finite value")));
            }
        }
        for (k, w) in rows.windows(2).enumerate() {
            if w[1].s <= w[0].s {
                return Err(SolverError::Schedule(format!(
                    "s must be strictly increasing (row {} has s = {} after {})",
                    k + 1,
                    w[1].s,
                    w[0].s
                )));
            }
        }
        let first = rows[0].s;
        let last = rows[rows.len() - 1].s;
        if first.abs() > ENDPOINT_TOL || (last - 1.0).abs() > ENDPOINT_TOL {
            return Err(SolverError::Schedule(format!(
                "schedule must cover s = 0 and s = 1, got [{first}, {last}]"
            )));
        }
        if rows.windows(2).any(|w| w[1].a > w[0].a) {
            log::warn!("annealing schedule: A(s) is not non-increasing");
        }
        if rows.windows(2).any(|w| w[1].b < w[0].b) {
            log::warn!("annealing schedule: B(s) is not non-decreasing");
        }
        Ok(Self { rows })
    }

    /// Built-in stand-in: `A` falls linearly 6 → 0 GHz, `B` rises 0 → 12 GHz.
    pub fn linear_fallback() -> Self {
        Self {
            rows: vec![
                ScheduleRow { s: 0.0, a: 6.0, b: 0.0 },
                ScheduleRow { s: 1.0, a: 0.0, b: 12.0 },
            ],
        }
    }

    /// Constant `A`, `B` over the whole interval.
    pub fn constant(a: f64, b: f64) -> Self {
        Self {
            rows: vec![ScheduleRow { s: 0.0, a, b }, ScheduleRow { s: 1.0, a, b }],
        }
    }

    pub fn from_reader<R: std::io::Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let mut rows = Vec::new();
        for (k, rec) in rdr.deserialize::<ScheduleRow>().enumerate() {
            rows.push(rec.map_err(|e| SolverError::Schedule(format!("row {}: {e}", k + 1)))?);
        }
        Self::new(rows)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|source| SolverError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_reader(file).map_err(|e| match e {
            SolverError::Schedule(msg) => SolverError::Schedule(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn rows(&self) -> &[ScheduleRow] {
        &self.rows
    }

    /// `(A(s), B(s))`, with `s` clamped to `[0, 1]`.
    pub fn at(&self, s: f64) -> (f64, f64) {
        let s = s.clamp(0.0, 1.0);
        let k = self.rows.partition_point(|r| r.s <= s);
        if k == 0 {
            let r = self.rows[0];
            return (r.a, r.b);
        }
        if k == self.rows.len() {
            let r = self.rows[k - 1];
            return (r.a, r.b);
        }
        let (lo, hi) = (self.rows[k - 1], self.rows[k]);
        let t = (s - lo.s) / (hi.s - lo.s);
        (lo.a + t * (hi.a - lo.a), lo.b + t * (hi.b - lo.b))
    }
}
