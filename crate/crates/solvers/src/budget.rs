use serde::{Deserialize, Serialize};

use crate::error::{Result, SolverError};

/// Restart-style budget: stop after `restarts` passes, after `time_limit_s`
/// seconds, or whichever comes first when both are set.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SolverBudget {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restarts: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_limit_s: Option<f64>,
}

impl SolverBudget {
    pub fn restarts(n: u64) -> Self {
        Self {
            restarts: Some(n),
            time_limit_s: None,
        }
    }

    pub fn seconds(s: f64) -> Self {
        Self {
            restarts: None,
            time_limit_s: Some(s),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match (self.restarts, self.time_limit_s) {
            (None, None) => Err(SolverError::InvalidParams(
                "budget needs a restart count or a time limit".into(),
            )),
            (_, Some(t)) if !(t >= 0.0 && t.is_finite()) => Err(SolverError::InvalidParams(
                format!("time limit must be a non-negative number of seconds, got {t}"),
            )),
            _ => Ok(()),
        }
    }

    /// Whether another pass may start after `done` passes.
    pub fn allows(&self, done: u64, deadline: &crate::trace::Deadline) -> bool {
        self.restarts.is_none_or(|r| done < r) && !deadline.expired()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn needs_some_limit() {
        assert!(SolverBudget::default().validate().is_err());
        assert!(SolverBudget::restarts(3).validate().is_ok());
        assert!(SolverBudget::seconds(-1.0).validate().is_err());
    }
}
