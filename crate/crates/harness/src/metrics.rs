//! Solution-quality and time-to-solution metrics.

use isingbench_solvers::TraceEvent;

use crate::error::{HarnessError, Result};

/// Energies within this relative distance of the target count as equal.
pub const MATCH_RTOL: f64 = 1e-9;

/// `100 |achieved − best_known| / |best_known|`, in percent.
pub fn relative_difference(best_known: f64, achieved: f64) -> Result<f64> {
    if best_known == 0.0 {
        return Err(HarnessError::ZeroReference);
    }
    Ok(100.0 * (achieved - best_known).abs() / best_known.abs())
}

fn reaches(energy: f64, target: f64) -> bool {
    energy <= target || (energy - target).abs() <= MATCH_RTOL * target.abs().max(1.0)
}

/// Earliest time at which a best-so-far trace reaches `target`.
///
/// An event equal to the target gives its own time. Otherwise the time is
/// interpolated linearly in energy between the last event above the target
/// and the first below it. A trace whose first event is already below the
/// target matches at that event; one that never gets there is unmatched.
pub fn time_to_match(events: &[TraceEvent], target: f64) -> Option<f64> {
    let k = events.iter().position(|e| reaches(e.energy, target))?;
    let hit = events[k];
    if (hit.energy - target).abs() <= MATCH_RTOL * target.abs().max(1.0) || k == 0 {
        return Some(hit.elapsed_s);
    }
    let prev = events[k - 1];
    let frac = (target - prev.energy) / (hit.energy - prev.energy);
    Some(prev.elapsed_s + frac * (hit.elapsed_s - prev.elapsed_s))
}

/// Best-so-far trace from `(elapsed_s, energy)` points in any order.
pub fn best_so_far(points: &[(f64, f64)]) -> Vec<TraceEvent> {
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut out: Vec<TraceEvent> = Vec::new();
    for (t, e) in sorted {
        if out.last().is_none_or(|last| e < last.energy) {
            out.push(TraceEvent {
                elapsed_s: t,
                energy: e,
            });
        }
    }
    out
}
