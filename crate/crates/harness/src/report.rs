//! Run-time ratio reports against a reference solver.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::Serialize;

use crate::error::{csv_err, io_err, HarnessError, Result};
use crate::grid::budget_value;
use crate::metrics::{best_so_far, time_to_match};
use crate::results::{ExternalRow, InstanceRow, ResultRow};
use crate::stats::{mean, standard_error};

/// Where target energies and reference times come from.
#[derive(Debug, Clone)]
pub enum Reference {
    /// A solver label in the results: the target is its best energy at its
    /// largest budget, the reference time is when its trace first reaches it.
    Solver(String),
    /// Externally obtained `(energy, elapsed_s)` per instance.
    External { label: String, rows: Vec<ExternalRow> },
}

impl Reference {
    pub fn label(&self) -> &str {
        match self {
            Reference::Solver(l) | Reference::External { label: l, .. } => l,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceTarget {
    pub instance: String,
    pub size: Option<usize>,
    pub target: f64,
    pub reference_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceMatch {
    pub instance: String,
    pub size: Option<usize>,
    pub solver: String,
    pub target: f64,
    pub reference_time_s: f64,
    pub time_to_match_s: Option<f64>,
    pub ratio: Option<f64>,
}

/// Mean ratio over one size ensemble; reported only when every instance matched.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub size: Option<usize>,
    pub solver: String,
    pub mean_ratio: Option<f64>,
    pub stderr: Option<f64>,
    pub matched_count: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MatchReport {
    pub targets: Vec<InstanceTarget>,
    pub matches: Vec<InstanceMatch>,
    pub rows: Vec<ReportRow>,
}

fn targets_from_solver(rows: &[ResultRow], label: &str) -> Result<BTreeMap<String, (f64, f64)>> {
    let mut by_instance: BTreeMap<&str, Vec<&ResultRow>> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.solver == label) {
        by_instance.entry(&r.instance).or_default().push(r);
    }
    if by_instance.is_empty() {
        return Err(HarnessError::NoReference(label.to_string()));
    }
    let mut out = BTreeMap::new();
    for (inst, rs) in by_instance {
        let top = rs.iter().filter_map(|r| budget_value(&r.budget_key)).fold(f64::NEG_INFINITY, f64::max);
        let at_top: Vec<&&ResultRow> = if top.is_finite() {
            rs.iter().filter(|r| budget_value(&r.budget_key) == Some(top)).collect()
        } else {
            rs.iter().collect()
        };
        let target = at_top.iter().map(|r| r.best_energy).fold(f64::INFINITY, f64::min);
        let points: Vec<(f64, f64)> = rs.iter().map(|r| (r.elapsed_s, r.best_energy)).collect();
        let time = time_to_match(&best_so_far(&points), target).expect("reference reaches its own best");
        out.insert(inst.to_string(), (target, time));
    }
    Ok(out)
}

/// Per-instance times to match the reference targets and per-size ratio means.
pub fn runtime_ratios(rows: &[ResultRow], instances: &[InstanceRow], reference: &Reference) -> Result<MatchReport> {
    let sizes: BTreeMap<&str, Option<usize>> = instances.iter().map(|r| (r.instance.as_str(), r.size)).collect();
    let targets = match reference {
        Reference::Solver(label) => targets_from_solver(rows, label)?,
        Reference::External { label, rows: ext } => {
            if ext.is_empty() {
                return Err(HarnessError::NoReference(label.clone()));
            }
            let mut t = BTreeMap::new();
            for r in ext {
                let e = t.entry(r.instance.clone()).or_insert((r.energy, r.elapsed_s));
                if r.energy < e.0 || (r.energy == e.0 && r.elapsed_s < e.1) {
                    *e = (r.energy, r.elapsed_s);
                }
            }
            t
        }
    };
    let target_set: BTreeSet<&String> = targets.keys().collect();
    for (inst, &(_, time)) in &targets {
        if !(time > 0.0 && time.is_finite()) {
            return Err(HarnessError::InstanceMismatch(format!(
                "reference time for '{inst}' must be positive, got {time}"
            )));
        }
    }

    let mut by_solver: BTreeMap<&str, BTreeMap<&str, Vec<(f64, f64)>>> = BTreeMap::new();
    for r in rows {
        by_solver
            .entry(&r.solver)
            .or_default()
            .entry(&r.instance)
            .or_default()
            .push((r.elapsed_s, r.best_energy));
    }
    for (solver, insts) in &by_solver {
        let have: BTreeSet<&String> = targets.keys().filter(|k| insts.contains_key(k.as_str())).collect();
        let extra: Vec<&&str> = insts.keys().filter(|k| !targets.contains_key(**k)).collect();
        if have != target_set || !extra.is_empty() {
            let missing: Vec<&&String> = target_set.difference(&have).collect();
            return Err(HarnessError::InstanceMismatch(format!(
                "solver '{solver}': missing {missing:?}, unexpected {extra:?}"
            )));
        }
    }

    let size_of = |inst: &str| sizes.get(inst).copied().flatten();
    let mut report = MatchReport {
        targets: targets
            .iter()
            .map(|(inst, &(target, t))| InstanceTarget {
                instance: inst.clone(),
                size: size_of(inst),
                target,
                reference_time_s: t,
            })
            .collect(),
        ..MatchReport::default()
    };
    for (solver, insts) in &by_solver {
        for (inst, &(target, ref_time)) in &targets {
            let trace = best_so_far(&insts[inst.as_str()]);
            let ttm = time_to_match(&trace, target);
            report.matches.push(InstanceMatch {
                instance: inst.clone(),
                size: size_of(inst),
                solver: solver.to_string(),
                target,
                reference_time_s: ref_time,
                time_to_match_s: ttm,
                ratio: ttm.map(|t| t / ref_time),
            });
        }
    }

    let mut groups: BTreeMap<(Option<usize>, &str), Vec<&InstanceMatch>> = BTreeMap::new();
    for m in &report.matches {
        groups.entry((m.size, &m.solver)).or_default().push(m);
    }
    for ((size, solver), ms) in groups {
        let ratios: Vec<f64> = ms.iter().filter_map(|m| m.ratio).collect();
        let full = ratios.len() == ms.len();
        report.rows.push(ReportRow {
            size,
            solver: solver.to_string(),
            mean_ratio: if full { mean(&ratios) } else { None },
            stderr: if full { standard_error(&ratios) } else { None },
            matched_count: ratios.len(),
        });
    }
    Ok(report)
}

impl MatchReport {
    /// `size,solver,mean_ratio,stderr,matched_count`; suppressed means are empty.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
        for r in &self.rows {
            w.serialize(r).map_err(csv_err(path))?;
        }
        w.flush().map_err(io_err(path))
    }

    /// One line per (instance, solver).
    pub fn write_details_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
        for m in &self.matches {
            w.serialize(m).map_err(csv_err(path))?;
        }
        w.flush().map_err(io_err(path))
    }

    pub fn row(&self, size: Option<usize>, solver: &str) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.size == size && r.solver == solver)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(solver: &str, inst: &str, budget: u32, t: f64, e: f64) -> ResultRow {
        ResultRow {
            solver: solver.into(),
            instance: inst.into(),
            seed: 0,
            budget_key: format!("b={budget}"),
            elapsed_s: t,
            best_energy: e,
        }
    }

    fn inst(name: &str) -> InstanceRow {
        InstanceRow {
            instance: name.into(),
            n: 10,
            size: Some(4),
        }
    }

    #[test]
    fn reference_against_itself_has_unit_ratios() {
        let rows = vec![row("ref", "a", 1, 1.0, -5.0), row("ref", "a", 2, 2.0, -7.0), row("ref", "b", 1, 0.5, -3.0)];
        let r = runtime_ratios(&rows, &[inst("a"), inst("b")], &Reference::Solver("ref".into())).unwrap();
        assert!(r.matches.iter().all(|m| m.ratio == Some(1.0)));
        let agg = r.row(Some(4), "ref").unwrap();
        assert_eq!(agg.mean_ratio, Some(1.0));
        assert_eq!(agg.stderr, Some(0.0));
        assert_eq!(agg.matched_count, 2);
    }

    #[test]
    fn target_comes_from_largest_budget() {
        // The small budget happened to find a better value; the target is still
        // the largest budget's result.
        let rows = vec![row("ref", "a", 1, 1.0, -9.0), row("ref", "a", 8, 4.0, -7.0)];
        let r = runtime_ratios(&rows, &[inst("a")], &Reference::Solver("ref".into())).unwrap();
        assert_eq!(r.targets[0].target, -7.0);
        assert_eq!(r.targets[0].reference_time_s, 1.0);
    }

    #[test]
    fn paper_style_ratio() {
        let rows = vec![row("ref", "a", 1, 1.2, -10.0), row("sa", "a", 1, 77.0, -10.0)];
        let r = runtime_ratios(&rows, &[inst("a")], &Reference::Solver("ref".into())).unwrap();
        let sa = r.row(Some(4), "sa").unwrap();
        assert!((sa.mean_ratio.unwrap() - 64.1667).abs() < 1e-3);
    }

    #[test]
    fn unmatched_instance_suppresses_mean() {
        let mut rows = Vec::new();
        let mut insts = Vec::new();
        for k in 0..50 {
            let name = format!("i{k:02}");
            rows.push(row("ref", &name, 1, 1.0, -10.0));
            let e = if k == 17 { -9.0 } else { -10.0 };
            rows.push(row("sa", &name, 1, 2.0, e));
            insts.push(inst(&name));
        }
        let r = runtime_ratios(&rows, &insts, &Reference::Solver("ref".into())).unwrap();
        let sa = r.row(Some(4), "sa").unwrap();
        assert_eq!(sa.matched_count, 49);
        assert_eq!(sa.mean_ratio, None);
        assert_eq!(sa.stderr, None);
    }

    #[test]
    fn mismatched_instances_rejected() {
        let rows = vec![row("ref", "a", 1, 1.0, -1.0), row("sa", "b", 1, 1.0, -1.0)];
        let err = runtime_ratios(&rows, &[inst("a"), inst("b")], &Reference::Solver("ref".into())).unwrap_err();
        assert!(matches!(err, HarnessError::InstanceMismatch(_)));
        assert!(runtime_ratios(&rows, &[], &Reference::Solver("qa".into())).is_err());
    }

    #[test]
    fn external_reference() {
        let rows = vec![row("sa", "a", 1, 0.5, -4.0), row("sa", "a", 2, 3.0, -6.0)];
        let ext = vec![ExternalRow {
            instance: "a".into(),
            energy: -5.0,
            elapsed_s: 0.25,
        }];
        let r = runtime_ratios(&rows, &[inst("a")], &Reference::External { label: "qpu".into(), rows: ext }).unwrap();
        let m = &r.matches[0];
        assert_eq!(m.time_to_match_s, Some(1.75));
        assert_eq!(m.ratio, Some(7.0));
    }

    #[test]
    fn csv_leaves_suppressed_cells_empty() {
        let dir = tempfile::tempdir().unwrap();
        let report = MatchReport {
            rows: vec![ReportRow {
                size: Some(2),
                solver: "scd".into(),
                mean_ratio: None,
                stderr: None,
                matched_count: 3,
            }],
            ..MatchReport::default()
        };
        let p = dir.path().join("r.csv");
        report.write_csv(&p).unwrap();
        assert_eq!(
            std::fs::read_to_string(&p).unwrap(),
            "size,solver,mean_ratio,stderr,matched_count\n2,scd,,,3\n"
        );
    }
}
