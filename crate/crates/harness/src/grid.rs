//! Benchmark grids: solver specs × budgets × instances × repetitions.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use isingbench_core::{read_instance, IsingModel};
use isingbench_solvers::SolverConfig;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{io_err, HarnessError, Result};
use crate::results::{
    read_failures, read_results, write_failures, write_instances, write_results, Appender, CellKey, FailureRow,
    InstanceRow, ResultRow, FAILURES_FILE, INSTANCES_FILE, RESULTS_FILE,
};

/// One parameter swept over a list of values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vary {
    pub param: String,
    pub values: Vec<Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverSpec {
    pub label: String,
    /// A solver configuration object, e.g. `{"solver": "sa", "reads": 100}`.
    pub config: Value,
    #[serde(default)]
    pub vary: Option<Vary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkGrid {
    /// Instance files or directories of `*.json` files, relative to the grid file.
    pub instances: Vec<PathBuf>,
    pub solvers: Vec<SolverSpec>,
    /// Label of the solver whose results define the targets.
    #[serde(default)]
    pub reference: Option<String>,
    #[serde(default = "one")]
    pub repetitions: u64,
    #[serde(default)]
    pub seed: u64,
}

fn one() -> u64 {
    1
}

/// A fully resolved cell.
#[derive(Debug, Clone)]
pub struct Cell {
    pub label: String,
    pub budget_key: String,
    pub config: SolverConfig,
    pub instance: String,
    pub repetition: u64,
    pub seed: u64,
}

impl Cell {
    pub fn key(&self) -> CellKey {
        CellKey {
            solver: self.label.clone(),
            instance: self.instance.clone(),
            seed: self.seed,
            budget_key: self.budget_key.clone(),
        }
    }
}

/// `param=value` with the value in compact JSON (strings unquoted).
pub fn budget_key(param: &str, value: &Value) -> String {
    match value {
        Value::String(s) => format!("{param}={s}"),
        v => format!("{param}={v}"),
    }
}

/// Numeric part of a budget key, for ordering budgets.
pub fn budget_value(key: &str) -> Option<f64> {
    key.split_once('=').and_then(|(_, v)| v.parse().ok())
}

/// Seed of a cell: the first eight bytes of SHA-256 over its identity.
pub fn cell_seed(grid_seed: u64, label: &str, budget_key: &str, instance: &str, repetition: u64) -> u64 {
    let digest = Sha256::digest(format!("{grid_seed}|{label}|{budget_key}|{instance}|{repetition}").as_bytes());
    u64::from_le_bytes(digest[..8].try_into().unwrap())
}

impl SolverSpec {
    /// `(budget_key, config)` for every budget of this spec.
    pub fn expand(&self) -> Result<Vec<(String, SolverConfig)>> {
        let parse = |v: Value, key: &str| {
            serde_json::from_value::<SolverConfig>(v)
                .map_err(|e| HarnessError::Grid(format!("solver '{}' ({key}): {e}", self.label)))
        };
        let base = self
            .config
            .as_object()
            .ok_or_else(|| HarnessError::Grid(format!("solver '{}': config must be an object", self.label)))?;
        match &self.vary {
            None => Ok(vec![("default".to_string(), parse(self.config.clone(), "default")?)]),
            Some(v) => {
                if v.values.is_empty() {
                    return Err(HarnessError::Grid(format!("solver '{}': vary has no values", self.label)));
                }
                v.values
                    .iter()
                    .map(|value| {
                        let key = budget_key(&v.param, value);
                        let mut obj = base.clone();
                        obj.insert(v.param.clone(), value.clone());
                        Ok((key.clone(), parse(Value::Object(obj), &key)?))
                    })
                    .collect()
            }
        }
    }
}

/// Instance name used in result files: the file stem.
pub fn instance_name(path: &Path) -> String {
    path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
}

impl BenchmarkGrid {
    pub fn load(path: &Path) -> Result<(Self, PathBuf)> {
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        let grid: Self = serde_json::from_str(&text).map_err(|e| HarnessError::Format {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        let base = path.parent().unwrap_or(Path::new(".")).to_path_buf();
        Ok((grid, base))
    }

    /// Instance files, with directories expanded to their sorted `*.json` entries.
    pub fn instance_files(&self, base: &Path) -> Result<Vec<PathBuf>> {
        let mut out = Vec::new();
        for p in &self.instances {
            let p = if p.is_absolute() { p.clone() } else { base.join(p) };
            if p.is_dir() {
                let mut files: Vec<PathBuf> = std::fs::read_dir(&p)
                    .map_err(io_err(&p))?
                    .filter_map(|e| e.ok().map(|e| e.path()))
                    .filter(|f| f.extension().is_some_and(|x| x == "json"))
                    .collect();
                files.sort();
                out.extend(files);
            } else {
                out.push(p);
            }
        }
        let names: BTreeSet<String> = out.iter().map(|p| instance_name(p)).collect();
        if names.len() != out.len() {
            return Err(HarnessError::Grid("instance file names must be unique".into()));
        }
        Ok(out)
    }

    /// Checks labels and parses every configuration before any work starts.
    pub fn validate(&self) -> Result<()> {
        let mut labels = BTreeSet::new();
        for s in &self.solvers {
            if s.label.is_empty() || s.label.contains(',') {
                return Err(HarnessError::Grid(format!("invalid solver label '{}'", s.label)));
            }
            if !labels.insert(&s.label) {
                return Err(HarnessError::Grid(format!("duplicate solver label '{}'", s.label)));
            }
            s.expand()?;
        }
        if let Some(r) = &self.reference {
            if !labels.contains(r) {
                return Err(HarnessError::Grid(format!("reference '{r}' is not one of the solver labels")));
            }
        }
        if self.repetitions == 0 {
            return Err(HarnessError::Grid("repetitions must be at least 1".into()));
        }
        Ok(())
    }

    pub fn cells(&self, instances: &[String]) -> Result<Vec<Cell>> {
        self.validate()?;
        let mut cells = Vec::new();
        for spec in &self.solvers {
            for (key, config) in spec.expand()? {
                for inst in instances {
                    for rep in 0..self.repetitions {
                        cells.push(Cell {
                            label: spec.label.clone(),
                            budget_key: key.clone(),
                            config: config.clone(),
                            instance: inst.clone(),
                            repetition: rep,
                            seed: cell_seed(self.seed, &spec.label, &key, inst, rep),
                        });
                    }
                }
            }
        }
        Ok(cells)
    }
}

/// What a grid run did.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GridSummary {
    pub cells: usize,
    pub executed: usize,
    pub skipped: usize,
    pub failed: usize,
}

/// Runs every cell not already in `out_dir`, at most `workers` at a time.
/// Rows are appended as cells finish; the files are rewritten sorted at the end.
pub fn run_grid(
    grid: &BenchmarkGrid,
    instance_files: &[PathBuf],
    out_dir: &Path,
    workers: usize,
) -> Result<GridSummary> {
    std::fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let mut models: Vec<(String, IsingModel)> = Vec::new();
    for f in instance_files {
        models.push((instance_name(f), read_instance(f)?));
    }
    let names: Vec<String> = models.iter().map(|m| m.0.clone()).collect();
    let cells = grid.cells(&names)?;

    let inst_rows: Vec<InstanceRow> = models
        .iter()
        .map(|(name, m)| InstanceRow {
            instance: name.clone(),
            n: m.n(),
            size: m.metadata().get("size").and_then(Value::as_u64).map(|s| s as usize),
        })
        .collect();
    write_instances(&out_dir.join(INSTANCES_FILE), &inst_rows)?;

    let results_path = out_dir.join(RESULTS_FILE);
    let failures_path = out_dir.join(FAILURES_FILE);
    let done: BTreeSet<CellKey> = read_results(&results_path)?.iter().map(ResultRow::key).collect();
    // Earlier failures are retried.
    let old_failures = read_failures(&failures_path)?;
    let pending: Vec<&Cell> = cells.iter().filter(|c| !done.contains(&c.key())).collect();
    let retry: BTreeSet<CellKey> = pending.iter().map(|c| c.key()).collect();
    write_failures(
        &failures_path,
        &old_failures
            .into_iter()
            .filter(|f| {
                !retry.contains(&CellKey {
                    solver: f.solver.clone(),
                    instance: f.instance.clone(),
                    seed: f.seed,
                    budget_key: f.budget_key.clone(),
                })
            })
            .collect::<Vec<_>>(),
    )?;

    let results = Mutex::new(Appender::results(&results_path)?);
    let failures = Mutex::new(Appender::failures(&failures_path)?);
    let failed = Mutex::new(0usize);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| HarnessError::Grid(format!("cannot start worker pool: {e}")))?;

    let run_cell = |cell: &Cell| -> Result<()> {
        let model = &models.iter().find(|m| m.0 == cell.instance).expect("known instance").1;
        match cell.config.run(model, cell.seed) {
            Ok(trace) => {
                let row = ResultRow {
                    solver: cell.label.clone(),
                    instance: cell.instance.clone(),
                    seed: cell.seed,
                    budget_key: cell.budget_key.clone(),
                    elapsed_s: trace.elapsed_s,
                    best_energy: trace.best_energy,
                };
                results.lock().unwrap().append(&row)
            }
            Err(e) => {
                log::warn!("{} on {} ({}) failed: {e}", cell.label, cell.instance, cell.budget_key);
                *failed.lock().unwrap() += 1;
                failures.lock().unwrap().append(&FailureRow {
                    solver: cell.label.clone(),
                    instance: cell.instance.clone(),
                    seed: cell.seed,
                    budget_key: cell.budget_key.clone(),
                    error: e.to_string(),
                })
            }
        }
    };
    pool.install(|| pending.par_iter().try_for_each(|c| run_cell(c)))?;
    drop(results);
    drop(failures);

    write_results(&results_path, &read_results(&results_path)?)?;
    let mut fails = read_failures(&failures_path)?;
    fails.sort_by(|a, b| (&a.solver, &a.instance, a.seed, &a.budget_key).cmp(&(&b.solver, &b.instance, b.seed, &b.budget_key)));
    write_failures(&failures_path, &fails)?;

    let failed = failed.into_inner().unwrap();
    Ok(GridSummary {
        cells: cells.len(),
        executed: pending.len(),
        skipped: cells.len() - pending.len(),
        failed,
    })
}
