//! On-disk result store: `results.csv`, `failures.csv` and `instances.csv`
//! inside a results directory.

use std::collections::BTreeSet;
use std::fs::{File, OpenOptions};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{csv_err, io_err, HarnessError, Result};

pub const RESULTS_FILE: &str = "results.csv";
pub const FAILURES_FILE: &str = "failures.csv";
pub const INSTANCES_FILE: &str = "instances.csv";

/// One completed grid cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub solver: String,
    pub instance: String,
    pub seed: u64,
    pub budget_key: String,
    pub elapsed_s: f64,
    pub best_energy: f64,
}

impl ResultRow {
    pub fn key(&self) -> CellKey {
        CellKey {
            solver: self.solver.clone(),
            instance: self.instance.clone(),
            seed: self.seed,
            budget_key: self.budget_key.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellKey {
    pub solver: String,
    pub instance: String,
    pub seed: u64,
    pub budget_key: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureRow {
    pub solver: String,
    pub instance: String,
    pub seed: u64,
    pub budget_key: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceRow {
    pub instance: String,
    pub n: usize,
    pub size: Option<usize>,
}

fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    let mut rdr = csv::Reader::from_path(path).map_err(csv_err(path))?;
    rdr.deserialize().collect::<Result<Vec<T>, _>>().map_err(csv_err(path))
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T], header: &[&str]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(path)
        .map_err(csv_err(path))?;
    w.write_record(header).map_err(csv_err(path))?;
    for r in rows {
        w.serialize(r).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

pub const RESULT_HEADER: [&str; 6] = ["solver", "instance", "seed", "budget_key", "elapsed_s", "best_energy"];
const FAILURE_HEADER: [&str; 5] = ["solver", "instance", "seed", "budget_key", "error"];
const INSTANCE_HEADER: [&str; 3] = ["instance", "n", "size"];

pub fn read_results(path: &Path) -> Result<Vec<ResultRow>> {
    read_csv(path)
}

/// Sorted by key, so files are independent of completion order.
pub fn write_results(path: &Path, rows: &[ResultRow]) -> Result<()> {
    let mut rows = rows.to_vec();
    rows.sort_by(|a, b| a.key().cmp(&b.key()));
    write_csv(path, &rows, &RESULT_HEADER)
}

pub fn read_instances(path: &Path) -> Result<Vec<InstanceRow>> {
    read_csv(path)
}

pub fn write_instances(path: &Path, rows: &[InstanceRow]) -> Result<()> {
    write_csv(path, rows, &INSTANCE_HEADER)
}

/// Appends rows as cells finish; the header is written for new files.
pub struct Appender {
    path: PathBuf,
    writer: csv::Writer<File>,
}

impl Appender {
    fn open(path: &Path, header: &[&str]) -> Result<Self> {
        let fresh = !path.exists() || std::fs::metadata(path).map_err(io_err(path))?.len() == 0;
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(io_err(path))?;
        let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(file);
        if fresh {
            writer.write_record(header).map_err(csv_err(path))?;
            writer.flush().map_err(io_err(path))?;
        }
        Ok(Self {
            path: path.to_path_buf(),
            writer,
        })
    }

    pub fn results(path: &Path) -> Result<Self> {
        Self::open(path, &RESULT_HEADER)
    }

    pub fn failures(path: &Path) -> Result<Self> {
        Self::open(path, &FAILURE_HEADER)
    }

    pub fn append<T: Serialize>(&mut self, row: &T) -> Result<()> {
        self.writer.serialize(row).map_err(csv_err(&self.path))?;
        self.writer.flush().map_err(io_err(&self.path))
    }
}

pub fn read_failures(path: &Path) -> Result<Vec<FailureRow>> {
    read_csv(path)
}

pub fn write_failures(path: &Path, rows: &[FailureRow]) -> Result<()> {
    write_csv(path, rows, &FAILURE_HEADER)
}

/// Keys of completed cells in an existing store.
pub fn completed_keys(dir: &Path) -> Result<BTreeSet<CellKey>> {
    Ok(read_results(&dir.join(RESULTS_FILE))?.iter().map(ResultRow::key).collect())
}

/// Externally obtained results, e.g. from a commercial solver: CSV with
/// `instance,energy,elapsed_s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExternalRow {
    pub instance: String,
    pub energy: f64,
    pub elapsed_s: f64,
}

pub fn read_external(path: &Path) -> Result<Vec<ExternalRow>> {
    if !path.exists() {
        return Err(HarnessError::Io {
            path: path.to_path_buf(),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "file not found"),
        });
    }
    read_csv(path)
}

/// Turns external rows into result rows under `label`.
pub fn splice(label: &str, rows: &[ExternalRow]) -> Vec<ResultRow> {
    rows.iter()
        .map(|r| ResultRow {
            solver: label.to_string(),
            instance: r.instance.clone(),
            seed: 0,
            budget_key: "external".into(),
            elapsed_s: r.elapsed_s,
            best_energy: r.energy,
        })
        .collect()
}
