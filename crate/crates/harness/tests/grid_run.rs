use std::path::{Path, PathBuf};

use isingbench_core::{generate, write_instance, Family, InstanceSpec};
use isingbench_harness::grid::Vary;
use isingbench_harness::results::{read_failures, FAILURES_FILE, RESULTS_FILE};
use isingbench_harness::{read_instances, read_results, run_grid, runtime_ratios, BenchmarkGrid, Reference, SolverSpec};
use serde_json::json;

fn instances(dir: &Path, count: u64) -> Vec<PathBuf> {
    (1..=count)
        .map(|seed| {
            let m = generate(&InstanceSpec {
                family: Family::CbfmP,
                m: 2,
                seed,
                mask: None,
            })
            .unwrap();
            let p = dir.join(format!("p2_{seed:02}.json"));
            write_instance(&m, &p).unwrap();
            p
        })
        .collect()
}

fn spec(label: &str, config: serde_json::Value, param: &str, values: Vec<serde_json::Value>) -> SolverSpec {
    SolverSpec {
        label: label.into(),
        config,
        vary: Some(Vary {
            param: param.into(),
            values,
        }),
    }
}

fn grid() -> BenchmarkGrid {
    BenchmarkGrid {
        instances: vec![],
        solvers: vec![
            spec("sa", json!({"solver": "sa", "reads": 4}), "sweeps", vec![json!(4), json!(8), json!(16), json!(32)]),
            spec("gd", json!({"solver": "glauber"}), "restarts", vec![json!(1), json!(2), json!(4), json!(8)]),
        ],
        reference: Some("sa".into()),
        repetitions: 1,
        seed: 3,
    }
}

fn strip_elapsed(path: &Path) -> String {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            format!("{},{},{},{},{}", f[0], f[1], f[2], f[3], f[5])
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn runs_resumes_and_reports() {
    let tmp = tempfile::tempdir().unwrap();
    let files = instances(tmp.path(), 3);
    let out = tmp.path().join("results");
    let g = grid();

    let first = run_grid(&g, &files, &out, 4).unwrap();
    assert_eq!(first.cells, 24);
    assert_eq!(first.executed, 24);
    assert_eq!(first.failed, 0);
    let rows = read_results(&out.join(RESULTS_FILE)).unwrap();
    assert_eq!(rows.len(), 24);

    let again = run_grid(&g, &files, &out, 4).unwrap();
    assert_eq!(again.executed, 0);
    assert_eq!(again.skipped, 24);
    assert_eq!(read_results(&out.join(RESULTS_FILE)).unwrap().len(), 24);

    let sizes = read_instances(&out.join("instances.csv")).unwrap();
    assert!(sizes.iter().all(|r| r.size == Some(2) && r.n == 40));
    let report = runtime_ratios(&rows, &sizes, &Reference::Solver("sa".into())).unwrap();
    assert_eq!(report.row(Some(2), "sa").unwrap().matched_count, 3);
}

#[test]
fn identical_grids_give_identical_files() {
    let tmp = tempfile::tempdir().unwrap();
    let files = instances(tmp.path(), 2);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    run_grid(&grid(), &files, &a, 1).unwrap();
    run_grid(&grid(), &files, &b, 3).unwrap();
    assert_eq!(strip_elapsed(&a.join(RESULTS_FILE)), strip_elapsed(&b.join(RESULTS_FILE)));
}

#[test]
fn empty_grid_gives_empty_store() {
    let tmp = tempfile::tempdir().unwrap();
    let g = BenchmarkGrid {
        instances: vec![],
        solvers: vec![],
        reference: None,
        repetitions: 1,
        seed: 0,
    };
    let s = run_grid(&g, &[], &tmp.path().join("r"), 2).unwrap();
    assert_eq!(s.cells, 0);
    assert!(read_results(&tmp.path().join("r").join(RESULTS_FILE)).unwrap().is_empty());
}

#[test]
fn failing_cells_are_recorded_not_fatal() {
    let tmp = tempfile::tempdir().unwrap();
    let files = instances(tmp.path(), 2);
    let out = tmp.path().join("r");
    let g = BenchmarkGrid {
        instances: vec![],
        solvers: vec![
            spec(
                "svmc",
                json!({"solver": "svmc", "schedule": tmp.path().join("missing.csv"), "parallel": 1}),
                "steps",
                vec![json!(10)],
            ),
            spec("scd", json!({"solver": "scd"}), "restarts", vec![json!(1)]),
        ],
        reference: None,
        repetitions: 1,
        seed: 0,
    };
    let s = run_grid(&g, &files, &out, 2).unwrap();
    assert_eq!(s.failed, 2);
    assert_eq!(read_results(&out.join(RESULTS_FILE)).unwrap().len(), 2);
    let fails = read_failures(&out.join(FAILURES_FILE)).unwrap();
    assert_eq!(fails.len(), 2);
    assert!(fails[0].error.contains("missing.csv"), "{}", fails[0].error);
}
