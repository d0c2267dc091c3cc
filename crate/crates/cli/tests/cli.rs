use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_isingbench"));
    c.env_remove("ISINGBENCH_OUT").env_remove("RUST_LOG");
    c
}

fn ok(out: &Output) {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

fn generate(dir: &Path) -> std::path::PathBuf {
    let out = bin()
        .args(["generate", "--family", "cbfm-p", "--size", "2", "--seeds", "1", "--out"])
        .arg(dir)
        .output()
        .unwrap();
    ok(&out);
    dir.join("cbfm-p_m2_s1.json")
}

#[test]
fn generate_writes_one_instance_of_forty_sites() {
    let dir = tempfile::tempdir().unwrap();
    let path = generate(dir.path());
    let files: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(files.len(), 1);
    let model = isingbench_core::read_instance(&path).unwrap();
    assert_eq!(model.n(), 40);
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .env("ISINGBENCH_OUT", dir.path())
        .args(["generate", "--family", "cbfm", "--size", "2", "--seeds", "3,5"])
        .output()
        .unwrap();
    ok(&out);
    assert!(dir.path().join("cbfm_m2_s3.json").exists());
    assert!(dir.path().join("cbfm_m2_s5.json").exists());
}

#[test]
fn help_exits_zero() {
    let out = bin().arg("--help").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("benchmark"));
}

#[test]
fn unknown_solver_is_a_usage_error_listing_solvers() {
    let out = bin().args(["solve", "--solver", "qpu", "--instance", "x.json"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    for name in ["scd", "glauber", "tabu", "sa", "svmc", "pt-icm", "min-sum"] {
        assert!(err.contains(name), "{err}");
    }
}

#[test]
fn flag_for_another_solver_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let inst = generate(dir.path());
    let out = bin().args(["solve", "--solver", "glauber", "--rounds", "3", "--instance"]).arg(&inst).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn runtime_failure_exits_two() {
    let out = bin().args(["solve", "--solver", "sa", "--instance", "/nonexistent/x.json"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

fn solve(dir: &Path, inst: &Path, name: &str, extra: &[&str]) -> String {
    let trace = dir.join(name);
    let out = bin()
        .arg("solve")
        .args(extra)
        .arg("--instance")
        .arg(inst)
        .arg("--out")
        .arg(&trace)
        .output()
        .unwrap();
    ok(&out);
    std::fs::read_to_string(trace).unwrap()
}

/// Trace rows without the elapsed column.
fn energies(trace: &str) -> Vec<String> {
    trace
        .lines()
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            format!("{},{},{},{}", f[0], f[2], f[3], f[f.len() - 1])
        })
        .collect()
}

#[test]
fn same_arguments_give_same_trace() {
    let dir = tempfile::tempdir().unwrap();
    let inst = generate(dir.path());
    let args = ["--seed", "7", "--solver", "tabu", "--reads", "5", "--read-timeout", "100"];
    let a = solve(dir.path(), &inst, "a.csv", &args);
    let a2 = solve(dir.path(), &inst, "a2.csv", &args);
    assert_eq!(energies(&a), energies(&a2));
    assert!(a.starts_with("solver,instance,seed,param_key,elapsed_s,best_energy"));
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let inst = generate(dir.path());
    let cfg = dir.path().join("bench.toml");
    std::fs::write(&cfg, "seed = 3\n\n[solve]\nsolver = \"sa\"\nreads = 2\nsweeps = 50\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let from_file = solve(dir.path(), &inst, "f.csv", &["--config", cfg]);
    let row = from_file.lines().nth(1).unwrap();
    assert!(row.starts_with("sa,cbfm-p_m2_s1,3,reads=2;sweeps=50,"), "{row}");
    let overridden = solve(dir.path(), &inst, "o.csv", &["--config", cfg, "--seed", "4"]);
    let row = overridden.lines().nth(1).unwrap();
    assert!(row.starts_with("sa,cbfm-p_m2_s1,4,reads=2;sweeps=50,"), "{row}");
    let out = bin()
        .args(["--config", cfg, "solve", "--sweeps", "9", "--instance"])
        .arg(&inst)
        .arg("--out")
        .arg(dir.path().join("s.csv"))
        .output()
        .unwrap();
    ok(&out);
    let row = std::fs::read_to_string(dir.path().join("s.csv")).unwrap();
    assert!(row.lines().nth(1).unwrap().contains("sweeps=9"), "{row}");
}

#[test]
fn oracle_and_export() {
    let dir = tempfile::tempdir().unwrap();
    let model = isingbench_core::IsingModel::new(3, vec![(0, 1.0)], vec![(0, 1, -1.0), (1, 2, -1.0)]).unwrap();
    let inst = dir.path().join("tiny.json");
    isingbench_core::write_instance(&model, &inst).unwrap();
    let out = bin().args(["oracle", "--instance"]).arg(&inst).output().unwrap();
    ok(&out);
    assert!(String::from_utf8_lossy(&out.stdout).contains("energy -3"));
    for fmt in ["iqp", "ilp"] {
        let lp = dir.path().join(format!("tiny.{fmt}.lp"));
        let out = bin().args(["export", "--format", fmt, "--instance"]).arg(&inst).arg("--out").arg(&lp).output().unwrap();
        ok(&out);
        assert!(std::fs::read_to_string(&lp).unwrap().contains("Minimize"));
    }
}

#[test]
fn benchmark_and_report_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    generate(&dir.path().join("inst"));
    let grid = dir.path().join("grid.json");
    std::fs::write(
        &grid,
        r#"{"instances": ["inst"], "solvers": [
            {"label": "sa", "config": {"solver": "sa", "reads": 2}, "vary": {"param": "sweeps", "values": [10, 100]}},
            {"label": "gd", "config": {"solver": "glauber", "restarts": 3}}]}"#,
    )
    .unwrap();
    let res = dir.path().join("res");
    ok(&bin().arg("benchmark").arg("--grid").arg(&grid).arg("--out").arg(&res).output().unwrap());
    let report = dir.path().join("report.csv");
    let out = bin()
        .arg("report")
        .arg("--results")
        .arg(&res)
        .args(["--reference", "sa", "--out"])
        .arg(&report)
        .output()
        .unwrap();
    ok(&out);
    let text = std::fs::read_to_string(&report).unwrap();
    assert!(text.starts_with("size,solver,mean_ratio,stderr,matched_count"));
    assert!(text.contains("2,sa,1.0,0.0,1"), "{text}");
    let missing = bin().arg("report").arg("--results").arg(&res).args(["--reference", "pt-icm", "--out"]).arg(&report).output().unwrap();
    assert_eq!(missing.status.code(), Some(2));
}
