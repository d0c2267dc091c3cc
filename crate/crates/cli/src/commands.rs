use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use isingbench_core::lp::{export_ilp, export_iqp};
use isingbench_core::{brute_force, generate, pegasus, read_instance, to_qubo, write_instance, InstanceSpec, Mask};
use isingbench_harness::results::{INSTANCES_FILE, RESULTS_FILE};
use isingbench_harness::{read_external, read_instances, read_results, run_grid, runtime_ratios, splice, BenchmarkGrid, Reference};
use isingbench_solvers::{SolveTrace, SolverConfig};
use serde_json::{json, Value};

use crate::args::{BenchmarkArgs, ExportArgs, ExportFormat, GenerateArgs, OracleArgs, ReportArgs, SolveArgs, SolverFlags};

pub const OUT_ENV: &str = "ISINGBENCH_OUT";

/// Bad flag values found after parsing; reported like parse errors.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

pub fn default_out(out: Option<PathBuf>) -> PathBuf {
    out.or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

/// `7`, `1..50` (inclusive) or `1,4,9`.
pub fn parse_seeds(text: &str) -> Result<Vec<u64>> {
    let bad = || usage(format!("invalid seed list '{text}': expected N, A..B or a comma-separated list"));
    if let Some((a, b)) = text.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|_| bad())?;
        let b: u64 = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
        if b < a {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    text.split(',').map(|s| s.trim().parse().map_err(|_| bad())).collect()
}

pub fn generate_cmd(args: GenerateArgs, seed: Option<u64>) -> Result<()> {
    let seeds = match &args.seeds {
        Some(s) => parse_seeds(s)?,
        None => vec![seed.unwrap_or(0)],
    };
    if args.size < 2 {
        return Err(usage(format!("--size must be at least 2, got {}", args.size)));
    }
    let mask: Option<Mask> = match &args.mask {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("cannot read {}", p.display()))?;
            Some(serde_json::from_str(&text).with_context(|| format!("invalid mask {}", p.display()))?)
        }
        None => None,
    };
    let out = default_out(args.out);
    std::fs::create_dir_all(&out).with_context(|| format!("cannot create {}", out.display()))?;
    let family = args.family.into();
    for s in seeds {
        let spec = InstanceSpec {
            family,
            m: args.size,
            seed: s,
            mask: mask.clone(),
        };
        let model = generate(&spec)?;
        let path = out.join(format!("{}_m{}_s{}.json", family.name(), args.size, s));
        write_instance(&model, &path)?;
        println!("{} ({} sites, {} couplers)", path.display(), model.n(), model.num_edges());
    }
    if let Some(adj) = &args.adjacency {
        let mut topo = pegasus(args.size)?;
        if let Some(m) = &mask {
            topo = topo.apply_mask(&m.dead_nodes, &m.dead_edges)?;
        }
        topo.save_adjacency_csv(adj)?;
    }
    Ok(())
}

/// Which solvers accept each flag, and the configuration key it sets.
fn flag_targets(flags: &SolverFlags) -> Result<Vec<(&'static str, &'static [&'static str], &'static str, Value)>> {
    let mut v: Vec<(&'static str, &'static [&'static str], &'static str, Value)> = Vec::new();
    const ALL: &[&str] = &["scd", "glauber", "tabu", "sa", "svmc", "pt-icm", "min-sum"];
    if let Some(t) = flags.time_limit {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(usage(format!("--time-limit must be a non-negative number, got {t}")));
        }
        v.push(("--time-limit", ALL, "time_limit_s", json!(t)));
    }
    if let Some(x) = flags.restarts {
        v.push(("--restarts", &["scd", "glauber", "svmc", "pt-icm"], "restarts", json!(x)));
    }
    if let Some(x) = flags.reads {
        v.push(("--reads", &["tabu", "sa"], "reads", json!(x)));
    }
    if let Some(x) = flags.sweeps {
        v.push(("--sweeps", &["sa"], "sweeps", json!(x)));
    }
    if let Some(s) = &flags.beta_range {
        let parts: Vec<f64> = s
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| usage(format!("--beta-range expects HOT,COLD, got '{s}'")))?;
        if parts.len() != 2 {
            return Err(usage(format!("--beta-range expects HOT,COLD, got '{s}'")));
        }
        v.push(("--beta-range", &["sa"], "beta_range", json!(parts)));
    }
    if let Some(x) = flags.tenure {
        v.push(("--tenure", &["tabu"], "tenure", json!(x)));
    }
    if let Some(x) = flags.read_timeout {
        v.push(("--read-timeout", &["tabu"], "read_timeout_s", json!(x)));
    }
    if let Some(x) = flags.stall_limit {
        v.push(("--stall-limit", &["tabu"], "stall_limit", json!(x)));
    }
    if let Some(x) = &flags.schedule {
        v.push(("--schedule", &["svmc"], "schedule", json!(x)));
    }
    if let Some(x) = flags.steps {
        v.push(("--steps", &["svmc"], "steps", json!(x)));
    }
    if let Some(x) = flags.sweeps_per_step {
        v.push(("--sweeps-per-step", &["svmc"], "sweeps_per_step", json!(x)));
    }
    if let Some(x) = flags.beta {
        v.push(("--beta", &["svmc"], "beta", json!(x)));
    }
    if let Some(x) = &flags.betas {
        v.push(("--betas", &["pt-icm"], "betas", serde_json::to_value(x)?));
    }
    if let Some(x) = flags.rounds {
        v.push(("--rounds", &["pt-icm"], "rounds", json!(x)));
    }
    if flags.check_invariants {
        v.push(("--check-invariants", &["pt-icm"], "check_invariants", json!(true)));
    }
    if let Some(x) = flags.parallel {
        v.push(("--parallel", &["svmc", "pt-icm"], "parallel", json!(x)));
    }
    if let Some(x) = flags.max_iterations {
        v.push(("--max-iterations", &["min-sum"], "max_iterations", json!(x)));
    }
    if let Some(x) = flags.tolerance {
        v.push(("--tolerance", &["min-sum"], "tolerance", json!(x)));
    }
    Ok(v)
}

/// Default configuration for `solver` with the given flags applied.
pub fn build_config(solver: &str, flags: &SolverFlags) -> Result<SolverConfig> {
    let base = SolverConfig::from_name(solver).ok_or_else(|| usage(format!("unknown solver '{solver}'")))?;
    let mut obj = match serde_json::to_value(&base)? {
        Value::Object(o) => o,
        _ => unreachable!("configs serialize to objects"),
    };
    let targets = flag_targets(flags)?;
    for (flag, solvers, key, value) in &targets {
        if !solvers.contains(&solver) {
            return Err(usage(format!("{flag} does not apply to solver {solver} (accepted by: {})", solvers.join(", "))));
        }
        obj.insert(key.to_string(), value.clone());
    }
    // A time limit alone means "restart until time runs out".
    if matches!(solver, "scd" | "glauber") && flags.time_limit.is_some() && flags.restarts.is_none() {
        obj.remove("restarts");
    }
    let config: SolverConfig = serde_json::from_value(Value::Object(obj)).map_err(|e| usage(e.to_string()))?;
    if let SolverConfig::PtIcm(p) = &config {
        p.params.betas.values().map_err(|e| usage(e.to_string()))?;
    }
    Ok(config)
}

/// `key=value` pairs of the parameters, sorted by key and joined with `;`.
pub fn param_key(params: &Value) -> String {
    let Some(obj) = params.as_object() else {
        return "default".into();
    };
    let parts: Vec<String> = obj
        .iter()
        .filter(|(_, v)| !v.is_null())
        .map(|(k, v)| match v {
            Value::String(s) => format!("{k}={s}"),
            v => format!("{k}={v}"),
        })
        .collect();
    if parts.is_empty() {
        "default".into()
    } else {
        parts.join(";")
    }
}

pub fn write_trace(path: &Path, trace: &SolveTrace, instance: &str) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("cannot write {}", path.display()))?;
    w.write_record(["solver", "instance", "seed", "param_key", "elapsed_s", "best_energy"])?;
    let key = param_key(&trace.params);
    for e in &trace.events {
        w.write_record([
            trace.solver.as_str(),
            instance,
            &trace.seed.to_string(),
            &key,
            &e.elapsed_s.to_string(),
            &e.energy.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn stem(path: &Path) -> String {
    path.file_stem().map_or_else(|| "instance".into(), |s| s.to_string_lossy().into_owned())
}

pub fn solve_cmd(args: SolveArgs, seed: Option<u64>) -> Result<()> {
    let solver = args.solver.name();
    let config = build_config(solver, &args.params)?;
    let model = read_instance(&args.instance)?;
    let seed = seed.unwrap_or(0);
    let trace = config.run(&model, seed)?;
    let name = stem(&args.instance);
    let out = match args.out {
        Some(p) => p,
        None => {
            let dir = default_out(None);
            std::fs::create_dir_all(&dir).with_context(|| format!("cannot create {}", dir.display()))?;
            dir.join(format!("{name}_{solver}_trace.csv"))
        }
    };
    write_trace(&out, &trace, &name)?;
    if let Some(p) = &args.solution {
        let doc = json!({
            "instance": name,
            "solver": solver,
            "seed": seed,
            "energy": trace.best_energy,
            "spins": trace.best.as_slice(),
        });
        std::fs::write(p, serde_json::to_string_pretty(&doc)? + "\n")
            .with_context(|| format!("cannot write {}", p.display()))?;
    }
    println!("{solver} on {name}: best energy {} after {:.3} s", trace.best_energy, trace.elapsed_s);
    Ok(())
}

pub fn oracle_cmd(args: OracleArgs) -> Result<()> {
    let model = read_instance(&args.instance)?;
    let r = brute_force(&model)?;
    let spins: String = r.config.as_slice().iter().map(|&s| if s > 0 { '+' } else { '-' }).collect();
    println!("energy {}\nminimisers {}\nconfiguration {spins}", r.energy, r.count);
    if let Some(p) = &args.out {
        let doc = json!({ "energy": r.energy, "count": r.count, "spins": r.config.as_slice() });
        std::fs::write(p, serde_json::to_string_pretty(&doc)? + "\n")
            .with_context(|| format!("cannot write {}", p.display()))?;
    }
    Ok(())
}

pub fn export_cmd(args: ExportArgs) -> Result<()> {
    let model = read_instance(&args.instance)?;
    let qubo = to_qubo(&model);
    match args.format {
        ExportFormat::Iqp => export_iqp(&qubo, &args.out)?,
        ExportFormat::Ilp => export_ilp(&qubo, &args.out)?,
    }
    Ok(())
}

pub fn benchmark_cmd(args: BenchmarkArgs, seed: Option<u64>) -> Result<()> {
    let (mut grid, base) = BenchmarkGrid::load(&args.grid)?;
    if let Some(s) = seed {
        grid.seed = s;
    }
    grid.validate().map_err(|e| usage(e.to_string()))?;
    if args.workers == 0 {
        return Err(usage("--workers must be at least 1"));
    }
    let files = grid.instance_files(&base)?;
    let out = default_out(args.out);
    let summary = run_grid(&grid, &files, &out, args.workers)?;
    println!(
        "{} cells: {} run, {} already done, {} failed; results in {}",
        summary.cells,
        summary.executed,
        summary.skipped,
        summary.failed,
        out.join(RESULTS_FILE).display()
    );
    Ok(())
}

pub fn report_cmd(args: ReportArgs) -> Result<()> {
    let results_path = args.results.join(RESULTS_FILE);
    if !results_path.exists() {
        bail!("no {} in {}", RESULTS_FILE, args.results.display());
    }
    let mut rows = read_results(&results_path)?;
    let instances = read_instances(&args.results.join(INSTANCES_FILE))?;
    let mut labels: BTreeSet<String> = rows.iter().map(|r| r.solver.clone()).collect();
    for s in &args.splice {
        let (label, file) = s
            .split_once('=')
            .ok_or_else(|| usage(format!("--splice expects LABEL=FILE, got '{s}'")))?;
        if !labels.insert(label.to_string()) {
            return Err(usage(format!("--splice label '{label}' is already used")));
        }
        rows.extend(splice(label, &read_external(Path::new(file))?));
    }
    let reference = match (&args.reference, &args.reference_file) {
        (Some(label), None) => {
            if !labels.contains(label) {
                bail!(
                    "reference '{label}' has no results (solvers: {})",
                    labels.iter().cloned().collect::<Vec<_>>().join(", ")
                );
            }
            Reference::Solver(label.clone())
        }
        (None, Some(file)) => Reference::External {
            label: stem(file),
            rows: read_external(file)?,
        },
        _ => return Err(anyhow!(UsageError("give exactly one of --reference and --reference-file".into()))),
    };
    let report = runtime_ratios(&rows, &instances, &reference)?;
    report.write_csv(&args.out)?;
    if let Some(d) = &args.details {
        report.write_details_csv(d)?;
    }
    println!("{:>6}  {:<12} {:>12} {:>10} {:>8}", "size", "solver", "mean_ratio", "stderr", "matched");
    for r in &report.rows {
        let f = |x: Option<f64>| x.map_or_else(|| "-".to_string(), |v| format!("{v:.4}"));
        println!(
            "{:>6}  {:<12} {:>12} {:>10} {:>8}",
            r.size.map_or_else(|| "-".to_string(), |s| s.to_string()),
            r.solver,
            f(r.mean_ratio),
            f(r.stderr),
            r.matched_count
        );
    }
    Ok(())
}
