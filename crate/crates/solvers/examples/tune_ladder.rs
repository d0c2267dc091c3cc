//! Tunes the PT-ICM ladder on one CBFM-P instance and prints it.
//!
//! `cargo run --release -p isingbench-solvers --example tune_ladder -- [size] [iterations] [rounds]`

use isingbench_core::{generate, Family, InstanceSpec};
use isingbench_solvers::betas::tune_ladder;
use isingbench_solvers::{pt_icm_with_diagnostics, BetaLadder, PtIcmParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let args: Vec<String> = std::env::args().skip(1).collect();
    let arg = |k: usize, d: u64| args.get(k).map(|s| s.parse()).transpose().map(|v| v.unwrap_or(d));
    let size = arg(0, 16)? as usize;
    let iterations = arg(1, 8)? as usize;
    let rounds = arg(2, 200)?;

    let model = generate(&InstanceSpec {
        family: Family::CbfmP,
        m: size,
        seed: 0,
        mask: None,
    })?;
    let betas = tune_ladder(&model, iterations, rounds, 1)?;

    let check = PtIcmParams {
        betas: BetaLadder::Custom(betas.clone()),
        rounds,
        ..PtIcmParams::default()
    };
    let (_, diag) = pt_icm_with_diagnostics(&model, &check, 99)?;
    eprintln!("median swap rate {:.3}", diag.median_swap_rate());
    eprintln!("rates {:.2?}", diag.swap_rates());

    for row in betas.chunks(8) {
        let cells: Vec<String> = row.iter().map(|b| format!("{b:.8}")).collect();
        println!("    {},", cells.join(", "));
    }
    Ok(())
}
