mod args;
mod commands;
mod config_file;

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
use commands::UsageError;

fn run(cli: Cli) -> anyhow::Result<()> {
    let seed = cli.seed;
    match cli.command {
        Command::Generate(a) => commands::generate_cmd(a, seed),
        Command::Solve(a) => commands::solve_cmd(a, seed),
        Command::Oracle(a) => commands::oracle_cmd(a),
        Command::Export(a) => commands::export_cmd(a),
        Command::Benchmark(a) => commands::benchmark_cmd(a, seed),
        Command::Report(a) => commands::report_cmd(a),
    }
}

fn main() -> ExitCode {
    let mut argv: Vec<OsString> = std::env::args_os().collect();
    if let Some(path) = config_file::find_config(&argv) {
        match config_file::apply(argv, &PathBuf::from(path)) {
            Ok(a) => argv = a,
            Err(e) => {
                eprintln!("error: {e:#}");
                return ExitCode::from(1);
            }
        }
    }
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand {
                        ExitCode::from(1)
                    } else {
                        ExitCode::SUCCESS
                    }
                }
                _ => ExitCode::from(1),
            };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<UsageError>() => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
