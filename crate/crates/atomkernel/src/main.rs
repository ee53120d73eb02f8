use std::path::PathBuf;
use std::process::ExitCode;

use atomkernel::run::{run, seed_from_env, Command, RunOptions, EXIT_INVALID};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "atomkernel", version, about = "Sparse recovery experiments in kernel spaces")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build and validate dual certificates of the true supports.
    Certify(RunArgs),
    /// Measure, recover and compare with the truth.
    Recover(RunArgs),
    /// Estimate C(λ, δ) and check the concentration bound.
    Stability(RunArgs),
    /// Run the config's own pipeline over its sweep.
    Sweep(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scenario config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Scenarios run in parallel.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Exit with status 3 when a scenario check fails.
    #[arg(long)]
    assert: bool,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        Cmd::Certify(a) => (Command::Certify, a),
        Cmd::Recover(a) => (Command::Recover, a),
        Cmd::Stability(a) => (Command::Stability, a),
        Cmd::Sweep(a) => (Command::Sweep, a),
    };
    let seed_override = match seed_from_env() {
        Ok(s) => s,
        Err(e) => {
            eprintln!("atomkernel: {e}");
            return ExitCode::from(EXIT_INVALID as u8);
        }
    };
    let opts = RunOptions {
        jobs: args.jobs.max(1),
        assert: args.assert,
        out: args.out,
        seed_override,
    };
    match run(command, &args.config, &opts) {
        Ok(summary) => {
            for o in &summary.outcomes {
                let r = &o.row;
                match &o.error {
                    Some(e) => eprintln!("[{}] {}: {e}", r.scenario, r.name),
                    None => eprintln!("[{}] {}: {}", r.scenario, r.name, if o.passed() { "pass" } else { "FAIL" }),
                }
            }
            eprintln!("wrote {}", summary.out_dir.display());
            ExitCode::from(summary.exit_code as u8)
        }
        Err(e) => {
            eprintln!("atomkernel: {e}");
            ExitCode::from(EXIT_INVALID as u8)
        }
    }
}
