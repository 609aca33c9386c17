use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use etpass_cli::{exit_code, run, Command, Options};

#[derive(Parser)]
#[command(name = "etpass", version, about = "Certify and simulate event-triggered networked interconnections")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate the closed-form certificates
    Certify(Args),
    /// Simulate the closed loop, write trace.csv and run checks
    Simulate(Args),
    /// Simulate once per trigger level in sweep.deltas
    Sweep(Args),
    /// List the built-in models
    ListModels(Args),
}

#[derive(clap::Args)]
struct Args {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (default: output.dir from the config, else ".")
    #[arg(long)]
    out: Option<PathBuf>,
    /// Noise seed; w1 uses it, w2 uses seed + 1
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for sweeps and the oracle (0 = all cores)
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Tolerance for integral checks
    #[arg(long)]
    tol: Option<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (cmd, args) = match cli.command {
        Cmd::Certify(a) => (Command::Certify, a),
        Cmd::Simulate(a) => (Command::Simulate, a),
        Cmd::Sweep(a) => (Command::Sweep, a),
        Cmd::ListModels(a) => (Command::ListModels, a),
    };
    let opts = Options { config: args.config, out: args.out, seed: args.seed, jobs: args.jobs, tol: args.tol };
    let result = run(cmd, &opts);
    match &result {
        Ok(outcome) => print!("{}", outcome.text),
        Err(e) => eprintln!("error: {e:#}"),
    }
    ExitCode::from(exit_code(&result) as u8)
}
