use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fockflux_cli::config::{Experiment, ExperimentConfig};
use fockflux_cli::error::{CliError, EXIT_CONFIG};
use fockflux_cli::run;

#[derive(Parser)]
#[command(name = "fockflux", version, about = "Classical density matrix experiments in truncated Fock space")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run acceptance suites (identity suites by default, see --suite).
    Verify(Common),
    /// Quantum vs classical flux for observables, optionally swept.
    Discrepancy(Common),
    /// Evolve a density matrix under the Liouville or master generator.
    Evolve(Common),
    /// Norm growth of the S(alpha) recoding and the paradox ladder.
    Reify(Common),
    /// Coherence decay under the time-average projection.
    Project(Common),
    /// Ensemble-averaged equilibrium flux condition.
    Iee(Common),
}

#[derive(Args)]
struct Common {
    /// Experiment configuration (JSON). Defaults are used when omitted.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory for CSV tables and manifest.json.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Seed, overriding the configuration.
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Per-mode Fock cutoff, overriding the configuration.
    #[arg(long, value_name = "N")]
    cutoff: Option<usize>,
    /// Named suite for `verify`, or `all`.
    #[arg(long, value_name = "NAME")]
    suite: Option<String>,
}

fn load(kind: Experiment, args: &Common) -> Result<(ExperimentConfig, PathBuf), CliError> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            ExperimentConfig::from_json(&text)?
        }
        None => ExperimentConfig::defaults(kind),
    };
    if cfg.experiment != kind {
        return Err(CliError::Config(format!(
            "experiment: config is for `{}` but the subcommand is `{}`",
            cfg.experiment.name(),
            kind.name()
        )));
    }
    if args.seed.is_some() {
        cfg.seed = args.seed;
    }
    if args.cutoff.is_some() {
        cfg.cutoff = args.cutoff;
    }
    if args.suite.is_some() {
        cfg.suite = args.suite.clone();
    }
    if cfg.suite.is_some() && kind != Experiment::Verify {
        return Err(CliError::Config("suite: only valid with `verify`".into()));
    }
    let out = args
        .out
        .clone()
        .or_else(|| cfg.output.clone().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("fockflux-out"));
    Ok((cfg, out))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (kind, args) = match &cli.command {
        Command::Verify(a) => (Experiment::Verify, a),
        Command::Discrepancy(a) => (Experiment::Discrepancy, a),
        Command::Evolve(a) => (Experiment::Evolve, a),
        Command::Reify(a) => (Experiment::Reify, a),
        Command::Project(a) => (Experiment::Project, a),
        Command::Iee(a) => (Experiment::Iee, a),
    };
    let result = load(kind, args).and_then(|(cfg, out)| run(&cfg, &out).map(|o| (o, out)));
    match result {
        Ok((outcome, out)) => {
            for c in &outcome.report.checks {
                let status = if c.passed { "PASS" } else { "FAIL" };
                println!("{status}  {}  value={:.6e} bound={:.6e}", c.name, c.value, c.bound);
            }
            println!("wrote {} file(s) to {}", outcome.files.len(), out.display());
            ExitCode::from(outcome.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            let code = e.exit_code();
            debug_assert!(code == EXIT_CONFIG || code == fockflux_cli::error::EXIT_NUMERICAL);
            ExitCode::from(code as u8)
        }
    }
}
