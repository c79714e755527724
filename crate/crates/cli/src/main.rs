use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use seqrisk_cli::output::write_outputs;
use seqrisk_cli::plot::emit_plot_file;
use seqrisk_cli::{execute, CliError, ExperimentConfig, EXIT_PROPERTY_FAILED};

#[derive(Parser)]
#[command(name = "seqrisk", version, about = "Risk bounds and scenario planners for dependent sequences")]
struct Cli {
    #[command(subcommand)]
    action: Action,
}

#[derive(Subcommand)]
enum Action {
    /// Run a JSON experiment config and write its output directory.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, env = "SEQRISK_OUT_DIR", default_value = "seqrisk-out")]
        out: PathBuf,
        /// Overrides the replication count of a validate run.
        #[arg(long)]
        replications: Option<usize>,
        /// Worker threads for replication fan-out (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Turn a records CSV into a sorted plot-ready CSV.
    Plot {
        #[arg(long)]
        records: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(
    config: PathBuf,
    seed: Option<u64>,
    out: PathBuf,
    replications: Option<usize>,
    threads: Option<usize>,
) -> Result<ExitCode, CliError> {
    if let Some(t) = threads {
        if t == 0 {
            return Err(CliError::Config("--threads must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    let text = std::fs::read_to_string(&config).map_err(|e| CliError::io(&config, e))?;
    let config = ExperimentConfig::from_json(&text)?.resolve(seed, replications)?;
    let outcome = execute(&config)?;
    write_outputs(&out, &config, &outcome)?;
    if outcome.property_holds == Some(false) {
        eprintln!("acceptance property failed; see {}", out.display());
        return Ok(ExitCode::from(EXIT_PROPERTY_FAILED));
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.action {
        Action::Run { config, seed, out, replications, threads } => run(config, seed, out, replications, threads),
        Action::Plot { records, out } => emit_plot_file(&records, &out).map(|_| ExitCode::SUCCESS),
    };
    result.unwrap_or_else(|e| {
        eprintln!("seqrisk: {e}");
        ExitCode::from(e.exit_code())
    })
}
