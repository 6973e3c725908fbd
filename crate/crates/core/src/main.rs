use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cvmbqc::runner::{format_g, run, write_outputs, ConfigFile, ExperimentKind, OutputFormat, RunnerError};

#[derive(Parser, Debug)]
#[command(name = "cvmbqc", version, about = "Gaussian cluster-state gate experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML file with one table per experiment kind.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Directory for result files.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Seed for sampled photocurrents; overrides the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Squeezing spectrum of the laser output.
    Spectrum,
    /// Inseparability of generated clusters.
    ClusterCheck,
    /// Criterion for pulses entangled across a delay.
    DelayedCheck,
    /// One measurement step.
    Gate,
    /// Two steps realizing a target gate.
    Compose,
    /// CZ gate from two parallel single-mode gates.
    Cz,
    /// Parallel lanes through one measurement loop.
    Pipeline,
}

impl Command {
    fn kind(self) -> ExperimentKind {
        match self {
            Self::Spectrum => ExperimentKind::Spectrum,
            Self::ClusterCheck => ExperimentKind::ClusterCheck,
            Self::DelayedCheck => ExperimentKind::DelayedCheck,
            Self::Gate => ExperimentKind::Gate,
            Self::Compose => ExperimentKind::Compose,
            Self::Cz => ExperimentKind::Cz,
            Self::Pipeline => ExperimentKind::Pipeline,
        }
    }
}

fn execute(cli: &Cli) -> Result<bool, RunnerError> {
    let config = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let record = run(cli.command.kind(), &config, cli.seed)?;
    for path in write_outputs(&record, &cli.out, cli.format)? {
        log::info!("wrote {}", path.display());
    }
    for v in &record.verdicts {
        println!(
            "{} {}: {} (threshold {} = {})",
            if v.passed { "PASS" } else { "FAIL" },
            v.name,
            format_g(v.value, 12),
            v.threshold_name,
            format_g(v.threshold, 12)
        );
    }
    Ok(record.passed())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
