use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use qwnlab_cli::{emit, run, CliError, Experiment, ExperimentConfig, Format, RunOptions};
use qwnlab_core::evolution::Convention;

#[derive(Debug, Parser)]
#[command(
    name = "qwnlab",
    version,
    about = "Quadratic quantum white noise experiments"
)]
struct Args {
    experiment: Experiment,
    /// JSON experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output file (defaults to the config's output path, then stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_parser = ["csv", "json"])]
    format: Option<String>,
    /// Which correlator factor to report as the primary value.
    #[arg(long, value_parser = ["paper", "derived"], default_value = "paper")]
    convention: String,
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("QWNLAB_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw.parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::Config(format!(
            "QWNLAB_THREADS must be a positive integer, got `{raw}`"
        ))
    })?;
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Config(format!("cannot size thread pool: {e}")))?;
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
    Ok(())
}

fn main_inner(args: Args) -> Result<(), CliError> {
    configure_threads()?;
    let config = ExperimentConfig::load(&args.config)?;
    let convention: Convention = args
        .convention
        .parse()
        .map_err(|e: qwnlab_core::Error| CliError::Config(e.to_string()))?;
    let format = match args.format.as_deref() {
        Some(f) => f.parse()?,
        None => config.format()?.unwrap_or(Format::Json),
    };
    let out = args.out.or_else(|| config.output.path.clone());
    let opts = RunOptions {
        convention,
        ..RunOptions::default()
    };
    let record = run(args.experiment, &config, &opts)?;
    emit(&record, format, out.as_deref())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match main_inner(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qwnlab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
