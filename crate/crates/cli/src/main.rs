use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use stcq_cli::error::EXIT_VALIDATION;
use stcq_cli::pipeline::{
    cmd_dump_modulation, cmd_evolve, cmd_optimize, cmd_report, cmd_solve, cmd_sweep, run_scenario,
};
use stcq_cli::{load, CliError, Format};

#[derive(Debug, Parser)]
#[command(
    name = "stcq",
    version,
    about = "Space-time-modulated metasurface and polychromatic qubit coupling"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Scenario JSON file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Overrides the optimizer seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Both)]
    format: Format,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Harmonic spectrum of the slab, with truncation refinement.
    Solve,
    /// Spectra over the values of the sweep section.
    Sweep,
    /// Spectrum, coupling graph and qubit trajectory.
    Evolve,
    /// Parameter search for the optimize section.
    Optimize,
    /// Metrics from emitted graphs and state, or from a fresh solve.
    Report {
        #[arg(long)]
        mono: Option<PathBuf>,
        #[arg(long)]
        poly: Option<PathBuf>,
        #[arg(long)]
        state: Option<PathBuf>,
    },
    /// Full pipeline: solve, graph, evolve, metrics.
    Run,
    /// Samples and Fourier coefficients of the normalized inductance.
    DumpModulation {
        #[arg(long, default_value_t = 512)]
        samples: usize,
        #[arg(long, default_value_t = 8)]
        order: usize,
    },
}

fn dispatch(cli: &Cli) -> Result<(), CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("--config is required".into()))?;
    let loaded = load(path)?;
    let (out, format) = (cli.out.as_path(), cli.format);
    let manifest = match &cli.command {
        Command::Solve => cmd_solve(&loaded, out, format)?,
        Command::Sweep => cmd_sweep(&loaded, out, format)?,
        Command::Evolve => cmd_evolve(&loaded, out, format)?,
        Command::Optimize => cmd_optimize(&loaded, out, format, cli.seed)?.1,
        Command::Report { mono, poly, state } => {
            cmd_report(&loaded, out, format, mono.as_deref(), poly.as_deref(), state.as_deref())?.1
        }
        Command::Run => run_scenario(&loaded, out, format)?.manifest,
        Command::DumpModulation { samples, order } => cmd_dump_modulation(&loaded, out, format, *samples, *order)?,
    };
    eprintln!("wrote {} files to {}", manifest.files.len() + 1, out.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_VALIDATION)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("stcq: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
