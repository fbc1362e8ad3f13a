use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod circuit;
mod commands;
mod error;
mod report;

#[derive(Parser)]
#[command(name = "sim", version, about = "Two-spin virtual-qubit simulator and pulse compiler")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Allowed lines: frequencies and intensities.
    Spectrum {
        /// Parameter file (`key = value`).
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Write here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// SVG energy-level diagram.
    Levels {
        /// Parameter file (`key = value`).
        #[arg(long)]
        config: PathBuf,
        /// Write here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compile and simulate a circuit file; writes a JSON report.
    Run {
        /// Parameter file (`key = value`).
        #[arg(long)]
        config: PathBuf,
        /// Circuit file.
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long, value_enum, default_value_t = Engine::Rwa)]
        engine: Engine,
        /// Drive budget in rad/s (default: min_gap / 100).
        #[arg(long)]
        rabi_budget: Option<f64>,
        /// Lab-frame integration steps per carrier period.
        #[arg(long, default_value_t = virtual_spin::pulse::DEFAULT_STEPS_PER_PERIOD)]
        steps_per_period: usize,
        /// Write here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cross-check the closed-form eigensystem and line list.
    Validate {
        /// Parameter file (`key = value`).
        #[arg(long)]
        config: PathBuf,
        /// Test hook: shift level K by SHIFT rad/s before checking.
        #[arg(long, hide = true, value_name = "K=SHIFT")]
        corrupt_level: Option<String>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Engine {
    Rwa,
    Labframe,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::Rwa => "rwa",
            Engine::Labframe => "labframe",
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Spectrum {
            config,
            format,
            out,
        } => commands::spectrum(&config, format, out.as_deref()),
        Command::Levels { config, out } => commands::levels(&config, out.as_deref()),
        Command::Run {
            config,
            circuit,
            engine,
            rabi_budget,
            steps_per_period,
            out,
        } => commands::run(&commands::RunArgs {
            config,
            circuit,
            engine,
            rabi_budget,
            steps_per_period,
            out,
        }),
        Command::Validate {
            config,
            corrupt_level,
        } => commands::validate(&config, corrupt_level.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sim: {e}");
            if let error::CliError::Compile { warnings, .. } = &e {
                for w in warnings {
                    eprintln!("  {w}");
                }
            }
            ExitCode::from(e.exit_code())
        }
    }
}
