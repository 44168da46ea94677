mod commands;
mod config;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Exit 1 for a failed check, 2 for a bad command line or config.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Failure(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Failure(_) => 1,
            CliError::Config(_) => 2,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "sqhex", version, about = "Dimers on contracting square-hexagon lattices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Overrides [run].seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads for sampling and grid evaluation.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Svg,
    Both,
}

impl Format {
    fn csv(self) -> bool {
        self != Format::Svg
    }

    fn svg(self) -> bool {
        self != Format::Csv
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    All,
    Oracle,
    Residual,
    Winding,
    Components,
    MonteCarlo,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Partition function of [lattice] by the Schur formula.
    PartitionFunction {
        #[command(flatten)]
        common: Common,
        /// Also enumerate every matching and compare.
        #[arg(long)]
        oracle: bool,
    },
    /// Boltzmann samples of [lattice] with their counting measures.
    Sample {
        #[command(flatten)]
        common: Common,
        /// Overrides [run].samples.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        samples: Option<u64>,
    },
    /// Frozen boundary of [profile] and [weights], or one curve per
    /// weight class with --components.
    Boundary {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        components: bool,
    },
    /// Liquid-region density on a grid.
    DensityMap {
        #[command(flatten)]
        common: Common,
        /// Overrides [run].grid.
        #[arg(long, value_parser = config::parse_grid)]
        grid: Option<(usize, usize)>,
    },
    /// Run the consistency suites that apply to the config.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
    },
}

fn dispatch(cmd: Command) -> Result<(), CliError> {
    let common = match &cmd {
        Command::PartitionFunction { common, .. }
        | Command::Sample { common, .. }
        | Command::Boundary { common, .. }
        | Command::DensityMap { common, .. }
        | Command::Verify { common, .. } => common.clone(),
    };
    if let Some(k) = common.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    let mut cfg = config::RunConfig::load(&common.config)?;
    if let Some(seed) = common.seed {
        cfg.run.seed = seed;
    }
    match cmd {
        Command::PartitionFunction { oracle, .. } => commands::partition_function(&cfg, oracle),
        Command::Sample { samples, .. } => {
            if let Some(n) = samples {
                cfg.run.samples = n as usize;
            }
            commands::sample(&cfg, &common.out)
        }
        Command::Boundary { components, .. } => commands::boundary(&cfg, &common.out, common.format, components),
        Command::DensityMap { grid, .. } => {
            let grid = match grid {
                Some(g) => g,
                None => config::parse_grid(&cfg.run.grid).map_err(CliError::Config)?,
            };
            commands::density_map(&cfg, &common.out, common.format, grid)
        }
        Command::Verify { suite, .. } => verify::run(&cfg, suite),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
