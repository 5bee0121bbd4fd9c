use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;
mod verify;

use commands::{display_paths, CliError, OutputTarget};
use config::{Format, LoadedConfig, ROBOT_CONFIG};
use verify::Mutation;

/// Energy cost of losing control over actuators of a driftless linear system.
#[derive(Debug, Parser)]
#[command(name = "enres", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Nominal and malfunctioning energies, worst case and resilience bound.
    Analyze(Common),
    /// Ratio curves over the R grid.
    Sweep(Common),
    /// Check the closed forms against the discretised oracles.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, hide = true)]
        mutate: Option<Mutation>,
    },
    /// Analysis and sweep of the built-in underwater robot example.
    PaperRepro(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// TOML run configuration (optional for paper-repro).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory; overrides `output.dir`.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Output format; overrides `output.format`. Defaults to all formats.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Seed for every randomised step; overrides the config seeds.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for sweeps.
    #[arg(long)]
    threads: Option<usize>,
}

impl Common {
    fn load(&self, fallback: Option<&str>) -> Result<(LoadedConfig, OutputTarget), CliError> {
        let mut cfg = match (&self.config, fallback) {
            (Some(path), _) => LoadedConfig::from_path(path)?,
            (None, Some(text)) => LoadedConfig::parse(text)?,
            (None, None) => {
                return Err(CliError::Config(config::ConfigError {
                    field: String::new(),
                    line: None,
                    message: "--config is required".into(),
                }))
            }
        };
        if let Some(seed) = self.seed {
            cfg.apply_seed(seed);
        }
        if let Some(threads) = self.threads {
            if threads == 0 {
                return Err(CliError::Config(config::ConfigError {
                    field: "--threads".into(),
                    line: None,
                    message: "must be >= 1".into(),
                }));
            }
            // fails only if a pool already exists, which cannot happen here
            let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
        }
        let out = OutputTarget {
            dir: self
                .out_dir
                .clone()
                .or_else(|| cfg.config.output.dir.clone())
                .unwrap_or_else(|| PathBuf::from(".")),
            format: self.format.or(cfg.config.output.format),
        };
        Ok((cfg, out))
    }
}

fn run(cli: Cli) -> Result<Vec<PathBuf>, CliError> {
    match cli.command {
        Command::Analyze(c) => {
            let (cfg, out) = c.load(None)?;
            commands::analyze(&cfg, &out)
        }
        Command::Sweep(c) => {
            let (cfg, out) = c.load(None)?;
            commands::sweep(&cfg, &out)
        }
        Command::Verify { common, mutate } => {
            let (cfg, out) = common.load(None)?;
            verify::verify(&cfg, &out, mutate)
        }
        Command::PaperRepro(c) => {
            let (cfg, out) = c.load(Some(ROBOT_CONFIG))?;
            commands::paper_repro(&cfg, &out)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(paths) => {
            eprintln!("wrote {}", display_paths(&paths));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("enres: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
