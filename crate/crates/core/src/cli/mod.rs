//! Scenario runner and command-line front end.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 config error, 3 failed
//! numerical validation.

mod config;
mod emit;
mod scenario;
mod validate;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

pub use config::{
    AnalysisConfig, ConfigError, ContinuumConfig, CouplingConfig, DensityKind, DesignConfig, LevelConfig, Model,
    ModeConfig, OracleConfig, OutputKind, Overrides, ScenarioConfig, SpectralConfig, SystemConfig, TimeGridConfig,
};
pub use emit::{
    emit_columns_csv, emit_cycle_json, emit_level_csv, emit_spectral_csv, emit_trace_csv, header_line,
    read_config_hash, read_trace_csv,
};
pub use scenario::{run_scenario, RunSummary};
pub use validate::{reference_single_mode, validate_suite, Check, ValidationReport};

use crate::analytic::EtaOver;

pub const FIG1_CONFIG: &str = include_str!("../../configs/fig1.config");
pub const FIG2_CONFIG: &str = include_str!("../../configs/fig2.config");

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error in {0}")]
    Config(#[from] ConfigError),

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },

    #[error("{stage}: {source}")]
    Model {
        stage: &'static str,
        source: crate::Error,
    },

    #[error("validation failed:\n{0}")]
    Validation(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Io { .. } | CliError::Model { .. } => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "optocycle", version, about = "Square-wave bath design and stroke analysis for dephasing models")]
pub struct Cli {
    /// Seed for sampled couplings (overrides the config).
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Directory for output files.
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,

    /// Divisor of the coupling inside the continuum integral.
    #[arg(long, global = true, value_parser = ["omega0", "omega"])]
    pub continuum_eta_over: Option<String>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a scenario file.
    Run { config: PathBuf },
    /// Compare closed forms with the Fock-space oracle.
    Validate {
        /// Fock cutoff for the single-mode checks.
        #[arg(long)]
        truncation: Option<usize>,
    },
    /// Spectral densities for three inversions (bundled scenario).
    Fig1,
    /// Cavity cycle with its level diagram (bundled scenario).
    Fig2,
}

impl Cli {
    pub fn overrides(&self) -> Overrides {
        Overrides {
            seed: self.seed,
            eta_over: self
                .continuum_eta_over
                .as_deref()
                .map(|s| s.parse::<EtaOver>().expect("clap restricts the values")),
        }
    }
}

/// Parses, applies overrides and runs.
pub fn run_config_text(text: &str, overrides: &Overrides, out_dir: &Path) -> Result<RunSummary, CliError> {
    let mut config = ScenarioConfig::from_toml_str(text)?;
    config.apply(overrides);
    run_scenario(&config, out_dir)
}

pub fn execute(cli: &Cli) -> Result<String, CliError> {
    let overrides = cli.overrides();
    let summary = match &cli.command {
        Command::Run { config } => {
            let text = std::fs::read_to_string(config).map_err(|source| CliError::Io {
                path: config.clone(),
                source,
            })?;
            run_config_text(&text, &overrides, &cli.out_dir)?
        }
        Command::Fig1 => run_config_text(FIG1_CONFIG, &overrides, &cli.out_dir)?,
        Command::Fig2 => run_config_text(FIG2_CONFIG, &overrides, &cli.out_dir)?,
        Command::Validate { truncation } => {
            let report = validate_suite(*truncation)?;
            let text = report.to_string();
            return if report.passed() {
                Ok(text)
            } else {
                Err(CliError::Validation(text))
            };
        }
    };
    Ok(summary.to_string())
}

/// Entry point for the binary; returns the process exit code.
pub fn main() -> i32 {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(text) => {
            print!("{text}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
