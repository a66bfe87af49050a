//! Command-line front end: configuration, commands and report rendering.

pub mod commands;
pub mod config;
pub mod error;
pub mod render;

use std::path::Path;

use clap::{Parser, Subcommand};

pub use commands::{cmd_check, cmd_classify2, cmd_report, cmd_spectrum, cmd_translate};
pub use config::{AnalysisConfig, Format, Overrides, Resolved};
pub use error::CliError;
use render::Render;

#[derive(Debug, Parser)]
#[command(name = "spectra-kit", version, about = "Spectra of boundary conditions on unions of intervals")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML configuration file.
    #[arg(long, global = true)]
    pub config: Option<std::path::PathBuf>,
    /// Half-open window `a,b`.
    #[arg(long, global = true, value_parser = config::parse_window, allow_hyphen_values = true)]
    pub window: Option<(f64, f64)>,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long = "grid-step", global = true)]
    pub grid_step: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Points of Λ_B in the window.
    Spectrum,
    /// Verify a spectrum, a boundary matrix or seed frequencies.
    Check,
    /// Two-interval classification.
    Classify2,
    /// Apply the local translation group to a sampled function.
    Translate,
    /// Everything the configuration allows.
    Report,
}

/// Rendered output and exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

pub fn run_resolved(command: Command, cfg: &Resolved) -> Result<Outcome, CliError> {
    let f = cfg.format;
    let (stdout, code) = match command {
        Command::Spectrum => cmd_spectrum(cfg).map(|(r, c)| (r.render(f), c))?,
        Command::Check => cmd_check(cfg).map(|(r, c)| (r.render(f), c))?,
        Command::Classify2 => cmd_classify2(cfg).map(|(r, c)| (r.render(f), c))?,
        Command::Translate => cmd_translate(cfg).map(|(r, c)| (r.render(f), c))?,
        Command::Report => cmd_report(cfg).map(|(r, c)| (r.render(f), c))?,
    };
    Ok(Outcome { stdout, code })
}

/// Runs a command from TOML text; `base_dir` resolves relative input paths.
pub fn run_text(command: Command, text: &str, ov: &Overrides, base_dir: &Path) -> Result<Outcome, CliError> {
    let cfg = AnalysisConfig::parse(text)?.resolve(ov, base_dir)?;
    run_resolved(command, &cfg)
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let path = cli.config.as_ref().ok_or_else(|| CliError::Usage("--config <file.toml> is required".into()))?;
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let ov = Overrides { window: cli.window, tol: cli.tol, grid_step: cli.grid_step, format: cli.format };
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    run_text(cli.command, &text, &ov, base)
}
