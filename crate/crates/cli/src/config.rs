//! TOML analysis configuration.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use spectra_core::serde_util::from_rows;
use spectra_core::{BoundaryMatrix, IntervalUnion, PeriodicSpectrum, SolverOptions, Tolerances};

use crate::error::CliError;

pub const DEFAULT_WINDOW: (f64, f64) = (-8.0, 8.0);
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumConfig {
    pub reps: Vec<f64>,
    pub period: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TranslateConfig {
    pub t: f64,
    /// Grid step of the sampled function.
    #[serde(default = "default_h")]
    pub h: f64,
    /// CSV file with `x,re,im` rows, relative to the config file.
    pub input: Option<PathBuf>,
    /// Frequency of the exponential used when no input file is given.
    #[serde(default)]
    pub freq: f64,
    /// Distance from ∂Ω below which samples are excluded from the defect.
    #[serde(default = "default_margin")]
    pub margin: f64,
}

fn default_h() -> f64 {
    1e-3
}

fn default_margin() -> f64 {
    1e-3
}

/// Raw file contents as parsed from TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    pub intervals: Vec<[f64; 2]>,
    /// Row-major entries as `[re, im]`.
    pub matrix: Option<Vec<Vec<[f64; 2]>>>,
    pub spectrum: Option<SpectrumConfig>,
    pub seeds: Option<Vec<f64>>,
    pub window: Option<[f64; 2]>,
    pub tol: Option<f64>,
    pub grid_step: Option<f64>,
    pub format: Option<Format>,
    pub translate: Option<TranslateConfig>,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub window: Option<(f64, f64)>,
    pub tol: Option<f64>,
    pub grid_step: Option<f64>,
    pub format: Option<Format>,
}

/// Validated configuration.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub omega: IntervalUnion<f64>,
    pub matrix: Option<BoundaryMatrix<f64>>,
    pub spectrum: Option<PeriodicSpectrum<f64>>,
    pub seeds: Option<Vec<f64>>,
    pub window: (f64, f64),
    pub tol: f64,
    pub grid_step: Option<f64>,
    pub format: Format,
    pub translate: Option<TranslateConfig>,
    pub base_dir: PathBuf,
}

impl Resolved {
    pub fn solver_options(&self) -> SolverOptions<f64> {
        SolverOptions { tol: Tolerances { root: self.tol, ..Tolerances::default() }, grid_step: self.grid_step }
    }
}

impl AnalysisConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("invalid TOML: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn resolve(&self, ov: &Overrides, base_dir: &Path) -> Result<Resolved, CliError> {
        let iv: Vec<(f64, f64)> = self.intervals.iter().map(|p| (p[0], p[1])).collect();
        let omega = IntervalUnion::new(&iv).map_err(|e| CliError::Config(format!("intervals: {e}")))?;
        let tol = ov.tol.or(self.tol).unwrap_or(DEFAULT_TOL);
        if !(tol > 0.0) {
            return Err(CliError::Config(format!("tol must be positive, got {tol}")));
        }
        let window = ov.window.or(self.window.map(|w| (w[0], w[1]))).unwrap_or(DEFAULT_WINDOW);
        if !(window.1 > window.0) {
            return Err(CliError::Config(format!("window [{}, {}) is empty", window.0, window.1)));
        }
        let grid_step = ov.grid_step.or(self.grid_step);
        if let Some(h) = grid_step {
            if !(h > 0.0) {
                return Err(CliError::Config(format!("grid_step must be positive, got {h}")));
            }
        }
        let matrix = match &self.matrix {
            Some(rows) => {
                let m = from_rows(rows).map_err(|e| CliError::Config(format!("matrix: {e}")))?;
                Some(
                    BoundaryMatrix::for_union(m, &omega, Tolerances::<f64>::default().unitarity)
                        .map_err(|e| CliError::Config(format!("matrix: {e}")))?,
                )
            }
            None => None,
        };
        let spectrum = match &self.spectrum {
            Some(s) => Some(PeriodicSpectrum::new(&s.reps, s.period).map_err(|e| CliError::Config(format!("spectrum: {e}")))?),
            None => None,
        };
        if let Some(s) = &self.seeds {
            if s.len() != omega.n() {
                return Err(CliError::Config(format!("{} seeds for {} intervals", s.len(), omega.n())));
            }
        }
        Ok(Resolved {
            omega,
            matrix,
            spectrum,
            seeds: self.seeds.clone(),
            window,
            tol,
            grid_step,
            format: ov.format.or(self.format).unwrap_or_default(),
            translate: self.translate.clone(),
            base_dir: base_dir.to_path_buf(),
        })
    }
}

/// Parses `a,b` into a window.
pub fn parse_window(s: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err(format!("expected a,b but got {s:?}"));
    }
    let a = parts[0].parse::<f64>().map_err(|e| format!("{}: {e}", parts[0]))?;
    let b = parts[1].parse::<f64>().map_err(|e| format!("{}: {e}", parts[1]))?;
    Ok((a, b))
}
