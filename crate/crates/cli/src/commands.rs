//! One function per subcommand; each returns a serializable report.

use serde::{Deserialize, Serialize};
use spectra_core::spectral_pairs::{full_pipeline, pipeline_from_matrix, verify_pair, RejectReason, VerificationReport};
use spectra_core::spectrum_solver::{default_step, solve_spectrum, track_eigenphases, EigenphaseTrack};
use spectra_core::translation_group::build_group;
use spectra_core::two_interval::{classify_union, TwoIntervalCase, Verdict};
use spectra_core::{PeriodicSpectrum, SampledFunction, SolverOptions, SpectraError, SpectrumPoint, Tolerances};

use crate::config::Resolved;
use crate::error::{CliError, EXIT_PASS, EXIT_VERDICT_FAIL};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub intervals: Vec<(f64, f64)>,
    pub window: (f64, f64),
    pub grid_step: f64,
    /// True when the first scan failed and the grid was refined once.
    pub refined: bool,
    pub count: usize,
    pub points: Vec<SpectrumPoint<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckMode {
    Spectrum,
    Matrix,
    Seeds,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub mode: CheckMode,
    pub passed: bool,
    pub spectrum: Option<PeriodicSpectrum<f64>>,
    pub verification: Option<VerificationReport<f64>>,
    pub reason: Option<RejectReason<f64>>,
    pub diagnostics: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranslateReport {
    pub t: f64,
    pub h: f64,
    pub p: usize,
    /// Measure of the configured set; values live on the set scaled to measure 1.
    pub rescale: f64,
    pub intervals: Vec<(f64, f64)>,
    pub x: Vec<f64>,
    pub before: Vec<[f64; 2]>,
    pub after: Vec<[f64; 2]>,
    pub margin: f64,
    pub local_translation_defect: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FullReport {
    pub classification: Option<TwoIntervalCase<f64>>,
    pub spectrum: Option<SpectrumReport>,
    pub check: Option<CheckReport>,
    pub eigenphases: Option<EigenphaseTrack<f64>>,
}

fn is_retryable(e: &SpectraError) -> bool {
    matches!(e, SpectraError::WindingMismatch { .. } | SpectraError::Numerical(_))
}

/// Runs `f` with the configured options and once more with half the grid step.
fn with_retry<R>(
    cfg: &Resolved,
    mut f: impl FnMut(&SolverOptions<f64>) -> Result<R, SpectraError>,
) -> Result<(R, f64, bool), CliError> {
    let opts = cfg.solver_options();
    let step = opts.grid_step.unwrap_or_else(|| default_step(&cfg.omega));
    match f(&opts) {
        Ok(r) => Ok((r, step, false)),
        Err(e) if is_retryable(&e) => {
            eprintln!("scan failed ({e}); retrying with grid step {}", step / 2.0);
            let fine = SolverOptions { grid_step: Some(step / 2.0), ..opts };
            match f(&fine) {
                Ok(r) => Ok((r, step / 2.0, true)),
                Err(e) if is_retryable(&e) => Err(CliError::RetryExhausted(e)),
                Err(e) => Err(e.into()),
            }
        }
        Err(e) => Err(e.into()),
    }
}

pub fn cmd_spectrum(cfg: &Resolved) -> Result<(SpectrumReport, i32), CliError> {
    let b = cfg.matrix.as_ref().ok_or_else(|| CliError::Config("spectrum needs `matrix`".into()))?;
    let (points, grid_step, refined) = with_retry(cfg, |o| solve_spectrum(b, &cfg.omega, cfg.window, o))?;
    let report = SpectrumReport {
        intervals: cfg.omega.intervals().to_vec(),
        window: cfg.window,
        grid_step,
        refined,
        count: points.iter().map(|p| p.multiplicity).sum(),
        points,
    };
    Ok((report, EXIT_PASS))
}

pub fn cmd_check(cfg: &Resolved) -> Result<(CheckReport, i32), CliError> {
    let report = if let Some(s) = &cfg.spectrum {
        let v = verify_pair(&cfg.omega, s)?;
        let mut diagnostics = vec![format!("gram defect {:e} over {} points", v.gram_defect, v.gram_truncation)];
        if (v.density_estimate - v.measure).abs() > 1e-9 {
            diagnostics.push(format!("density {} differs from |Ω| = {}", v.density_estimate, v.measure));
        }
        CheckReport {
            mode: CheckMode::Spectrum,
            passed: v.passed,
            spectrum: Some(s.clone()),
            reason: (!v.passed).then_some(RejectReason::VerificationFailed),
            verification: Some(v),
            diagnostics,
        }
    } else if cfg.matrix.is_some() || cfg.seeds.is_some() {
        let (out, mode) = if let Some(b) = &cfg.matrix {
            (with_retry(cfg, |o| pipeline_from_matrix(&cfg.omega, b.clone(), cfg.window, o))?.0, CheckMode::Matrix)
        } else {
            let seeds = cfg.seeds.as_ref().unwrap();
            (with_retry(cfg, |o| full_pipeline(&cfg.omega, seeds, cfg.window, o))?.0, CheckMode::Seeds)
        };
        let passed = out.succeeded();
        let (spectrum, verification) = match out.pair {
            Some(p) => (Some(p.spectrum), Some(p.report)),
            None => (None, None),
        };
        CheckReport { mode, passed, spectrum, verification, reason: out.reason, diagnostics: out.diagnostics }
    } else {
        return Err(CliError::Config("check needs `spectrum`, `matrix` or `seeds`".into()));
    };
    let code = if report.passed { EXIT_PASS } else { EXIT_VERDICT_FAIL };
    Ok((report, code))
}

pub fn cmd_classify2(cfg: &Resolved) -> Result<(TwoIntervalCase<f64>, i32), CliError> {
    if cfg.omega.n() != 2 {
        return Err(CliError::Config(format!("classify2 needs exactly two intervals, got {}", cfg.omega.n())));
    }
    let c = classify_union(&cfg.omega, cfg.tol)?;
    if let Some(w) = &c.warning {
        eprintln!("warning: {w}");
    }
    let code = if matches!(c.verdict, Verdict::NotSpectral) { EXIT_VERDICT_FAIL } else { EXIT_PASS };
    Ok((c, code))
}

pub fn cmd_translate(cfg: &Resolved) -> Result<(TranslateReport, i32), CliError> {
    let tc = cfg.translate.as_ref().ok_or_else(|| CliError::Config("translate needs a [translate] table".into()))?;
    let s = cfg.spectrum.as_ref().ok_or_else(|| CliError::Config("translate needs `spectrum`".into()))?;
    if !(tc.h > 0.0) {
        return Err(CliError::Config(format!("translate.h must be positive, got {}", tc.h)));
    }
    let g = build_group(&cfg.omega, s, &Tolerances::default())?;
    let f = match &tc.input {
        Some(path) => {
            let path = cfg.base_dir.join(path);
            let text = std::fs::read_to_string(&path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            SampledFunction::from_csv(g.omega(), tc.h, &text)?
        }
        None => {
            let nu = tc.freq;
            SampledFunction::from_fn(g.omega(), tc.h, |x| spectra_core::scalar::e2pi(nu * x))
        }
    };
    let u = g.apply_u(tc.t, &f)?;
    let defect = g.local_translation_defect(tc.t, &f, tc.margin)?;
    let report = TranslateReport {
        t: tc.t,
        h: tc.h,
        p: g.p(),
        rescale: g.rescale(),
        intervals: g.omega().intervals().to_vec(),
        x: f.points(),
        before: f.values().iter().map(|z| [z.re, z.im]).collect(),
        after: u.values().iter().map(|z| [z.re, z.im]).collect(),
        margin: tc.margin,
        local_translation_defect: defect,
    };
    Ok((report, EXIT_PASS))
}

/// Everything the configuration allows, plus eigenphase tracks when B is given.
pub fn cmd_report(cfg: &Resolved) -> Result<(FullReport, i32), CliError> {
    let classification = if cfg.omega.n() == 2 { Some(cmd_classify2(cfg)?.0) } else { None };
    let spectrum = if cfg.matrix.is_some() { Some(cmd_spectrum(cfg)?.0) } else { None };
    let check = if cfg.spectrum.is_some() || cfg.matrix.is_some() || cfg.seeds.is_some() {
        Some(cmd_check(cfg)?.0)
    } else {
        None
    };
    let eigenphases = match &cfg.matrix {
        Some(b) => {
            let step = cfg.grid_step.unwrap_or_else(|| default_step(&cfg.omega)) / 8.0;
            let n = ((cfg.window.1 - cfg.window.0) / step).ceil() as usize;
            let grid: Vec<f64> = (0..=n).map(|k| (cfg.window.0 + k as f64 * step).min(cfg.window.1)).collect();
            Some(track_eigenphases(b, &cfg.omega, &grid)?)
        }
        None => None,
    };
    let code = if check.as_ref().map_or(true, |c| c.passed) { EXIT_PASS } else { EXIT_VERDICT_FAIL };
    Ok((FullReport { classification, spectrum, check, eigenphases }, code))
}
