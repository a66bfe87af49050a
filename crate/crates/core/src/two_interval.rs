//! Complete classification of two-interval sets Ω = (0,w) ∪ (w+ρ, 1+ρ).
//!
//! Ω is spectral iff either ρ ∈ Z and w ≠ 1/2 (spectrum Z, B the swap matrix),
//! or w = 1/2 and w+ρ = l/2 for an integer l; then the spectra containing 0
//! are `Λ_k = {0, (2k+1)/l} + 2Z`, k = 0..l-1, with
//! `B_k = ((1+ξ)/2, (1-ξ)/2; (1-ξ)/2, (1+ξ)/2)`, `ξ = e^{πi(2k+1)/l}`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::boundary_matrices::BoundaryMatrix;
use crate::error::{Result, SpectraError};
use crate::interval_geometry::{reduce_mod, IntervalUnion};
use crate::scalar::{c_real, c_zero, from_i64, from_usize, lit, to_f64, CMat, Real};
use crate::spectral_pairs::{verify_orthogonality, PeriodicSpectrum};
use crate::spectrum_solver::{is_spectral_matrix, solve_spectrum, SolverOptions};
use crate::translation_group::SampledFunction;

/// One spectrum of Case II with its boundary matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct CaseTwoSpectrum<T> {
    pub k: u64,
    /// `ξ = e^{πi(2k+1)/l}`.
    pub xi: Complex<T>,
    pub spectrum: PeriodicSpectrum<T>,
    pub b: BoundaryMatrix<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real", tag = "case")]
pub enum Verdict<T> {
    CaseI { spectrum: PeriodicSpectrum<T>, b: BoundaryMatrix<T> },
    CaseII { l: u64, spectra: Vec<CaseTwoSpectrum<T>> },
    NotSpectral,
}

/// Affine map `normalized = (original - shift) * scale`. Boundary matrices are
/// unchanged by it; spectra of the original set are `Λ * scale`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Normalization<T> {
    pub shift: T,
    pub scale: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct TwoIntervalCase<T> {
    pub w: T,
    pub rho: T,
    pub verdict: Verdict<T>,
    /// Set when an integrality test was decided within a few orders of the tolerance.
    pub warning: Option<String>,
    pub normalization: Option<Normalization<T>>,
}

impl<T: Real> TwoIntervalCase<T> {
    /// The normalized set `(0,w) ∪ (w+ρ, 1+ρ)`.
    pub fn omega(&self) -> Result<IntervalUnion<T>> {
        IntervalUnion::new(&[(T::zero(), self.w), (self.w + self.rho, T::one() + self.rho)])
    }

    pub fn is_spectral(&self) -> bool {
        !matches!(self.verdict, Verdict::NotSpectral)
    }

    /// Every (Λ, B) attached to the verdict.
    pub fn pairs(&self) -> Vec<(PeriodicSpectrum<T>, BoundaryMatrix<T>)> {
        match &self.verdict {
            Verdict::CaseI { spectrum, b } => vec![(spectrum.clone(), b.clone())],
            Verdict::CaseII { spectra, .. } => spectra.iter().map(|s| (s.spectrum.clone(), s.b.clone())).collect(),
            Verdict::NotSpectral => Vec::new(),
        }
    }
}

/// Distance of x to the nearest integer relative to `max(1, |x|)`, and that integer.
fn integrality<T: Real>(x: T) -> (f64, i64) {
    let xf = to_f64(x);
    let r = xf.round();
    ((xf - r).abs() / xf.abs().max(1.0), r as i64)
}

/// `ξ^a = e^{πi a(2k+1)/l}` with the exponent reduced mod 2l in integers.
pub fn xi_power<T: Real>(l: u64, k: u64, a: i64) -> Complex<T> {
    let two_l = 2 * l as i128;
    let r = ((a as i128 * (2 * k as i128 + 1)) % two_l + two_l) % two_l;
    match r {
        0 => Complex::new(T::one(), T::zero()),
        _ if r == l as i128 => Complex::new(-T::one(), T::zero()),
        _ => {
            let th = T::pi() * from_i64::<T>(r as i64) / from_usize::<T>(l as usize);
            Complex::new(th.cos(), th.sin())
        }
    }
}

/// `((1+ξ^a)/2, (1-ξ^a)/2; (1-ξ^a)/2, (1+ξ^a)/2)`.
pub fn case_two_b_power<T: Real>(l: u64, k: u64, a: i64) -> CMat<T> {
    let x = xi_power::<T>(l, k, a);
    let one = c_real::<T>(T::one());
    let h = c_real::<T>(lit(0.5));
    let d = (one + x) * h;
    let o = (one - x) * h;
    CMat::from_row_slice(2, 2, &[d, o, o, d])
}

pub fn swap_matrix<T: Real>() -> CMat<T> {
    let (z, o) = (c_zero::<T>(), c_real::<T>(T::one()));
    CMat::from_row_slice(2, 2, &[z, o, o, z])
}

/// Classifies `(0,w) ∪ (w+ρ, 1+ρ)`. Integrality tests use relative tolerance `tol`.
pub fn classify<T: Real>(w: T, rho: T, tol: T) -> Result<TwoIntervalCase<T>> {
    if !(w > T::zero() && w < T::one()) {
        return Err(SpectraError::OutOfRange(format!("w = {} not in (0,1)", to_f64(w))));
    }
    if !(rho > T::zero()) {
        return Err(SpectraError::OutOfRange(format!("rho = {} not positive", to_f64(rho))));
    }
    let tf = to_f64(tol);
    let warn_band = tf * 1e3;
    let mut warning = None;
    let half_dist = (to_f64(w) - 0.5).abs();
    let (rho_dist, _) = integrality(rho);
    let (l_dist, l) = integrality(lit::<T>(2.0) * (w + rho));
    let near = |d: f64| d > 0.0 && d <= warn_band && (d - tf).abs() <= warn_band;
    if near(half_dist) || near(rho_dist) || near(l_dist) {
        warning = Some(format!(
            "ill-conditioned input: |w - 1/2| = {half_dist:e}, rho integrality {rho_dist:e}, 2(w+rho) integrality {l_dist:e}, tol {tf:e}"
        ));
    }
    let verdict = if half_dist <= tf {
        if l_dist <= tf && l >= 2 {
            let l = l as u64;
            let two = lit::<T>(2.0);
            let mut spectra = Vec::with_capacity(l as usize);
            for k in 0..l {
                let lam = from_usize::<T>(2 * k as usize + 1) / from_usize::<T>(l as usize);
                spectra.push(CaseTwoSpectrum {
                    k,
                    xi: xi_power(l, k, 1),
                    spectrum: PeriodicSpectrum::new(&[T::zero(), lam], two)?,
                    b: BoundaryMatrix::unchecked(case_two_b_power(l, k, 1)),
                });
            }
            Verdict::CaseII { l, spectra }
        } else {
            Verdict::NotSpectral
        }
    } else if rho_dist <= tf {
        Verdict::CaseI { spectrum: PeriodicSpectrum::integers(), b: BoundaryMatrix::unchecked(swap_matrix()) }
    } else {
        Verdict::NotSpectral
    };
    Ok(TwoIntervalCase { w, rho, verdict, warning, normalization: None })
}

/// Classifies an arbitrary two-interval union after moving it to `(0,w) ∪ (w+ρ, 1+ρ)`.
pub fn classify_union<T: Real>(omega: &IntervalUnion<T>, tol: T) -> Result<TwoIntervalCase<T>> {
    if omega.n() != 2 {
        return Err(SpectraError::OutOfRange(format!("{} intervals, expected 2", omega.n())));
    }
    let (norm, shift, scale) = omega.normalization();
    let w = norm.beta(0);
    let rho = norm.alpha(1) - w;
    let mut c = classify(w, rho, tol)?;
    if (shift.abs() > T::zero()) || (scale - T::one()).abs() > T::zero() {
        c.normalization = Some(Normalization { shift, scale });
    }
    Ok(c)
}

/// `(U(t)f)(x + c_i/2) = Σ_j (B^{a(x+t)})_{ij} f([x+t]_2 + c_j/2)` on
/// Ω = (0,1/2) ∪ (l/2, (l+1)/2), cells c = (0, l).
pub fn u_closed_form<T: Real>(case: &TwoIntervalCase<T>, k: u64, t: T, f: &SampledFunction<T>) -> Result<SampledFunction<T>> {
    let Verdict::CaseII { l, .. } = case.verdict else {
        return Err(SpectraError::WrongCase("closed-form group needs Case II".into()));
    };
    if k >= l {
        return Err(SpectraError::OutOfRange(format!("k = {k} with l = {l}")));
    }
    let omega = case.omega()?;
    if f.omega() != &omega {
        return Err(SpectraError::GridMismatch("function is not sampled on (0,1/2) ∪ (l/2,(l+1)/2)".into()));
    }
    let two = lit::<T>(2.0);
    let cells = [0i64, l as i64];
    let mut out = Vec::with_capacity(f.len());
    for (y, _, _) in f.nodes() {
        let (x, c) = reduce_mod(y, two);
        let i = if c == 0 { 0 } else { 1 };
        let (xt, a) = reduce_mod(x + t, two);
        let bp = case_two_b_power::<T>(l, k, a);
        let v = (0..2).fold(c_zero::<T>(), |s, j| s + bp[(i, j)] * f.eval(xt + from_i64::<T>(cells[j]) / two));
        out.push(v);
    }
    f.with_values(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct CrossCheckEntry<T> {
    pub k: Option<u64>,
    pub expected: Vec<T>,
    pub found: Vec<T>,
    pub max_deviation: T,
    pub spectral_matrix: bool,
    pub gram_defect: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct CrossCheckReport<T> {
    pub window: (T, T),
    pub entries: Vec<CrossCheckEntry<T>>,
}

/// Runs the generic solver on every attached B and compares with the attached Λ.
pub fn cross_check_with_pipeline<T: Real>(
    case: &TwoIntervalCase<T>,
    window: (T, T),
    opts: &SolverOptions<T>,
) -> Result<CrossCheckReport<T>> {
    if !case.is_spectral() {
        return Err(SpectraError::WrongCase("nothing to cross-check for a non-spectral set".into()));
    }
    let omega = case.omega()?;
    let ks: Vec<Option<u64>> = match &case.verdict {
        Verdict::CaseII { spectra, .. } => spectra.iter().map(|s| Some(s.k)).collect(),
        _ => vec![None],
    };
    let gate = lit::<T>(1e-9);
    let mut entries = Vec::new();
    for ((spec, b), k) in case.pairs().into_iter().zip(ks) {
        let pts = solve_spectrum(&b, &omega, window, opts)?;
        let found: Vec<T> = pts.iter().map(|p| p.lambda).collect();
        let expected = spec.points_in(window.0, window.1);
        let max_deviation = if found.len() == expected.len() {
            found.iter().zip(&expected).fold(T::zero(), |m, (a, b)| m.max((*a - *b).abs()))
        } else {
            T::max_value().unwrap()
        };
        let spectral_matrix = is_spectral_matrix(&b, &omega, window, opts)?.spectral;
        let gram_defect = verify_orthogonality(&omega, &spec, 64);
        let entry = CrossCheckEntry { k, expected, found, max_deviation, spectral_matrix, gram_defect };
        if !(max_deviation <= gate) || !spectral_matrix || !(gram_defect <= gate) {
            return Err(SpectraError::InconsistencyDetected(format!(
                "k = {:?}: deviation {:e}, spectral {}, gram {:e}",
                k,
                to_f64(max_deviation),
                spectral_matrix,
                to_f64(gram_defect)
            )));
        }
        entries.push(entry);
    }
    Ok(CrossCheckReport { window, entries })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdicts() {
        assert!(matches!(classify(0.3, 2.0, 1e-9).unwrap().verdict, Verdict::CaseI { .. }));
        assert!(matches!(classify(0.3, 0.5, 1e-9).unwrap().verdict, Verdict::NotSpectral));
        let c = classify(0.5, 1.0, 1e-9).unwrap();
        let Verdict::CaseII { l, spectra } = &c.verdict else { panic!("{c:?}") };
        assert_eq!(*l, 3);
        let reps: Vec<f64> = spectra.iter().map(|s| s.spectrum.reps()[1]).collect();
        for (got, want) in reps.iter().zip([1.0 / 3.0, 1.0, 5.0 / 3.0]) {
            assert!((got - want).abs() < 1e-15);
        }
        assert!(classify(0.0, 1.0, 1e-9).is_err());
        assert!(classify(0.5, -1.0, 1e-9).is_err());
    }

    #[test]
    fn xi_powers_are_exact() {
        for l in 1..7u64 {
            for k in 0..l {
                let x = xi_power::<f64>(l, k, l as i64);
                assert_eq!(x, Complex::new(-1.0, 0.0));
                let y = xi_power::<f64>(l, k, 2 * l as i64);
                assert_eq!(y, Complex::new(1.0, 0.0));
            }
        }
    }

    #[test]
    fn normalization_recorded() {
        let o = IntervalUnion::new(&[(1.0, 2.0), (4.0, 5.0)]).unwrap();
        let c = classify_union(&o, 1e-9).unwrap();
        assert!(matches!(c.verdict, Verdict::CaseII { l: 3, .. }));
        assert_eq!(c.normalization, Some(Normalization { shift: 1.0, scale: 0.5 }));
    }
}
