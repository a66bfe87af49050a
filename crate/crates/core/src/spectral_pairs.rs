//! Spectral pairs (Ω, Λ): exponential inner products, Gram and Parseval
//! defects, densities, finite-set spectra, lattice searches and the
//! seed → boundary matrix → spectrum → verification pipeline.

use nalgebra::Normed;
use std::collections::BTreeMap;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::boundary_matrices::{b_from_spectrum_points, BoundaryMatrix};
use crate::error::{Result, SpectraError};
use crate::interval_geometry::IntervalUnion;
use crate::scalar::{abs2, c_real, c_zero, e2pi, from_i64, from_usize, lit, sin_pi, to_f64, unitarity_defect, CMat, Real};
use crate::spectrum_solver::{detect_period, is_spectral_matrix, SolverOptions};
use crate::tolerance::Tolerances;
use crate::translation_group::SampledFunction;

/// Λ = {λ_0, …, λ_{m-1}} + pZ with representatives in `[0, p)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct PeriodicSpectrum<T> {
    reps: Vec<T>,
    period: T,
}

impl<T: Real> PeriodicSpectrum<T> {
    /// Reduces the representatives into `[0, p)`, sorts them and rejects duplicates.
    pub fn new(reps: &[T], period: T) -> Result<Self> {
        if !(period > T::zero()) {
            return Err(SpectraError::NonpositivePeriod(to_f64(period)));
        }
        if reps.is_empty() {
            return Err(SpectraError::InvalidSpectrum("no representatives".into()));
        }
        let eps = period * lit(1e-12);
        let mut r: Vec<T> = reps
            .iter()
            .map(|&x| {
                let mut y = x - (x / period).floor() * period;
                if y >= period - eps || y < T::zero() {
                    y = T::zero();
                }
                if y.abs() < eps {
                    y = T::zero();
                }
                y
            })
            .collect();
        r.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for w in r.windows(2) {
            if w[1] - w[0] <= eps {
                return Err(SpectraError::InvalidSpectrum(format!("duplicate representative {}", to_f64(w[0]))));
            }
        }
        Ok(Self { reps: r, period })
    }

    /// The integers Z.
    pub fn integers() -> Self {
        Self { reps: vec![T::zero()], period: T::one() }
    }

    pub fn reps(&self) -> &[T] {
        &self.reps
    }

    pub fn period(&self) -> T {
        self.period
    }

    pub fn m(&self) -> usize {
        self.reps.len()
    }

    /// Whether `x` lies in Λ up to `tol`.
    pub fn contains(&self, x: T, tol: T) -> bool {
        self.reps.iter().any(|&r| {
            let d = (x - r) / self.period;
            ((d - d.round()) * self.period).abs() <= tol
        })
    }

    /// Points in `[a, b)`, sorted.
    pub fn points_in(&self, a: T, b: T) -> Vec<T> {
        let p = self.period;
        let k0 = to_f64((a / p).floor()) as i64 - 1;
        let k1 = to_f64((b / p).ceil()) as i64 + 1;
        let mut out = Vec::new();
        for k in k0..=k1 {
            for &r in &self.reps {
                let x = r + from_i64::<T>(k) * p;
                if x >= a && x < b {
                    out.push(x);
                }
            }
        }
        out.sort_by(|x, y| x.partial_cmp(y).unwrap());
        out
    }

    /// First `n` points ordered by |λ|, ties toward the positive one.
    pub fn first_n(&self, n: usize) -> Vec<T> {
        let m = self.m();
        let k = (n + 2 * m - 1) / (2 * m) + 2;
        let p = self.period;
        let mut pts = Vec::with_capacity(2 * k * m + m);
        for j in -(k as i64)..=(k as i64) {
            for &r in &self.reps {
                pts.push(r + from_i64::<T>(j) * p);
            }
        }
        pts.sort_by(|x, y| {
            x.abs()
                .partial_cmp(&y.abs())
                .unwrap()
                .then_with(|| (*x < T::zero()).cmp(&(*y < T::zero())))
        });
        pts.truncate(n);
        pts
    }

    /// The translate Λ - t, re-reduced.
    pub fn shifted(&self, t: T) -> Result<Self> {
        let r: Vec<T> = self.reps.iter().map(|&x| x - t).collect();
        Self::new(&r, self.period)
    }

    /// Scales Λ by `c > 0`.
    pub fn scaled(&self, c: T) -> Result<Self> {
        let r: Vec<T> = self.reps.iter().map(|&x| x * c).collect();
        Self::new(&r, self.period * c)
    }
}

/// `∫_a^b e^{2πiδt} dt = e^{iπδ(a+b)} sin(πδℓ)/(πδ)`.
fn exp_integral<T: Real>(delta: T, a: T, b: T) -> Complex<T> {
    let l = b - a;
    let x = T::pi() * delta * l;
    let phase = e2pi(delta * (a + b) * lit(0.5));
    let mag = if delta.abs() < lit(1e-8) {
        let x2 = x * x;
        l * (T::one() - x2 / lit(6.0) + x2 * x2 / lit(120.0))
    } else {
        sin_pi(delta * l) / (T::pi() * delta)
    };
    phase * mag
}

/// `⟨e_λ, e_μ⟩_{L²(Ω)} = Σ_i ∫_{α_i}^{β_i} e^{2πi(λ-μ)t} dt`.
pub fn exp_inner_product<T: Real>(omega: &IntervalUnion<T>, lambda: T, mu: T) -> Complex<T> {
    if lambda == mu {
        return c_real(omega.measure());
    }
    let d = lambda - mu;
    omega.intervals().iter().fold(c_zero(), |s, &(a, b)| s + exp_integral(d, a, b))
}

/// `G_{jk} = ⟨e_{λ_j}, e_{λ_k}⟩`, Hermitian by construction.
pub fn gram_matrix<T: Real>(omega: &IntervalUnion<T>, lambda: &[T]) -> CMat<T> {
    let n = lambda.len();
    let mut g = CMat::zeros(n, n);
    for j in 0..n {
        g[(j, j)] = c_real(omega.measure());
        for k in j + 1..n {
            let v = exp_inner_product(omega, lambda[j], lambda[k]);
            g[(j, k)] = v;
            g[(k, j)] = v.conj();
        }
    }
    g
}

/// Largest off-diagonal `|G_{jk}|/|Ω|` over the first `n` points of Λ.
pub fn verify_orthogonality<T: Real>(omega: &IntervalUnion<T>, lambda: &PeriodicSpectrum<T>, n: usize) -> T {
    let pts = lambda.first_n(n);
    let m = omega.measure();
    let mut worst = T::zero();
    for j in 0..pts.len() {
        for k in j + 1..pts.len() {
            worst = worst.max(exp_inner_product(omega, pts[j], pts[k]).norm() / m);
        }
    }
    worst
}

/// Functions with closed-form Fourier coefficients on Ω.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub enum TestFunction<T> {
    Exponential { freq: T },
    /// χ_{(a,b)} restricted to Ω.
    Indicator { a: T, b: T },
    /// Σ c_k t^k on Ω.
    Polynomial { coeffs: Vec<T> },
    /// Σ v_j χ_{(a_j, b_j)} with disjoint pieces, restricted to Ω.
    Step { pieces: Vec<(T, T, T)> },
    Sampled(SampledFunction<T>),
}

fn clip<T: Real>(omega: &IntervalUnion<T>, a: T, b: T) -> Vec<(T, T)> {
    omega
        .intervals()
        .iter()
        .filter_map(|&(x, y)| {
            let lo = x.max(a);
            let hi = y.min(b);
            (hi > lo).then_some((lo, hi))
        })
        .collect()
}

fn poly_eval<T: Real>(c: &[T], t: T) -> T {
    c.iter().rev().fold(T::zero(), |s, &v| s * t + v)
}

/// `∫_a^b P(t) e^{-2πiλt} dt`.
fn poly_exp_integral<T: Real>(c: &[T], lambda: T, a: T, b: T) -> Complex<T> {
    let w = T::two_pi() * lambda.abs() * (b - a);
    if w >= lit(2.0) {
        // antiderivative e^{zt} Σ_k (-1)^k P^{(k)}(t) / z^{k+1}, z = -2πiλ
        let z = Complex::new(T::zero(), -T::two_pi() * lambda);
        let mut deriv = c.to_vec();
        let mut zpow = z;
        let mut sign = T::one();
        let mut acc_b = c_zero();
        let mut acc_a = c_zero();
        while !deriv.is_empty() {
            acc_b += c_real(sign * poly_eval(&deriv, b)) / zpow;
            acc_a += c_real(sign * poly_eval(&deriv, a)) / zpow;
            deriv = deriv.iter().enumerate().skip(1).map(|(k, &v)| v * from_usize::<T>(k)).collect();
            zpow *= z;
            sign = -sign;
        }
        e2pi(-lambda * b) * acc_b - e2pi(-lambda * a) * acc_a
    } else {
        let (x, wts) = crate::quadrature::gauss_legendre::<T>(c.len() + 24);
        let half = (b - a) * lit(0.5);
        let mid = (a + b) * lit(0.5);
        x.iter().zip(&wts).fold(c_zero(), |s, (&xi, &wi)| {
            let t = mid + half * xi;
            s + e2pi(-lambda * t) * (wi * half * poly_eval(c, t))
        })
    }
}

/// `∫_a^b P(t)² dt` from the squared polynomial.
fn poly_square_integral<T: Real>(c: &[T], a: T, b: T) -> T {
    let mut sq = vec![T::zero(); 2 * c.len()];
    for (i, &x) in c.iter().enumerate() {
        for (j, &y) in c.iter().enumerate() {
            sq[i + j] += x * y;
        }
    }
    let anti: Vec<T> = std::iter::once(T::zero())
        .chain(sq.iter().enumerate().map(|(k, &v)| v / from_usize::<T>(k + 1)))
        .collect();
    poly_eval(&anti, b) - poly_eval(&anti, a)
}

impl<T: Real> TestFunction<T> {
    /// `⟨f, e_λ⟩_{L²(Ω)}`.
    pub fn coefficient(&self, omega: &IntervalUnion<T>, lambda: T) -> Complex<T> {
        match self {
            TestFunction::Exponential { freq } => exp_inner_product(omega, *freq, lambda),
            TestFunction::Indicator { a, b } => {
                clip(omega, *a, *b).into_iter().fold(c_zero(), |s, (x, y)| s + exp_integral(-lambda, x, y))
            }
            TestFunction::Polynomial { coeffs } => omega
                .intervals()
                .iter()
                .fold(c_zero(), |s, &(x, y)| s + poly_exp_integral(coeffs, lambda, x, y)),
            TestFunction::Step { pieces } => pieces.iter().fold(c_zero(), |s, &(a, b, v)| {
                s + clip(omega, a, b).into_iter().fold(c_zero(), |t, (x, y)| t + exp_integral(-lambda, x, y)) * v
            }),
            TestFunction::Sampled(f) => f.inner_with(|x| e2pi(lambda * x)),
        }
    }

    /// `‖f‖²_{L²(Ω)}`.
    pub fn norm_sqr(&self, omega: &IntervalUnion<T>) -> T {
        match self {
            TestFunction::Exponential { .. } => omega.measure(),
            TestFunction::Indicator { a, b } => clip(omega, *a, *b).into_iter().fold(T::zero(), |s, (x, y)| s + y - x),
            TestFunction::Polynomial { coeffs } => {
                omega.intervals().iter().fold(T::zero(), |s, &(x, y)| s + poly_square_integral(coeffs, x, y))
            }
            TestFunction::Step { pieces } => pieces.iter().fold(T::zero(), |s, &(a, b, v)| {
                s + v * v * clip(omega, a, b).into_iter().fold(T::zero(), |t, (x, y)| t + y - x)
            }),
            TestFunction::Sampled(f) => f.norm_sqr(),
        }
    }
}

/// `1 - Σ_{first n} |⟨f, e_λ⟩|² / (|Ω| ‖f‖²)`.
pub fn parseval_defect<T: Real>(
    omega: &IntervalUnion<T>,
    lambda: &PeriodicSpectrum<T>,
    f: &TestFunction<T>,
    n: usize,
) -> Result<T> {
    let nf = f.norm_sqr(omega);
    if !(nf > T::zero()) {
        return Err(SpectraError::ZeroFunction);
    }
    let s = lambda.first_n(n).into_iter().fold(T::zero(), |s, l| s + abs2(f.coefficient(omega, l)));
    Ok(T::one() - s / (omega.measure() * nf))
}

/// `1 - Σ_{λ∈points} |⟨f, e_λ⟩|² / (|Ω| ‖f‖²)` for an arbitrary finite point set.
pub fn parseval_defect_points<T: Real>(omega: &IntervalUnion<T>, points: &[T], f: &TestFunction<T>) -> Result<T> {
    let nf = f.norm_sqr(omega);
    if !(nf > T::zero()) {
        return Err(SpectraError::ZeroFunction);
    }
    let s = points.iter().fold(T::zero(), |s, &l| s + abs2(f.coefficient(omega, l)));
    Ok(T::one() - s / (omega.measure() * nf))
}

/// Defects at increasing truncations.
pub fn parseval_curve<T: Real>(
    omega: &IntervalUnion<T>,
    lambda: &PeriodicSpectrum<T>,
    f: &TestFunction<T>,
    ns: &[usize],
) -> Result<Vec<T>> {
    // coefficients are computed once for the largest truncation
    let nf = f.norm_sqr(omega);
    if !(nf > T::zero()) {
        return Err(SpectraError::ZeroFunction);
    }
    let nmax = ns.iter().copied().max().unwrap_or(0);
    let pts = lambda.first_n(nmax);
    let mut partial = Vec::with_capacity(pts.len() + 1);
    partial.push(T::zero());
    for l in pts {
        let last = *partial.last().unwrap();
        partial.push(last + abs2(f.coefficient(omega, l)));
    }
    let denom = omega.measure() * nf;
    Ok(ns.iter().map(|&n| T::one() - partial[n.min(partial.len() - 1)] / denom).collect())
}

/// Exactly `m/p`.
pub fn beurling_density<T: Real>(lambda: &PeriodicSpectrum<T>) -> T {
    from_usize::<T>(lambda.m()) / lambda.period()
}

/// Points in `[-T/2, T/2)` per unit length.
pub fn beurling_density_points<T: Real>(points: &[T], window: T) -> T {
    let h = window * lit(0.5);
    let c = points.iter().filter(|&&x| x >= -h && x < h).count();
    from_usize::<T>(c) / window
}

/// Whether `(e^{2πi a l})_{a∈A, l∈L} / √|A|` is unitary within `tol`.
pub fn finite_set_spectrum_check<T: Real>(a: &[T], l: &[T], tol: T) -> Result<bool> {
    if a.len() != l.len() {
        return Err(SpectraError::SizeMismatch(a.len(), l.len()));
    }
    let m = crate::boundary_matrices::exp_matrix(a, l);
    Ok(unitarity_defect(&m) <= tol)
}

/// Unit cells `(c/p, (c+1)/p)` making up a lattice-aligned Ω.
pub fn lattice_cells<T: Real>(omega: &IntervalUnion<T>, p: usize, tol: T) -> Result<Vec<i64>> {
    let pf = from_usize::<T>(p);
    let mut cells = Vec::new();
    for &(a, b) in omega.intervals() {
        let (pa, pb) = (a * pf, b * pf);
        if (pa - pa.round()).abs() > tol || (pb - pb.round()).abs() > tol {
            return Err(SpectraError::NotLatticeAligned(p as f64));
        }
        let (ia, ib) = (to_f64(pa.round()) as i64, to_f64(pb.round()) as i64);
        cells.extend(ia..ib);
    }
    Ok(cells)
}

/// All period-p spectra containing 0 whose representatives lie on the grid
/// `{k/q : 0 ≤ k < pq}`. Ω must have every endpoint in (1/p)Z.
pub fn lattice_spectrum_search<T: Real>(omega: &IntervalUnion<T>, p: usize, q: usize, tol: T) -> Result<Vec<PeriodicSpectrum<T>>> {
    if p == 0 || q == 0 {
        return Err(SpectraError::OutOfRange("p and q must be positive".into()));
    }
    let cells = lattice_cells(omega, p, lit(1e-9))?;
    let m = cells.len();
    let pq = p * q;
    let pf = from_usize::<T>(p);
    let qf = from_usize::<T>(q);
    // orth[d]: exponentials whose grid indices differ by d are orthogonal on the cells
    let orth: Vec<bool> = (0..pq)
        .map(|d| {
            let delta = from_usize::<T>(d) / qf;
            let s = cells.iter().fold(c_zero::<T>(), |s, &c| s + e2pi(from_i64::<T>(c) * delta / pf));
            s.norm() <= tol * from_usize::<T>(m)
        })
        .collect();
    let ok = |i: usize, j: usize| orth[(i + pq - j) % pq];
    let candidates: Vec<usize> = (1..pq).filter(|&k| ok(k, 0)).collect();
    let mut found: Vec<Vec<usize>> = Vec::new();
    let mut chosen = vec![0usize];
    fn extend(
        chosen: &mut Vec<usize>,
        cand: &[usize],
        m: usize,
        ok: &dyn Fn(usize, usize) -> bool,
        found: &mut Vec<Vec<usize>>,
    ) {
        if chosen.len() == m {
            found.push(chosen.clone());
            return;
        }
        if chosen.len() + cand.len() < m {
            return;
        }
        for (idx, &k) in cand.iter().enumerate() {
            let rest: Vec<usize> = cand[idx + 1..].iter().copied().filter(|&j| ok(j, k)).collect();
            chosen.push(k);
            extend(chosen, &rest, m, ok, found);
            chosen.pop();
        }
    }
    extend(&mut chosen, &candidates, m, &ok, &mut found);

    let a: Vec<T> = cells.iter().map(|&c| from_i64::<T>(c) / pf).collect();
    let mut out = Vec::new();
    for set in found {
        let reps: Vec<T> = set.iter().map(|&k| from_usize::<T>(k) / qf).collect();
        if !finite_set_spectrum_check(&a, &reps, lit(1e-9))? {
            continue;
        }
        let s = PeriodicSpectrum::new(&reps, pf)?;
        if verify_orthogonality(omega, &s, (4 * m).max(64)) <= lit(1e-9) && !out.contains(&s) {
            out.push(s);
        }
    }
    Ok(out)
}

/// Version tag of the Parseval test battery.
pub const BATTERY_VERSION: &str = "v1";

/// Truncations at which the battery is evaluated, scaled by `⌈|Ω|⌉`.
pub const BATTERY_TRUNCATIONS: [usize; 4] = [64, 128, 256, 512];

/// Largest accepted defect at the last truncation.
pub const BATTERY_THRESHOLD: f64 = 2e-2;

/// Indicators of the first half and first quarter of each component, `t`, `t²`,
/// and two seeded step functions with four steps per component.
pub fn standard_battery<T: Real>(omega: &IntervalUnion<T>) -> Vec<(String, TestFunction<T>)> {
    let mut out = Vec::new();
    for (i, &(a, b)) in omega.intervals().iter().enumerate() {
        let l = b - a;
        out.push((format!("indicator_half_{i}"), TestFunction::Indicator { a, b: a + l * lit(0.5) }));
        out.push((format!("indicator_quarter_{i}"), TestFunction::Indicator { a, b: a + l * lit(0.25) }));
    }
    out.push(("poly_t".into(), TestFunction::Polynomial { coeffs: vec![T::zero(), T::one()] }));
    out.push(("poly_t2".into(), TestFunction::Polynomial { coeffs: vec![T::zero(), T::zero(), T::one()] }));
    for seed in 0..2u64 {
        // small LCG so the battery is reproducible without extra dependencies
        let mut state = 0x9E37_79B9_7F4A_7C15u64 ^ (seed + 1);
        let mut next = || {
            state = state.wrapping_mul(6_364_136_223_846_793_005).wrapping_add(1_442_695_040_888_963_407);
            ((state >> 11) as f64) / ((1u64 << 53) as f64)
        };
        let mut pieces = Vec::new();
        for &(a, b) in omega.intervals() {
            let step = (b - a) / lit(4.0);
            for k in 0..4 {
                let lo = a + step * from_usize::<T>(k);
                pieces.push((lo, lo + step, lit::<T>(2.0 * next() - 1.0)));
            }
        }
        out.push((format!("step_random_{seed}"), TestFunction::Step { pieces }));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct ParsevalEntry<T> {
    pub label: String,
    pub truncations: Vec<usize>,
    pub defects: Vec<T>,
    pub decays: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct VerificationReport<T> {
    pub battery: String,
    pub gram_truncation: usize,
    pub gram_defect: T,
    /// Defect of each battery function at the largest truncation.
    pub parseval_defects: BTreeMap<String, T>,
    pub parseval_curves: Vec<ParsevalEntry<T>>,
    pub density_estimate: T,
    pub measure: T,
    pub passed: bool,
}

/// Orthogonality, density and the Parseval battery for a claimed spectrum.
pub fn verify_pair<T: Real>(omega: &IntervalUnion<T>, lambda: &PeriodicSpectrum<T>) -> Result<VerificationReport<T>> {
    let gram_truncation = (8 * lambda.m()).max(64);
    let gram_defect = verify_orthogonality(omega, lambda, gram_truncation);
    let density_estimate = beurling_density(lambda);
    let measure = omega.measure();
    let scale = to_f64(measure.ceil()).max(1.0) as usize;
    let ns: Vec<usize> = BATTERY_TRUNCATIONS.iter().map(|n| n * scale).collect();
    let mut curves = Vec::new();
    let mut finals = BTreeMap::new();
    let mut battery_ok = true;
    for (label, f) in standard_battery(omega) {
        let d = parseval_curve(omega, lambda, &f, &ns)?;
        let slack = lit::<T>(1e-12);
        let monotone = d.windows(2).all(|w| w[1] <= w[0] + slack);
        let last = *d.last().unwrap();
        let decays = monotone && last <= lit(BATTERY_THRESHOLD) && last >= -lit::<T>(1e-9);
        battery_ok &= decays;
        finals.insert(label.clone(), last);
        curves.push(ParsevalEntry { label, truncations: ns.clone(), defects: d, decays });
    }
    let passed = gram_defect <= lit(1e-9) && (density_estimate - measure).abs() <= lit(1e-9) && battery_ok;
    Ok(VerificationReport {
        battery: BATTERY_VERSION.into(),
        gram_truncation,
        gram_defect,
        parseval_defects: finals,
        parseval_curves: curves,
        density_estimate,
        measure,
        passed,
    })
}

/// Why [`full_pipeline`] rejected a seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub enum RejectReason<T> {
    /// `M_β M_α⁻¹` is not unitary.
    NotUnitary { defect: T },
    /// Some kernel of `I - M(λ)` is not `C·1`.
    NotSpectralMatrix { lambda: T, multiplicity: usize },
    /// No period `k/|Ω|` fits in the window.
    NoPeriod,
    /// The spectrum was found but failed verification.
    VerificationFailed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct SpectralPair<T> {
    pub spectrum: PeriodicSpectrum<T>,
    pub matrix: BoundaryMatrix<T>,
    pub report: VerificationReport<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct PipelineOutcome<T> {
    pub pair: Option<SpectralPair<T>>,
    pub reason: Option<RejectReason<T>>,
    pub diagnostics: Vec<String>,
}

impl<T: Real> PipelineOutcome<T> {
    pub fn succeeded(&self) -> bool {
        self.pair.as_ref().map_or(false, |p| p.report.passed)
    }

    fn reject(reason: RejectReason<T>, diagnostics: Vec<String>) -> Self {
        Self { pair: None, reason: Some(reason), diagnostics }
    }
}

/// Seed frequencies → `B = M_β M_α⁻¹` → Λ_B → period → verification.
pub fn full_pipeline<T: Real>(
    omega: &IntervalUnion<T>,
    seed: &[T],
    window: (T, T),
    opts: &SolverOptions<T>,
) -> Result<PipelineOutcome<T>> {
    let tol: &Tolerances<T> = &opts.tol;
    let mut diag = Vec::new();
    let cand = b_from_spectrum_points(omega, seed, tol)?;
    diag.push(format!("candidate unitarity defect {:e}", to_f64(cand.unitarity_defect)));
    if cand.warning.is_some() {
        return Ok(PipelineOutcome::reject(RejectReason::NotUnitary { defect: cand.unitarity_defect }, diag));
    }
    let mut out = pipeline_from_matrix(omega, cand.matrix, window, opts)?;
    diag.append(&mut out.diagnostics);
    out.diagnostics = diag;
    Ok(out)
}

/// The part of [`full_pipeline`] after the boundary matrix is known:
/// Λ_B → spectral-matrix test → period → verification.
pub fn pipeline_from_matrix<T: Real>(
    omega: &IntervalUnion<T>,
    b: BoundaryMatrix<T>,
    window: (T, T),
    opts: &SolverOptions<T>,
) -> Result<PipelineOutcome<T>> {
    let tol: &Tolerances<T> = &opts.tol;
    let mut diag = Vec::new();
    let verdict = is_spectral_matrix(&b, omega, window, opts)?;
    if let Some(w) = &verdict.witness {
        diag.push(format!("kernel at λ = {} has dimension {} or is not parallel to 1", to_f64(w.lambda), w.multiplicity));
        return Ok(PipelineOutcome::reject(
            RejectReason::NotSpectralMatrix { lambda: w.lambda, multiplicity: w.multiplicity },
            diag,
        ));
    }
    let pts: Vec<T> = verdict.points.iter().map(|p| p.lambda).collect();
    diag.push(format!("{} spectrum points in window", pts.len()));
    let set_tol = (tol.root * lit(10.0)).max(lit(1e-9));
    let Some(p) = detect_period(&pts, omega, &b, window, set_tol) else {
        return Ok(PipelineOutcome::reject(RejectReason::NoPeriod, diag));
    };
    diag.push(format!("period {}", to_f64(p)));
    let mut reps: Vec<T> = Vec::new();
    for &x in &pts {
        let r = x - (x / p).floor() * p;
        let r = if p - r <= set_tol { T::zero() } else { r };
        if !reps.iter().any(|&y| (y - r).abs() <= set_tol) {
            reps.push(r);
        }
    }
    let expected_m = to_f64((p * omega.measure()).round()) as usize;
    if reps.len() != expected_m {
        diag.push(format!("{} representatives, expected {}", reps.len(), expected_m));
        return Ok(PipelineOutcome::reject(RejectReason::VerificationFailed, diag));
    }
    let spectrum = PeriodicSpectrum::new(&reps, p)?;
    let report = verify_pair(omega, &spectrum)?;
    if !report.passed {
        diag.push(format!("verification failed: gram defect {:e}", to_f64(report.gram_defect)));
        let pair = SpectralPair { spectrum, matrix: b, report };
        return Ok(PipelineOutcome { pair: Some(pair), reason: Some(RejectReason::VerificationFailed), diagnostics: diag });
    }
    Ok(PipelineOutcome { pair: Some(SpectralPair { spectrum, matrix: b, report }), reason: None, diagnostics: diag })
}
