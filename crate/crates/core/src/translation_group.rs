//! The unitary group of local translations attached to a spectral pair with
//! period p on a set of measure 1.
//!
//! `W` sends f to the vector `(f(x + k_i(x)/p))_i` over the fiber Ω_x, and the
//! group acts on those vectors by `U_p(t)F(x) = M_x M_{x+t}* F(x+t)` with
//! `M_x = (e_{λ_j}(k_i(x)/p)) / √p`.

use nalgebra::Normed;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SpectraError};
use crate::interval_geometry::{fiber_breakpoints, fiber_set_nudged, is_p_tile, reduce_mod, IntervalUnion};
use crate::scalar::{c_real, c_zero, e2pi, from_i64, from_usize, lit, to_f64, unitarity_defect, CMat, CVec, Real};
use crate::spectral_pairs::{finite_set_spectrum_check, lattice_cells, verify_orthogonality, PeriodicSpectrum};
use crate::tolerance::Tolerances;

/// Values of an L²(Ω) function at cell midpoints of a uniform grid per component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct SampledFunction<T> {
    omega: IntervalUnion<T>,
    h: T,
    cells: Vec<usize>,
    values: Vec<Complex<T>>,
}

/// Cell counts `max(1, round(ℓ_i / h))`.
fn cell_counts<T: Real>(omega: &IntervalUnion<T>, h: T) -> Vec<usize> {
    omega.lengths().into_iter().map(|l| (to_f64((l / h).round()) as usize).max(1)).collect()
}

/// Lagrange interpolation through `(xs, ys)` at `x`.
fn lagrange<T: Real>(xs: &[T], ys: &[Complex<T>], x: T) -> Complex<T> {
    let mut s = c_zero();
    for i in 0..xs.len() {
        let mut w = T::one();
        for j in 0..xs.len() {
            if i != j {
                w *= (x - xs[j]) / (xs[i] - xs[j]);
            }
        }
        s += ys[i] * w;
    }
    s
}

/// Indices of the (up to) four nodes `lo..lo+4` of a uniform midpoint grid of
/// `count` nodes closest to the fractional position `u` (in node units).
fn stencil(u: f64, count: usize) -> (usize, usize) {
    let w = count.min(4);
    let j0 = u.floor() as i64 - 1;
    let lo = j0.clamp(0, (count - w) as i64) as usize;
    (lo, w)
}

impl<T: Real> SampledFunction<T> {
    pub fn from_fn(omega: &IntervalUnion<T>, h: T, f: impl Fn(T) -> Complex<T>) -> Self {
        let cells = cell_counts(omega, h);
        let mut values = Vec::with_capacity(cells.iter().sum());
        for (i, &n) in cells.iter().enumerate() {
            let (a, b) = omega.intervals()[i];
            let s = (b - a) / from_usize::<T>(n);
            for j in 0..n {
                values.push(f(a + s * (from_usize::<T>(j) + lit(0.5))));
            }
        }
        Self { omega: omega.clone(), h, cells, values }
    }

    /// Same grid as `self`, new values.
    pub fn with_values(&self, values: Vec<Complex<T>>) -> Result<Self> {
        if values.len() != self.values.len() {
            return Err(SpectraError::GridMismatch(format!("{} values for {} points", values.len(), self.values.len())));
        }
        Ok(Self { omega: self.omega.clone(), h: self.h, cells: self.cells.clone(), values })
    }

    pub fn omega(&self) -> &IntervalUnion<T> {
        &self.omega
    }

    pub fn step(&self) -> T {
        self.h
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `(x, weight, component)` for every sample, in storage order.
    pub fn nodes(&self) -> Vec<(T, T, usize)> {
        let mut out = Vec::with_capacity(self.values.len());
        for (i, &n) in self.cells.iter().enumerate() {
            let (a, b) = self.omega.intervals()[i];
            let s = (b - a) / from_usize::<T>(n);
            for j in 0..n {
                out.push((a + s * (from_usize::<T>(j) + lit(0.5)), s, i));
            }
        }
        out
    }

    pub fn points(&self) -> Vec<T> {
        self.nodes().into_iter().map(|n| n.0).collect()
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.cells == other.cells && self.omega == other.omega
    }

    fn check_grid(&self, other: &Self) -> Result<()> {
        if self.same_grid(other) {
            Ok(())
        } else {
            Err(SpectraError::GridMismatch("functions are sampled on different grids".into()))
        }
    }

    pub fn norm_sqr(&self) -> T {
        self.nodes().iter().zip(&self.values).fold(T::zero(), |s, (n, v)| s + n.1 * v.norm_sqr())
    }

    pub fn norm(&self) -> T {
        self.norm_sqr().sqrt()
    }

    /// `Σ w f(x) conj(g(x))`.
    pub fn inner_with(&self, g: impl Fn(T) -> Complex<T>) -> Complex<T> {
        self.nodes().iter().zip(&self.values).fold(c_zero(), |s, (n, v)| s + v * g(n.0).conj() * n.1)
    }

    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        self.check_grid(other)?;
        Ok(self
            .nodes()
            .iter()
            .zip(self.values.iter().zip(&other.values))
            .fold(c_zero(), |s, (n, (a, b))| s + a * b.conj() * n.1))
    }

    /// `‖self - other‖`.
    pub fn distance(&self, other: &Self) -> Result<T> {
        self.check_grid(other)?;
        Ok(self
            .nodes()
            .iter()
            .zip(self.values.iter().zip(&other.values))
            .fold(T::zero(), |s, (n, (a, b))| s + n.1 * (a - b).norm_sqr())
            .sqrt())
    }

    /// Cubic interpolation inside the component containing `x`; `None` outside Ω.
    /// Points within `tol` of an endpoint are clamped into the component.
    pub fn interpolate(&self, x: T) -> Option<Complex<T>> {
        let iv = self.omega.intervals();
        let i = self.omega.component_of(x).or_else(|| {
            let eps = self.h * lit(1e-9);
            iv.iter().position(|&(a, b)| x >= a - eps && x <= b + eps)
        })?;
        let (a, b) = iv[i];
        let n = self.cells[i];
        let s = (b - a) / from_usize::<T>(n);
        let off: usize = self.cells[..i].iter().sum();
        let u = to_f64((x - a) / s - lit(0.5));
        let (lo, w) = stencil(u, n);
        let xs: Vec<T> = (lo..lo + w).map(|j| a + s * (from_usize::<T>(j) + lit(0.5))).collect();
        Some(lagrange(&xs, &self.values[off + lo..off + lo + w], x))
    }

    /// Interpolated value, zero outside Ω.
    pub fn eval(&self, x: T) -> Complex<T> {
        self.interpolate(x).unwrap_or_else(c_zero)
    }

    /// CSV with header `x,re,im`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,re,im\n");
        for (n, v) in self.nodes().iter().zip(&self.values) {
            s.push_str(&format!("{},{},{}\n", n.0, v.re, v.im));
        }
        s
    }

    /// Reads `x,re,im` rows; the x column must match the grid of `(omega, h)`.
    pub fn from_csv(omega: &IntervalUnion<T>, h: T, text: &str) -> Result<Self> {
        let template = Self::from_fn(omega, h, |_| c_zero());
        let pts = template.points();
        let mut vals = Vec::with_capacity(pts.len());
        let mut rows = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let mut first = rows.next();
        if first.map_or(false, |l| l.starts_with('x')) {
            first = rows.next();
        }
        for (k, line) in first.into_iter().chain(rows).enumerate() {
            let parts: Vec<&str> = line.split(',').map(str::trim).collect();
            if parts.len() < 3 {
                return Err(SpectraError::GridMismatch(format!("row {k}: expected x,re,im")));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|e| SpectraError::GridMismatch(format!("row {k}: {e}")));
            let (x, re, im) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
            let Some(&px) = pts.get(k) else {
                return Err(SpectraError::GridMismatch(format!("more than {} rows", pts.len())));
            };
            if (x - to_f64(px)).abs() > 1e-9 * (1.0 + x.abs()) {
                return Err(SpectraError::GridMismatch(format!("row {k}: x = {x}, grid expects {}", to_f64(px))));
            }
            vals.push(Complex::new(lit(re), lit(im)));
        }
        if vals.len() != pts.len() {
            return Err(SpectraError::GridMismatch(format!("{} rows for {} grid points", vals.len(), pts.len())));
        }
        template.with_values(vals)
    }
}

/// An Ω_x-constant piece `[start, end)` of `[0, 1/p)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Stratum<T> {
    pub start: T,
    pub end: T,
    pub fiber: Vec<i64>,
    /// `M_x` for x in the stratum: rows follow the fiber, columns the representatives.
    #[serde(with = "crate::serde_util::cmat")]
    pub m: CMat<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct TranslationGroup<T> {
    omega: IntervalUnion<T>,
    spectrum: PeriodicSpectrum<T>,
    p: usize,
    strata: Vec<Stratum<T>>,
    /// Measure of the input set; the group lives on Ω/|Ω| with spectrum |Ω|Λ.
    rescale: T,
    boundary_tol: T,
}

/// `(e_{λ_j}(k_i/p)) / √p`.
pub fn fiber_matrix<T: Real>(fiber: &[i64], reps: &[T], p: T) -> CMat<T> {
    let r = T::one() / from_usize::<T>(reps.len()).sqrt();
    CMat::from_fn(fiber.len(), reps.len(), |i, j| e2pi(reps[j] * from_i64::<T>(fiber[i]) / p) * c_real(r))
}

/// Builds the group for a spectral pair. Sets with `|Ω| ≠ 1` are rescaled to
/// measure 1 (Ω/|Ω|, |Ω|Λ); sample functions on [`TranslationGroup::omega`].
pub fn build_group<T: Real>(
    omega: &IntervalUnion<T>,
    lambda: &PeriodicSpectrum<T>,
    tol: &Tolerances<T>,
) -> Result<TranslationGroup<T>> {
    let meas = omega.measure();
    let (om, sp) = if (meas - T::one()).abs() > lit(1e-12) {
        (omega.scale(T::one() / meas), lambda.scaled(meas)?)
    } else {
        (omega.clone(), lambda.clone())
    };
    let pf = sp.period();
    let p = to_f64(pf.round()) as usize;
    if p == 0 || (pf - pf.round()).abs() > lit(1e-9) || sp.m() != p {
        return Err(SpectraError::NotASpectrum(format!(
            "period {} with {} representatives on a set of measure 1",
            to_f64(pf),
            sp.m()
        )));
    }
    let pf = from_usize::<T>(p);
    if !is_p_tile(&om, p, 4096, tol.boundary)? {
        return Err(SpectraError::NotPTile(p));
    }
    let g = verify_orthogonality(&om, &sp, (8 * p).max(64));
    if g > lit(1e-8) {
        return Err(SpectraError::NotASpectrum(format!("Gram defect {:e}", to_f64(g))));
    }
    let bps = fiber_breakpoints(&om, pf, tol.boundary);
    let mut strata = Vec::new();
    for w in bps.windows(2) {
        let mid = (w[0] + w[1]) * lit(0.5);
        let fiber = fiber_set_nudged(&om, pf, mid, tol.boundary).members;
        let a: Vec<T> = fiber.iter().map(|&k| from_i64::<T>(k) / pf).collect();
        if !finite_set_spectrum_check(&a, sp.reps(), lit(1e-8))? {
            return Err(SpectraError::NotASpectrum(format!(
                "representatives are not a spectrum of the fiber {fiber:?}/{p}"
            )));
        }
        let m = fiber_matrix(&fiber, sp.reps(), pf);
        let d = unitarity_defect(&m);
        if !(d <= tol.unitarity.max(lit(1e-9))) {
            return Err(SpectraError::NotASpectrum(format!("M_x not unitary (defect {:e})", to_f64(d))));
        }
        strata.push(Stratum { start: w[0], end: w[1], fiber, m });
    }
    Ok(TranslationGroup { omega: om, spectrum: sp, p, strata, rescale: meas, boundary_tol: tol.boundary })
}

/// Vector-valued function on `[0, 1/p)` sampled at cell midpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct FiberSampled<T> {
    pub p: usize,
    pub step: T,
    pub xs: Vec<T>,
    #[serde(with = "crate::serde_util::cvecs")]
    pub values: Vec<CVec<T>>,
}

impl<T: Real> FiberSampled<T> {
    pub fn norm_sqr(&self) -> T {
        self.values.iter().fold(T::zero(), |s, v| s + self.step * v.iter().fold(T::zero(), |t, z| t + z.norm_sqr()))
    }
}

impl<T: Real> TranslationGroup<T> {
    pub fn omega(&self) -> &IntervalUnion<T> {
        &self.omega
    }

    pub fn spectrum(&self) -> &PeriodicSpectrum<T> {
        &self.spectrum
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn strata(&self) -> &[Stratum<T>] {
        &self.strata
    }

    /// Measure of the set the group was built from (1 when no rescaling happened).
    pub fn rescale(&self) -> T {
        self.rescale
    }

    fn pf(&self) -> T {
        from_usize::<T>(self.p)
    }

    fn fiber(&self, x: T) -> Vec<i64> {
        fiber_set_nudged(&self.omega, self.pf(), x, self.boundary_tol).members
    }

    /// `M_x` at an arbitrary real x.
    pub fn m_at(&self, x: T) -> CMat<T> {
        fiber_matrix(&self.fiber(x), self.spectrum.reps(), self.pf())
    }

    fn check(&self, f: &SampledFunction<T>) -> Result<()> {
        if f.omega() != &self.omega {
            return Err(SpectraError::GridMismatch("function is not sampled on the group's set".into()));
        }
        Ok(())
    }

    /// `(Wf)(x) = (f(x + k_i(x)/p))_i` on a midpoint grid of `[0, 1/p)` with the step of f.
    pub fn apply_w(&self, f: &SampledFunction<T>) -> Result<FiberSampled<T>> {
        self.check(f)?;
        let pf = self.pf();
        let cell = T::one() / pf;
        let n = (to_f64((cell / f.step()).round()) as usize).max(1);
        let step = cell / from_usize::<T>(n);
        let mut xs = Vec::with_capacity(n);
        let mut values = Vec::with_capacity(n);
        for j in 0..n {
            let x = step * (from_usize::<T>(j) + lit(0.5));
            let fib = self.fiber(x);
            values.push(CVec::from_iterator(fib.len(), fib.iter().map(|&k| f.eval(x + from_i64::<T>(k) / pf))));
            xs.push(x);
        }
        Ok(FiberSampled { p: self.p, step, xs, values })
    }

    /// Inverse of [`apply_w`](Self::apply_w), sampled on the grid of `template`.
    /// Interpolates within strata only.
    pub fn apply_w_inverse(&self, big_f: &FiberSampled<T>, template: &SampledFunction<T>) -> Result<SampledFunction<T>> {
        self.check(template)?;
        if big_f.p != self.p {
            return Err(SpectraError::GridMismatch("fiber function has a different period".into()));
        }
        let pf = self.pf();
        let mut vals = Vec::with_capacity(template.len());
        for (y, _, _) in template.nodes() {
            let (x, a) = reduce_mod(y, pf);
            let fib = self.fiber(x);
            let Some(i) = fib.iter().position(|&k| k == a) else {
                vals.push(c_zero());
                continue;
            };
            let s = self.strata.iter().position(|s| x >= s.start && x < s.end).unwrap_or(self.strata.len() - 1);
            let (lo, hi) = (self.strata[s].start, self.strata[s].end);
            // nodes of the fiber grid inside this stratum
            let idx: Vec<usize> = (0..big_f.xs.len()).filter(|&j| big_f.xs[j] >= lo && big_f.xs[j] < hi).collect();
            if idx.is_empty() {
                vals.push(c_zero());
                continue;
            }
            let u = to_f64((x - big_f.xs[idx[0]]) / big_f.step);
            let (l0, w) = stencil(u, idx.len());
            let xs: Vec<T> = idx[l0..l0 + w].iter().map(|&j| big_f.xs[j]).collect();
            let ys: Vec<Complex<T>> = idx[l0..l0 + w].iter().map(|&j| big_f.values[j][i]).collect();
            vals.push(lagrange(&xs, &ys, x));
        }
        template.with_values(vals)
    }

    /// `U(t)f`, evaluated pointwise through `M_y M_{y+t}* (Wf)(y+t)`.
    pub fn apply_u(&self, t: T, f: &SampledFunction<T>) -> Result<SampledFunction<T>> {
        self.check(f)?;
        let pf = self.pf();
        let reps = self.spectrum.reps();
        let inv_p = T::one() / pf;
        let mut out = Vec::with_capacity(f.len());
        for (y, _, _) in f.nodes() {
            let z = y + t;
            let fz = self.fiber(z);
            // row of M_y at k = 0 is (1/√p)(1, …, 1), so the row of M_y M_z* at k = 0
            // is (1/p) Σ_j e^{-2πiλ_j k_b/p}
            let mut v = c_zero();
            for &k in &fz {
                let kk = from_i64::<T>(k) / pf;
                let r = reps.iter().fold(c_zero::<T>(), |s, &l| s + e2pi(-l * kk)) * inv_p;
                v += r * f.eval(z + kk);
            }
            out.push(v);
        }
        f.with_values(out)
    }

    /// Largest `|(U(t)f)(x) - f(x+t)|` over samples x with x and x+t at least
    /// `margin` inside Ω. Zero when no sample qualifies.
    pub fn local_translation_defect(&self, t: T, f: &SampledFunction<T>, margin: T) -> Result<T> {
        let u = self.apply_u(t, f)?;
        let mut worst = T::zero();
        for ((y, _, _), v) in f.nodes().into_iter().zip(u.values()) {
            let z = y + t;
            if self.omega.contains(z) && self.omega.boundary_distance(z) >= margin && self.omega.boundary_distance(y) >= margin {
                worst = worst.max((v - f.eval(z)).norm());
            }
        }
        Ok(worst)
    }

    /// `‖U(s)U(t)f - U(s+t)f‖ / ‖f‖`.
    pub fn group_law_defect(&self, s: T, t: T, f: &SampledFunction<T>) -> Result<T> {
        let lhs = self.apply_u(s, &self.apply_u(t, f)?)?;
        let rhs = self.apply_u(s + t, f)?;
        Ok(lhs.distance(&rhs)? / f.norm())
    }

    /// `‖U(t)f‖ / ‖f‖ - 1`.
    pub fn unitarity_defect(&self, t: T, f: &SampledFunction<T>) -> Result<T> {
        Ok((self.apply_u(t, f)?.norm() / f.norm() - T::one()).abs())
    }
}

/// `P(λ_i + pZ) f(x) = e_{λ_i}(x) (1/p) Σ_j f(x + j/p) e_{-λ_i}(x + j/p)`.
pub fn projection_p<T: Real>(omega: &IntervalUnion<T>, p: usize, lambda_i: T, f: &SampledFunction<T>, tol: T) -> Result<SampledFunction<T>> {
    let m = omega.measure();
    if (m - T::one()).abs() > lit(1e-9) {
        return Err(SpectraError::UnnormalizedMeasure(to_f64(m)));
    }
    if f.omega() != omega {
        return Err(SpectraError::GridMismatch("function is not sampled on this set".into()));
    }
    let pf = from_usize::<T>(p);
    let mut out = Vec::with_capacity(f.len());
    for (y, _, _) in f.nodes() {
        let fib = fiber_set_nudged(omega, pf, y, tol).members;
        let s = fib.iter().fold(c_zero::<T>(), |s, &k| {
            let z = y + from_i64::<T>(k) / pf;
            s + f.eval(z) * e2pi(-lambda_i * z)
        });
        out.push(e2pi(lambda_i * y) * s / c_real(pf));
    }
    f.with_values(out)
}

/// Explicit form for Ω a union of p cells `(c_i/p, (c_i+1)/p)`:
/// `(U(t)f)(x + c_i/p) = Σ_j (B^{a(x+t)})_{ij} f([x+t]_p + c_j/p)` with
/// `B = M_α D(λ) M_α*`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct LatticeGroup<T> {
    omega: IntervalUnion<T>,
    cells: Vec<i64>,
    reps: Vec<T>,
    p: usize,
    #[serde(with = "crate::serde_util::cmat")]
    m_alpha: CMat<T>,
}

/// `M_α = (e^{2πi c_i λ_j / p}) / √p`.
pub fn lattice_m_alpha<T: Real>(cells: &[i64], reps: &[T], p: usize) -> CMat<T> {
    fiber_matrix(cells, reps, from_usize::<T>(p))
}

/// `B = M_α D(λ) M_α*` with `D(λ) = diag(e^{2πiλ_j/p})`.
pub fn lattice_boundary_matrix<T: Real>(cells: &[i64], reps: &[T], p: usize) -> CMat<T> {
    lattice_power(&lattice_m_alpha(cells, reps, p), reps, p, 1)
}

fn lattice_power<T: Real>(ma: &CMat<T>, reps: &[T], p: usize, a: i64) -> CMat<T> {
    let pf = from_usize::<T>(p);
    let n = reps.len();
    let d = CMat::from_fn(n, n, |i, j| if i == j { e2pi(reps[i] * from_i64::<T>(a) / pf) } else { c_zero() });
    ma * d * ma.adjoint()
}

impl<T: Real> LatticeGroup<T> {
    pub fn new(omega: &IntervalUnion<T>, lambda: &PeriodicSpectrum<T>, tol: &Tolerances<T>) -> Result<Self> {
        let pf = lambda.period();
        let p = to_f64(pf.round()) as usize;
        if p == 0 || (pf - pf.round()).abs() > lit(1e-9) {
            return Err(SpectraError::NotLatticeAligned(to_f64(pf)));
        }
        let cells = lattice_cells(omega, p, lit(1e-9))?;
        if cells.len() != p || lambda.m() != p {
            return Err(SpectraError::NotASpectrum(format!("{} cells, {} representatives, period {p}", cells.len(), lambda.m())));
        }
        let m_alpha = lattice_m_alpha(&cells, lambda.reps(), p);
        let d = unitarity_defect(&m_alpha);
        if !(d <= tol.unitarity.max(lit(1e-9))) {
            return Err(SpectraError::NotASpectrum(format!("M_alpha not unitary (defect {:e})", to_f64(d))));
        }
        Ok(Self { omega: omega.clone(), cells, reps: lambda.reps().to_vec(), p, m_alpha })
    }

    pub fn cells(&self) -> &[i64] {
        &self.cells
    }

    pub fn boundary_matrix(&self) -> CMat<T> {
        lattice_power(&self.m_alpha, &self.reps, self.p, 1)
    }

    /// `B^a` computed as `M_α D(λ)^a M_α*`, exact for negative a as well.
    pub fn b_power(&self, a: i64) -> CMat<T> {
        lattice_power(&self.m_alpha, &self.reps, self.p, a)
    }

    pub fn apply_u(&self, t: T, f: &SampledFunction<T>) -> Result<SampledFunction<T>> {
        if f.omega() != &self.omega {
            return Err(SpectraError::GridMismatch("function is not sampled on the group's set".into()));
        }
        let pf = from_usize::<T>(self.p);
        let mut cache: Vec<(i64, CMat<T>)> = Vec::new();
        let mut out = Vec::with_capacity(f.len());
        for (y, _, _) in f.nodes() {
            let (x, c) = reduce_mod(y, pf);
            let Some(i) = self.cells.iter().position(|&k| k == c) else {
                out.push(c_zero());
                continue;
            };
            let (xt, a) = reduce_mod(x + t, pf);
            let bp = match cache.iter().find(|e| e.0 == a) {
                Some(e) => e.1.clone(),
                None => {
                    let m = self.b_power(a);
                    cache.push((a, m.clone()));
                    m
                }
            };
            let v = (0..self.p).fold(c_zero::<T>(), |s, j| s + bp[(i, j)] * f.eval(xt + from_i64::<T>(self.cells[j]) / pf));
            out.push(v);
        }
        f.with_values(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c_one;

    #[test]
    fn samples_and_interpolation() {
        let o = IntervalUnion::new(&[(0.0, 0.5), (1.5, 2.0)]).unwrap();
        let f = SampledFunction::from_fn(&o, 0.01, |x| Complex::new(x * x * x, -x));
        assert_eq!(f.len(), 100);
        let x = 1.7373;
        let v = f.interpolate(x).unwrap();
        assert!((v - Complex::new(x * x * x, -x)).norm() < 1e-12);
        assert!(f.interpolate(1.0).is_none());
        let csv = f.to_csv();
        let g = SampledFunction::from_csv(&o, 0.01, &csv).unwrap();
        assert!(f.distance(&g).unwrap() < 1e-12);
        assert!(SampledFunction::<f64>::from_csv(&o, 0.02, &csv).is_err());
    }

    #[test]
    fn unit_interval_group() {
        let o = IntervalUnion::new(&[(0.0, 1.0)]).unwrap();
        let g = build_group(&o, &PeriodicSpectrum::integers(), &Tolerances::default()).unwrap();
        assert_eq!(g.strata().len(), 1);
        assert!((g.strata()[0].m[(0, 0)] - c_one()).norm() < 1e-15);
        let f = SampledFunction::from_fn(&o, 1e-3, |x: f64| Complex::new((x * 7.0).sin(), x));
        let u = g.apply_u(0.3, &f).unwrap();
        for ((y, _, _), v) in f.nodes().into_iter().zip(u.values()) {
            let z = (y + 0.3) % 1.0;
            assert!((v - f.eval(z)).norm() < 1e-9, "{y}");
        }
    }

    #[test]
    fn not_a_tile() {
        let o = IntervalUnion::new(&[(0.0, 0.3), (0.5, 1.2)]).unwrap();
        let s = PeriodicSpectrum::new(&[0.0, 0.5], 2.0).unwrap();
        assert!(matches!(build_group(&o, &s, &Tolerances::default()), Err(SpectraError::NotPTile(2))));
    }
}
