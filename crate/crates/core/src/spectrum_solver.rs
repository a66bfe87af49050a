//! Atomic spectrum Λ_B: real zeros of `det(I - M(λ))` with
//! `M(λ) = D_β(λ)* B D_α(λ)`.
//!
//! Eigenphases of M(λ) decrease with slope in `[-2π max ℓ_i, -2π min ℓ_i]` and
//! `det M(λ) = det B · e^{-2πiλ|Ω|}`. So the number of eigenvalues passing
//! through 1 on `[x, y)` is an exact function of the eigenphases at x and y:
//! `(Σφ(x) - Σφ(y) + 2π|Ω|(y - x)) / 2π` with phases taken in `[0, 2π)`.

use nalgebra::Normed;
use serde::{Deserialize, Serialize};

use crate::boundary_matrices::{diag_phase, BoundaryMatrix};
use crate::error::{Result, SpectraError};
use crate::interval_geometry::IntervalUnion;
use crate::linalg::{eigenphases, numerical_kernel, right_singular, vnorm, wrap_phase};
use crate::scalar::{c_real, from_usize, lit, to_f64, unitarity_defect, CMat, CVec, Real};
use crate::tolerance::Tolerances;

/// `M(λ) = D_β(λ)* B D_α(λ)`.
pub fn char_matrix<T: Real>(b: &BoundaryMatrix<T>, omega: &IntervalUnion<T>, lambda: T) -> CMat<T> {
    let da = diag_phase(&omega.alphas(), lambda);
    let db = diag_phase(&omega.betas(), lambda);
    db.adjoint() * b.matrix() * da
}

/// A point of Λ_B with its multiplicity and an orthonormal kernel basis of `I - M(λ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct SpectrumPoint<T> {
    pub lambda: T,
    pub multiplicity: usize,
    #[serde(with = "crate::serde_util::cvecs")]
    pub kernel: Vec<CVec<T>>,
}

/// `Σ_i c_i χ_{J_i}(t) e^{2πiλt}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct StepExponential<T> {
    pub lambda: T,
    #[serde(with = "crate::serde_util::cvec")]
    pub coeffs: CVec<T>,
}

impl<T: Real> StepExponential<T> {
    pub fn eval(&self, omega: &IntervalUnion<T>, t: T) -> num_complex::Complex<T> {
        match omega.component_of(t) {
            Some(i) => self.coeffs[i] * crate::scalar::e2pi(self.lambda * t),
            None => c_real(T::zero()),
        }
    }

    /// `‖B f(α) - f(β)‖`.
    pub fn boundary_residual(&self, b: &BoundaryMatrix<T>, omega: &IntervalUnion<T>) -> T {
        let fa = diag_phase(&omega.alphas(), self.lambda) * &self.coeffs;
        let fb = diag_phase(&omega.betas(), self.lambda) * &self.coeffs;
        vnorm(&(b.matrix() * fa - fb))
    }
}

/// Options for [`solve_spectrum`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct SolverOptions<T> {
    pub tol: Tolerances<T>,
    /// Scan step; defaults to `1 / (4 max ℓ_i)`.
    pub grid_step: Option<T>,
}

impl<T: Real> Default for SolverOptions<T> {
    fn default() -> Self {
        Self { tol: Tolerances::default(), grid_step: None }
    }
}

/// Default scan step: every eigenphase moves by at most π/2 per step.
pub fn default_step<T: Real>(omega: &IntervalUnion<T>) -> T {
    T::one() / (lit::<T>(4.0) * omega.max_len())
}

struct Scanner<'a, T: Real> {
    b: &'a BoundaryMatrix<T>,
    omega: &'a IntervalUnion<T>,
    measure: T,
    snap: T,
}

impl<'a, T: Real> Scanner<'a, T> {
    fn new(b: &'a BoundaryMatrix<T>, omega: &'a IntervalUnion<T>, tol: &Tolerances<T>) -> Self {
        // Phases this close below 2π belong to a root within tol/100 of the node:
        // snap them to 0 so the node owns the root (half-open [a, b) convention).
        let snap = T::two_pi() * omega.min_len() * tol.root * lit(1e-2);
        Self { b, omega, measure: omega.measure(), snap }
    }

    fn phases(&self, x: T) -> Result<Vec<T>> {
        let mut ph = eigenphases(&char_matrix(self.b, self.omega, x))?;
        for v in ph.iter_mut() {
            if *v > T::two_pi() - self.snap {
                *v = T::zero();
            }
        }
        ph.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(ph)
    }

    fn raw_count(&self, x: T, px: &[T], y: T, py: &[T]) -> T {
        let sx = px.iter().fold(T::zero(), |s, v| s + *v);
        let sy = py.iter().fold(T::zero(), |s, v| s + *v);
        (sy - sx + T::two_pi() * self.measure * (y - x)) / T::two_pi()
    }

    fn count(&self, x: T, px: &[T], y: T, py: &[T]) -> Result<i64> {
        let r = self.raw_count(x, px, y, py);
        let k = r.round();
        if (r - k).abs() > lit(0.25) {
            return Err(SpectraError::Numerical(format!("winding count {} is not near an integer", to_f64(r))));
        }
        Ok(to_f64(k) as i64)
    }
}

/// Number of wraps through phase 0 along the best cyclic matching of sorted
/// phases between two nodes. Independent of the determinant count; the two must agree.
fn tracked_wraps<T: Real>(px: &[T], py: &[T], max_move: T) -> Option<i64> {
    let n = px.len();
    let mut best: Option<(T, i64)> = None;
    for s in 0..n {
        let mut cost = T::zero();
        let mut wraps = 0;
        let mut ok = true;
        for j in 0..n {
            let target = py[(j + n - s) % n];
            let d = wrap_phase(px[j] - target);
            if d > max_move {
                ok = false;
                break;
            }
            if px[j] < d {
                wraps += 1;
            }
            cost += d;
        }
        if ok && best.map_or(true, |(c, _)| cost < c) {
            best = Some((cost, wraps));
        }
    }
    best.map(|(_, w)| w)
}

/// Number of points of Λ_B in `[a, b)` counted with multiplicity, from the
/// determinant winding alone.
pub fn winding_count<T: Real>(b: &BoundaryMatrix<T>, omega: &IntervalUnion<T>, a: T, bb: T, tol: &Tolerances<T>) -> Result<i64> {
    let sc = Scanner::new(b, omega, tol);
    let h = default_step(omega);
    let mut x = a;
    let mut px = sc.phases(a)?;
    let mut total = 0;
    while x < bb {
        let y = (x + h).min(bb);
        let py = sc.phases(y)?;
        total += sc.count(x, &px, y, &py)?;
        x = y;
        px = py;
    }
    Ok(total)
}

/// All points of Λ_B in the half-open window `[a, b)`, sorted.
pub fn solve_spectrum<T: Real>(
    b: &BoundaryMatrix<T>,
    omega: &IntervalUnion<T>,
    window: (T, T),
    opts: &SolverOptions<T>,
) -> Result<Vec<SpectrumPoint<T>>> {
    let (a, bb) = window;
    if !(bb > a) {
        return Err(SpectraError::OutOfRange(format!("empty window [{}, {})", to_f64(a), to_f64(bb))));
    }
    if b.n() != omega.n() {
        return Err(SpectraError::SizeMismatch(b.n(), omega.n()));
    }
    let tol = &opts.tol;
    let d = unitarity_defect(b.matrix());
    if !(d <= tol.unitarity) {
        return Err(SpectraError::NonUnitaryInput(to_f64(d)));
    }
    let sc = Scanner::new(b, omega, tol);
    let h = opts.grid_step.unwrap_or_else(|| default_step(omega));
    if !(h > T::zero()) {
        return Err(SpectraError::OutOfRange("grid step must be positive".into()));
    }
    // Maximal phase move per step, with slack for rounding.
    let max_move = T::two_pi() * omega.max_len() * h * lit(1.01) + lit(1e-9);
    if max_move >= T::pi() {
        return Err(SpectraError::OutOfRange("grid step too coarse for phase tracking".into()));
    }
    let width = tol.root * lit(1e-2);

    let mut brackets: Vec<(T, Vec<T>, T, Vec<T>, i64)> = Vec::new();
    let mut x = a;
    let mut px = sc.phases(a)?;
    let mut expected = 0i64;
    let mut tracked = 0i64;
    while x < bb {
        let y = (x + h).min(bb);
        let py = sc.phases(y)?;
        let c = sc.count(x, &px, y, &py)?;
        let w = tracked_wraps(&px, &py, max_move).unwrap_or(-1);
        expected += c;
        tracked += w;
        if w != c {
            return Err(SpectraError::WindingMismatch { found: tracked, expected, a: to_f64(a), b: to_f64(bb) });
        }
        if c > 0 {
            brackets.push((x, px.clone(), y, py.clone(), c));
        }
        x = y;
        px = py;
    }

    let mut out = Vec::new();
    let mut stack = brackets;
    stack.reverse();
    while let Some((lo, plo, hi, phi, c)) = stack.pop() {
        if hi - lo <= width {
            let lam = lo + (hi - lo) * lit(0.5);
            out.push(point_at(b, omega, lam, c as usize));
            continue;
        }
        let mid = lo + (hi - lo) * lit(0.5);
        let pm = sc.phases(mid)?;
        let cl = sc.count(lo, &plo, mid, &pm)?;
        let cr = c - cl;
        if cl < 0 || cr < 0 {
            return Err(SpectraError::WindingMismatch { found: cl, expected: c, a: to_f64(lo), b: to_f64(hi) });
        }
        // push right first so the left half is processed first
        if cr > 0 {
            stack.push((mid, pm.clone(), hi, phi, cr));
        }
        if cl > 0 {
            stack.push((lo, plo, mid, pm, cl));
        }
    }
    out.sort_by(|p, q| p.lambda.partial_cmp(&q.lambda).unwrap());
    let found: i64 = out.iter().map(|p| p.multiplicity as i64).sum();
    if found != expected {
        return Err(SpectraError::WindingMismatch { found, expected, a: to_f64(a), b: to_f64(bb) });
    }
    Ok(out)
}

fn point_at<T: Real>(b: &BoundaryMatrix<T>, omega: &IntervalUnion<T>, lambda: T, mult: usize) -> SpectrumPoint<T> {
    let n = omega.n();
    let a = CMat::identity(n, n) - char_matrix(b, omega, lambda);
    let (_, vecs) = right_singular(&a);
    let kernel = vecs.into_iter().rev().take(mult).map(canonical_phase).collect();
    SpectrumPoint { lambda, multiplicity: mult, kernel }
}

/// Rotates a vector so that its largest entry is real and positive.
fn canonical_phase<T: Real>(v: CVec<T>) -> CVec<T> {
    let mut k = 0;
    for i in 0..v.len() {
        if v[i].norm_sqr() > v[k].norm_sqr() + lit(1e-12) {
            k = i;
        }
    }
    let z = v[k];
    let r = z.norm();
    if r == T::zero() {
        return v;
    }
    let rot = z.conj() / r;
    v.map(|e| e * rot)
}

/// Eigenfunctions of the extension at λ: step exponentials from the
/// numerical kernel of `I - M(λ)` (singular values ≤ `kernel · n`).
pub fn eigenspace<T: Real>(
    b: &BoundaryMatrix<T>,
    omega: &IntervalUnion<T>,
    lambda: T,
    tol: &Tolerances<T>,
) -> Result<Vec<StepExponential<T>>> {
    let n = omega.n();
    let a = CMat::identity(n, n) - char_matrix(b, omega, lambda);
    let (ker, _) = numerical_kernel(&a, tol.kernel * from_usize::<T>(n));
    if ker.is_empty() {
        return Err(SpectraError::NotAnEigenvalue(to_f64(lambda)));
    }
    Ok(ker.into_iter().map(|c| StepExponential { lambda, coeffs: canonical_phase(c) }).collect())
}

/// `sin` of the angle between `v` and the all-ones vector.
pub fn angle_to_ones<T: Real>(v: &CVec<T>) -> T {
    let n = v.len();
    let nv = vnorm(v);
    if nv == T::zero() {
        return T::one();
    }
    let mean = v.iter().fold(c_real(T::zero()), |s, z| s + z) / c_real(from_usize::<T>(n));
    let perp = v.map(|z| z - mean);
    vnorm(&perp) / nv
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct SpectralMatrixVerdict<T> {
    pub spectral: bool,
    /// First point whose kernel is not `C·1`.
    pub witness: Option<SpectrumPoint<T>>,
    pub points: Vec<SpectrumPoint<T>>,
}

/// True iff every kernel in the window is trivial or spanned by the all-ones vector.
pub fn is_spectral_matrix<T: Real>(
    b: &BoundaryMatrix<T>,
    omega: &IntervalUnion<T>,
    window: (T, T),
    opts: &SolverOptions<T>,
) -> Result<SpectralMatrixVerdict<T>> {
    let points = solve_spectrum(b, omega, window, opts)?;
    let witness = points
        .iter()
        .find(|p| p.multiplicity != 1 || angle_to_ones(&p.kernel[0]) > opts.tol.parallel)
        .cloned();
    Ok(SpectralMatrixVerdict { spectral: witness.is_none(), witness, points })
}

/// Smallest `p = k/|Ω|` (with `p ≤ window length / 3`) under which the points
/// are invariant on the overlap and `B D_α(p) = D_β(p) B`.
pub fn detect_period<T: Real>(
    points: &[T],
    omega: &IntervalUnion<T>,
    b: &BoundaryMatrix<T>,
    window: (T, T),
    tol: T,
) -> Option<T> {
    let (a, bb) = window;
    let len = bb - a;
    let m = omega.measure();
    let near = |x: T| points.iter().any(|&y| (y - x).abs() <= tol);
    let mut k = 1usize;
    loop {
        let p = from_usize::<T>(k) / m;
        if p > len / lit(3.0) {
            return None;
        }
        let fwd = points.iter().filter(|&&x| x + p < bb - tol).all(|&x| near(x + p));
        let bwd = points.iter().filter(|&&y| y - p >= a + tol).all(|&y| near(y - p));
        let residual_tol = tol.max(lit(1e-9));
        if fwd && bwd && crate::boundary_matrices::has_period(b, omega, p, residual_tol) {
            return Some(p);
        }
        k += 1;
    }
}

/// Continuous eigenphase tracks on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct EigenphaseTrack<T> {
    pub grid: Vec<T>,
    /// `phases[k][g]`: unwrapped phase of track k at grid node g.
    pub phases: Vec<Vec<T>>,
}

impl<T: Real> EigenphaseTrack<T> {
    /// Finite-difference slopes `(θ_k(x_{g+1}) - θ_k(x_g)) / (x_{g+1} - x_g)`.
    pub fn slopes(&self) -> Vec<Vec<T>> {
        self.phases
            .iter()
            .map(|tr| {
                tr.windows(2)
                    .zip(self.grid.windows(2))
                    .map(|(p, g)| (p[1] - p[0]) / (g[1] - g[0]))
                    .collect()
            })
            .collect()
    }

    /// Number of times the tracks pass through a multiple of 2π going down on
    /// `[grid[0], grid[last])`, with the half-open convention.
    pub fn crossings(&self) -> i64 {
        let tp = T::two_pi();
        self.phases
            .iter()
            .map(|tr| {
                let f = |v: T| to_f64((v / tp).floor()) as i64;
                f(tr[0]) - f(*tr.last().unwrap())
            })
            .sum()
    }
}

/// Tracks eigenphases across `grid` by minimal circular displacement between
/// consecutive nodes (exhaustive assignment for n ≤ 6, greedy beyond).
pub fn track_eigenphases<T: Real>(b: &BoundaryMatrix<T>, omega: &IntervalUnion<T>, grid: &[T]) -> Result<EigenphaseTrack<T>> {
    let n = omega.n();
    let mut phases: Vec<Vec<T>> = vec![Vec::with_capacity(grid.len()); n];
    let first = eigenphases(&char_matrix(b, omega, grid[0]))?;
    for (k, v) in first.into_iter().enumerate() {
        phases[k].push(v);
    }
    for &x in &grid[1..] {
        let cur = eigenphases(&char_matrix(b, omega, x))?;
        let prev: Vec<T> = phases.iter().map(|t| *t.last().unwrap()).collect();
        let circ = |a: T, c: T| {
            let d = wrap_phase(c - a);
            if d > T::pi() {
                d - T::two_pi()
            } else {
                d
            }
        };
        let assign = best_assignment(n, |k, j| circ(prev[k], cur[j]).abs());
        for k in 0..n {
            let step = circ(prev[k], cur[assign[k]]);
            phases[k].push(prev[k] + step);
        }
    }
    Ok(EigenphaseTrack { grid: grid.to_vec(), phases })
}

fn best_assignment<T: Real>(n: usize, cost: impl Fn(usize, usize) -> T) -> Vec<usize> {
    let c: Vec<Vec<T>> = (0..n).map(|k| (0..n).map(|j| cost(k, j)).collect()).collect();
    if n <= 6 {
        let mut perm: Vec<usize> = (0..n).collect();
        let mut best = perm.clone();
        let mut best_cost = T::max_value().unwrap();
        permute(&mut perm, 0, &mut |p| {
            let s = p.iter().enumerate().fold(T::zero(), |s, (k, &j)| s + c[k][j]);
            if s < best_cost {
                best_cost = s;
                best = p.to_vec();
            }
        });
        return best;
    }
    let mut used = vec![false; n];
    let mut out = vec![0; n];
    for k in 0..n {
        let mut bj = usize::MAX;
        for j in 0..n {
            if !used[j] && (bj == usize::MAX || c[k][j] < c[k][bj]) {
                bj = j;
            }
        }
        used[bj] = true;
        out[k] = bj;
    }
    out
}

fn permute(p: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == p.len() {
        f(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, f);
        p.swap(k, i);
    }
}
