//! Reproducing kernels of the maximal domain under the graph inner product
//! `⟨f,g⟩_gr = ∫ f ḡ + (1/4π²) ∫ f' ḡ'`.
//!
//! With this normalization the kernels carry a factor 2π:
//! `k_α(t) = 2π cosh 2π(β-t) / sinh 2πℓ`, `k_β(t) = 2π cosh 2π(t-α) / sinh 2πℓ`,
//! and for interior x
//! `k_x(t) = 2π A_x cosh 2π(t-α) / sinh 2π(x-α)` left of x,
//! `k_x(t) = 2π B_x cosh 2π(β-t) / sinh 2π(β-x)` right of x,
//! with `A_x + B_x = 1` and `A_x coth 2π(x-α) = B_x coth 2π(β-x)`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SpectraError};
use crate::interval_geometry::IntervalUnion;
use crate::scalar::{c_real, c_zero, from_usize, lit, to_f64, Real};

/// `scale · cosh 2π(t - center) / sinh 2π·len` on `[from, to]`, with
/// `|t - center| ≤ len` throughout.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct CoshPiece<T> {
    pub from: T,
    pub to: T,
    pub center: T,
    pub len: T,
    pub scale: T,
}

/// `(e^{w-L} ± e^{-w-L}) / (1 - e^{-2L})`, i.e. cosh w / sinh L or sinh w / sinh L.
fn ratio<T: Real>(w: T, l: T, plus: bool) -> T {
    let den = -(-(l + l)).exp_m1();
    let a = (w - l).exp();
    let b = (-w - l).exp();
    (if plus { a + b } else { a - b }) / den
}

/// `coth u` for u > 0.
fn coth<T: Real>(u: T) -> T {
    let e = (-(u + u)).exp();
    (T::one() + e) / -(-(u + u)).exp_m1()
}

impl<T: Real> CoshPiece<T> {
    pub fn value(&self, t: T) -> T {
        let tp = T::two_pi();
        self.scale * ratio(tp * (t - self.center).abs(), tp * self.len, true)
    }

    pub fn deriv(&self, t: T) -> T {
        let tp = T::two_pi();
        let d = t - self.center;
        let s = if d < T::zero() { -T::one() } else { T::one() };
        self.scale * tp * s * ratio(tp * d.abs(), tp * self.len, false)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct KernelFunction<T> {
    pub x: T,
    /// Index of the interval containing or adjoining x.
    pub interval: usize,
    /// One piece for endpoints, two (left, right of x) for interior points.
    pub pieces: Vec<CoshPiece<T>>,
    /// `(A_x, B_x)` for interior points.
    pub ab: Option<(T, T)>,
}

impl<T: Real> KernelFunction<T> {
    fn piece(&self, t: T) -> Option<&CoshPiece<T>> {
        self.pieces.iter().find(|p| t >= p.from && t <= p.to)
    }

    pub fn value(&self, t: T) -> T {
        self.piece(t).map_or(T::zero(), |p| p.value(t))
    }

    pub fn deriv(&self, t: T) -> T {
        self.piece(t).map_or(T::zero(), |p| p.deriv(t))
    }
}

/// Kernel at `x ∈ closure(Ω)`; points within `tol` of an endpoint use the endpoint formula.
pub fn kernel_at<T: Real>(omega: &IntervalUnion<T>, x: T, tol: T) -> Result<KernelFunction<T>> {
    let tp = T::two_pi();
    for (i, &(a, b)) in omega.intervals().iter().enumerate() {
        let l = b - a;
        if (x - a).abs() <= tol {
            let p = CoshPiece { from: a, to: b, center: b, len: l, scale: tp };
            return Ok(KernelFunction { x: a, interval: i, pieces: vec![p], ab: None });
        }
        if (x - b).abs() <= tol {
            let p = CoshPiece { from: a, to: b, center: a, len: l, scale: tp };
            return Ok(KernelFunction { x: b, interval: i, pieces: vec![p], ab: None });
        }
        if x > a && x < b {
            let (cu, cv) = (coth(tp * (x - a)), coth(tp * (b - x)));
            let aa = cv / (cu + cv);
            let bb = cu / (cu + cv);
            let left = CoshPiece { from: a, to: x, center: a, len: x - a, scale: tp * aa };
            let right = CoshPiece { from: x, to: b, center: b, len: b - x, scale: tp * bb };
            return Ok(KernelFunction { x, interval: i, pieces: vec![left, right], ab: Some((aa, bb)) });
        }
    }
    Err(SpectraError::PointOutsideClosure(to_f64(x)))
}

/// Values and derivatives at the nodes `α_i + j ℓ_i/N_i`, j = 0..=N_i, of every component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct SmoothSamples<T> {
    omega: IntervalUnion<T>,
    cells: Vec<usize>,
    values: Vec<Complex<T>>,
    derivs: Vec<Complex<T>>,
}

impl<T: Real> SmoothSamples<T> {
    pub fn from_fn(
        omega: &IntervalUnion<T>,
        h: T,
        f: impl Fn(T) -> Complex<T>,
        df: impl Fn(T) -> Complex<T>,
    ) -> Self {
        let cells: Vec<usize> = omega.lengths().into_iter().map(|l| (to_f64((l / h).round()) as usize).max(1)).collect();
        let mut values = Vec::new();
        let mut derivs = Vec::new();
        for (i, &n) in cells.iter().enumerate() {
            let (a, b) = omega.intervals()[i];
            let s = (b - a) / from_usize::<T>(n);
            for j in 0..=n {
                let t = if j == n { b } else { a + s * from_usize::<T>(j) };
                values.push(f(t));
                derivs.push(df(t));
            }
        }
        Self { omega: omega.clone(), cells, values, derivs }
    }

    /// Samples of a kernel function (real, piecewise analytic).
    pub fn from_kernel(omega: &IntervalUnion<T>, h: T, k: &KernelFunction<T>) -> Self {
        // at the kink the derivative is one-sided; use the left piece value
        Self::from_fn(omega, h, |t| c_real(k.value(t)), |t| c_real(k.deriv(t)))
    }

    pub fn omega(&self) -> &IntervalUnion<T> {
        &self.omega
    }

    fn same_grid(&self, other: &Self) -> bool {
        self.omega == other.omega && self.cells == other.cells
    }

    /// Node offsets and spacing of component i.
    fn span(&self, i: usize) -> (usize, T) {
        let off: usize = self.cells[..i].iter().map(|n| n + 1).sum();
        let (a, b) = self.omega.intervals()[i];
        (off, (b - a) / from_usize::<T>(self.cells[i]))
    }

    /// Second derivatives at the nodes of component i from differences of f'.
    fn second(&self, i: usize) -> Vec<Complex<T>> {
        let (off, s) = self.span(i);
        let n = self.cells[i];
        let d = &self.derivs[off..=off + n];
        let two = c_real::<T>(lit::<T>(2.0) * s);
        if n == 1 {
            let g = (d[1] - d[0]) / c_real(s);
            return vec![g, g];
        }
        (0..=n)
            .map(|j| {
                if j == 0 {
                    (d[0] * c_real(lit(-3.0)) + d[1] * c_real(lit(4.0)) - d[2]) / two
                } else if j == n {
                    (d[n] * c_real(lit(3.0)) - d[n - 1] * c_real(lit(4.0)) + d[n - 2]) / two
                } else {
                    (d[j + 1] - d[j - 1]) / two
                }
            })
            .collect()
    }

    /// Cubic Hermite value, first and second derivative at t in component i.
    fn hermite(&self, i: usize, t: T) -> (Complex<T>, Complex<T>, Complex<T>) {
        let (off, s) = self.span(i);
        let n = self.cells[i];
        let a = self.omega.alpha(i);
        let j = (to_f64((t - a) / s).floor().max(0.0) as usize).min(n - 1);
        let x0 = a + s * from_usize::<T>(j);
        let u = (t - x0) / s;
        let (y0, y1) = (self.values[off + j], self.values[off + j + 1]);
        let (d0, d1) = (self.derivs[off + j] * c_real(s), self.derivs[off + j + 1] * c_real(s));
        let u2 = u * u;
        let u3 = u2 * u;
        let (two, three, six) = (lit::<T>(2.0), lit::<T>(3.0), lit::<T>(6.0));
        let h00 = two * u3 - three * u2 + T::one();
        let h10 = u3 - two * u2 + u;
        let h01 = -two * u3 + three * u2;
        let h11 = u3 - u2;
        let v = y0 * h00 + d0 * h10 + y1 * h01 + d1 * h11;
        let dh00 = six * u2 - six * u;
        let dh10 = three * u2 - lit::<T>(4.0) * u + T::one();
        let dh11 = three * u2 - two * u;
        let dv = (y0 * dh00 + d0 * dh10 - y1 * dh00 + d1 * dh11) / c_real(s);
        let ddh00 = lit::<T>(12.0) * u - six;
        let ddh10 = six * u - lit::<T>(4.0);
        let ddh11 = six * u - two;
        let ddv = (y0 * ddh00 + d0 * ddh10 - y1 * ddh00 + d1 * ddh11) / c_real(s * s);
        (v, dv, ddv)
    }

    /// Interpolated `(f, f')` at any point of closure(Ω).
    pub fn eval(&self, t: T) -> Option<(Complex<T>, Complex<T>)> {
        let iv = self.omega.intervals();
        let i = iv.iter().position(|&(a, b)| t >= a && t <= b)?;
        let (v, d, _) = self.hermite(i, t);
        Some((v, d))
    }
}

/// `Σ_panels (w/2)(F_l + F_r) - (w²/12)(F'_r - F'_l)` for nodes with values F and derivatives F'.
fn corrected_trapezoid<T: Real>(ts: &[T], fs: &[Complex<T>], dfs: &[Complex<T>]) -> Complex<T> {
    let mut s = c_zero();
    let twelfth = lit::<T>(1.0 / 12.0);
    for k in 0..ts.len().saturating_sub(1) {
        let w = ts[k + 1] - ts[k];
        s += (fs[k] + fs[k + 1]) * c_real(w * lit(0.5)) - (dfs[k + 1] - dfs[k]) * c_real(w * w * twelfth);
    }
    s
}

fn inv4pi2<T: Real>() -> T {
    T::one() / (T::two_pi() * T::two_pi())
}

/// `⟨f,g⟩_gr` by corrected trapezoid on the shared grid.
pub fn graph_inner<T: Real>(f: &SmoothSamples<T>, g: &SmoothSamples<T>) -> Result<Complex<T>> {
    if !f.same_grid(g) {
        return Err(SpectraError::GridMismatch("graph_inner: different grids".into()));
    }
    let c = c_real(inv4pi2::<T>());
    let mut total = c_zero();
    for i in 0..f.omega.n() {
        let (off, s) = f.span(i);
        let n = f.cells[i];
        let (f2, g2) = (f.second(i), g.second(i));
        let a = f.omega.alpha(i);
        let ts: Vec<T> = (0..=n).map(|j| a + s * from_usize::<T>(j)).collect();
        let mut fs = Vec::with_capacity(n + 1);
        let mut dfs = Vec::with_capacity(n + 1);
        for j in 0..=n {
            let (fv, fd) = (f.values[off + j], f.derivs[off + j]);
            let (gv, gd) = (g.values[off + j].conj(), g.derivs[off + j].conj());
            fs.push(fv * gv + c * fd * gd);
            dfs.push(fd * gv + fv * gd + c * (f2[j] * gd + fd * g2[j].conj()));
        }
        total += corrected_trapezoid(&ts, &fs, &dfs);
    }
    Ok(total)
}

/// `⟨f, k⟩_gr` with the kernel evaluated analytically; the cell holding the
/// kink of an interior kernel is split there.
pub fn graph_inner_kernel<T: Real>(f: &SmoothSamples<T>, k: &KernelFunction<T>) -> Complex<T> {
    let i = k.interval;
    let (off, s) = f.span(i);
    let n = f.cells[i];
    let a = f.omega.alpha(i);
    let f2 = f.second(i);
    let c = inv4pi2::<T>();
    let mut total = c_zero();
    for piece in &k.pieces {
        // nodes strictly inside the piece plus its ends
        let mut pts: Vec<(T, Complex<T>, Complex<T>, Complex<T>)> = Vec::new();
        let node = |j: usize| a + s * from_usize::<T>(j);
        let near = s * lit(1e-9);
        let push_end = |pts: &mut Vec<_>, t: T| {
            let j = to_f64(((t - a) / s).round()) as usize;
            if j <= n && (node(j) - t).abs() <= near {
                pts.push((t, f.values[off + j], f.derivs[off + j], f2[j]));
            } else {
                let (v, d, dd) = f.hermite(i, t);
                pts.push((t, v, d, dd));
            }
        };
        push_end(&mut pts, piece.from);
        for j in 0..=n {
            let t = node(j);
            if t > piece.from + near && t < piece.to - near {
                pts.push((t, f.values[off + j], f.derivs[off + j], f2[j]));
            }
        }
        push_end(&mut pts, piece.to);
        let ts: Vec<T> = pts.iter().map(|p| p.0).collect();
        let mut fs = Vec::with_capacity(pts.len());
        let mut dfs = Vec::with_capacity(pts.len());
        let fourpi2 = T::two_pi() * T::two_pi();
        for &(t, v, d, dd) in &pts {
            let kv = piece.value(t);
            let kd = piece.deriv(t);
            fs.push(v * kv + d * (c * kd));
            // k'' = 4π² k
            dfs.push(d * kv + v * kd + (dd * kd + d * (fourpi2 * kv)) * c_real(c));
        }
        total += corrected_trapezoid(&ts, &fs, &dfs);
    }
    total
}

/// `|⟨f, k_x⟩_gr - f(x)|`, with f(x) interpolated from the samples.
pub fn verify_reproducing<T: Real>(omega: &IntervalUnion<T>, x: T, f: &SmoothSamples<T>, tol: T) -> Result<T> {
    if f.omega() != omega {
        return Err(SpectraError::GridMismatch("samples belong to a different set".into()));
    }
    let k = kernel_at(omega, x, tol)?;
    let fx = f.eval(k.x).map(|v| v.0).ok_or(SpectraError::PointOutsideClosure(to_f64(x)))?;
    Ok((graph_inner_kernel(f, &k) - fx).norm_sqr().sqrt())
}

/// `∫ (f' ḡ + f ḡ')` computed by quadrature and from boundary values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct BoundaryForm<T> {
    pub quadrature: Complex<T>,
    /// `⟨f(β), g(β)⟩ - ⟨f(α), g(α)⟩`.
    pub boundary: Complex<T>,
}

impl<T: Real> BoundaryForm<T> {
    pub fn discrepancy(&self) -> T {
        (self.quadrature - self.boundary).norm_sqr().sqrt()
    }
}

pub fn boundary_form<T: Real>(f: &SmoothSamples<T>, g: &SmoothSamples<T>) -> Result<BoundaryForm<T>> {
    if !f.same_grid(g) {
        return Err(SpectraError::GridMismatch("boundary_form: different grids".into()));
    }
    let mut quadrature = c_zero();
    let mut boundary = c_zero();
    for i in 0..f.omega.n() {
        let (off, s) = f.span(i);
        let n = f.cells[i];
        let (f2, g2) = (f.second(i), g.second(i));
        let a = f.omega.alpha(i);
        let ts: Vec<T> = (0..=n).map(|j| a + s * from_usize::<T>(j)).collect();
        let mut fs = Vec::with_capacity(n + 1);
        let mut dfs = Vec::with_capacity(n + 1);
        for j in 0..=n {
            let (fv, fd) = (f.values[off + j], f.derivs[off + j]);
            let (gv, gd) = (g.values[off + j].conj(), g.derivs[off + j].conj());
            fs.push(fd * gv + fv * gd);
            dfs.push(f2[j] * gv + fd * gd * c_real(lit(2.0)) + fv * g2[j].conj());
        }
        quadrature += corrected_trapezoid(&ts, &fs, &dfs);
        boundary += f.values[off + n] * g.values[off + n].conj() - f.values[off] * g.values[off].conj();
    }
    Ok(BoundaryForm { quadrature, boundary })
}
