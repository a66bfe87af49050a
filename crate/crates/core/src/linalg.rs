//! Thin wrappers over nalgebra decompositions.

use nalgebra::{Schur, SVD};
use num_complex::Complex;

use crate::error::{Result, SpectraError};
use crate::scalar::{cabs, lit, to_f64, CMat, CVec, Real};

/// `σ_max / σ_min` (infinite for exactly singular input).
pub fn condition_number<T: Real>(m: &CMat<T>) -> T {
    let sv = m.clone().singular_values();
    let mut hi = T::zero();
    let mut lo = T::max_value().unwrap();
    for s in sv.iter() {
        hi = hi.max(*s);
        lo = lo.min(*s);
    }
    if lo == T::zero() {
        T::max_value().unwrap()
    } else {
        hi / lo
    }
}

/// Solves `a x = b`, refusing when `cond(a)` exceeds `cond_max`.
/// The error callback builds the caller's specific singularity variant.
pub fn solve_guarded<T: Real>(
    a: &CMat<T>,
    b: &CMat<T>,
    cond_max: T,
    err: fn(f64) -> SpectraError,
) -> Result<CMat<T>> {
    let c = condition_number(a);
    if !(c <= cond_max) {
        return Err(err(to_f64(c)));
    }
    a.clone().lu().solve(b).ok_or_else(|| err(f64::INFINITY))
}

/// Eigenvalues of a (near-)unitary matrix as phases in `[0, 2π)`, ascending.
pub fn eigenphases<T: Real>(m: &CMat<T>) -> Result<Vec<T>> {
    let n = m.nrows();
    if n == 1 {
        return Ok(vec![wrap_phase(m[(0, 0)].im.atan2(m[(0, 0)].re))]);
    }
    let schur = Schur::try_new(m.clone(), T::default_epsilon() * lit(4.0), 10_000)
        .ok_or_else(|| SpectraError::Numerical("Schur iteration did not converge".into()))?;
    let (_, t) = schur.unpack();
    let mut ph: Vec<T> = (0..n).map(|i| wrap_phase(t[(i, i)].im.atan2(t[(i, i)].re))).collect();
    ph.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(ph)
}

/// Maps any angle into `[0, 2π)`.
pub fn wrap_phase<T: Real>(x: T) -> T {
    let tp = T::two_pi();
    let mut r = x - (x / tp).floor() * tp;
    if r >= tp {
        r -= tp;
    }
    if r < T::zero() {
        r = T::zero();
    }
    r
}

/// Singular values (descending) and the matching right singular vectors.
pub fn right_singular<T: Real>(m: &CMat<T>) -> (Vec<T>, Vec<CVec<T>>) {
    let svd = SVD::new(m.clone(), false, true);
    let v_t = svd.v_t.expect("requested V^*");
    let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
    idx.sort_by(|&a, &b| svd.singular_values[b].partial_cmp(&svd.singular_values[a]).unwrap());
    let vals = idx.iter().map(|&i| svd.singular_values[i]).collect();
    let vecs = idx.iter().map(|&i| v_t.row(i).adjoint()).collect();
    (vals, vecs)
}

/// Orthonormal basis of the numerical kernel: right singular vectors for
/// singular values at or below `thresh`. A square input has `ncols` of them in total.
pub fn numerical_kernel<T: Real>(m: &CMat<T>, thresh: T) -> (Vec<CVec<T>>, T) {
    let (vals, vecs) = right_singular(m);
    let smallest = vals.last().copied().unwrap_or(T::zero());
    let ker = vals.iter().zip(vecs).filter(|(s, _)| **s <= thresh).map(|(_, v)| v).collect();
    (ker, smallest)
}

/// Complex dot `⟨u, v⟩ = Σ u_i conj(v_i)`.
pub fn inner<T: Real>(u: &CVec<T>, v: &CVec<T>) -> Complex<T> {
    u.iter().zip(v.iter()).fold(Complex::new(T::zero(), T::zero()), |s, (a, b)| s + a * b.conj())
}

pub fn vnorm<T: Real>(u: &CVec<T>) -> T {
    u.iter().fold(T::zero(), |s, z| s + z.norm_sqr()).sqrt()
}

/// `max_i |u_i|`.
pub fn vmax<T: Real>(u: &CVec<T>) -> T {
    u.iter().fold(T::zero(), |s, z| s.max(cabs(*z)))
}
