//! Scalar abstraction shared by every module.

use std::fmt::{Debug, Display};

use nalgebra::{DMatrix, DVector, RealField};
use num_complex::Complex;
use num_traits::{FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Real scalar the library is generic over. Implemented for `f32` and `f64`.
pub trait Real:
    RealField
    + Copy
    + FromPrimitive
    + ToPrimitive
    + Serialize
    + DeserializeOwned
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

pub type Cx<T> = Complex<T>;
pub type CMat<T> = DMatrix<Complex<T>>;
pub type CVec<T> = DVector<Complex<T>>;

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable")
}

#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[inline]
pub fn cx<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

#[inline]
pub fn c_one<T: Real>() -> Complex<T> {
    Complex::new(T::one(), T::zero())
}

#[inline]
pub fn c_zero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

#[inline]
pub fn c_real<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

/// `e^{2πi x}`. The argument is reduced modulo 1 first, so integer inputs give exactly 1.
pub fn e2pi<T: Real>(x: T) -> Complex<T> {
    let r = x - x.round();
    let th = T::two_pi() * r;
    Complex::new(th.cos(), th.sin())
}

/// `sin(π x)` with exact zeros at the integers.
pub fn sin_pi<T: Real>(x: T) -> T {
    let n = x.round();
    let r = x - n;
    let s = (T::pi() * r).sin();
    // sin(π(n + r)) = (-1)^n sin(π r)
    let odd = (n * lit(0.5)).fract() != T::zero();
    if odd {
        -s
    } else {
        s
    }
}

#[inline]
pub fn abs2<T: Real>(z: Complex<T>) -> T {
    z.re * z.re + z.im * z.im
}

#[inline]
pub fn cabs<T: Real>(z: Complex<T>) -> T {
    z.re.hypot(z.im)
}

/// Largest entry modulus.
pub fn max_abs<T: Real>(m: &CMat<T>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc.max(cabs(*z)))
}

/// `‖M M* − I‖_max`.
pub fn unitarity_defect<T: Real>(m: &CMat<T>) -> T {
    let n = m.nrows();
    let g = m * m.adjoint() - CMat::<T>::identity(n, n);
    max_abs(&g)
}

/// Integer nearest to `x`, for lattice bookkeeping.
#[inline]
pub fn nearest_int<T: Real>(x: T) -> i64 {
    to_f64(x).round() as i64
}

#[inline]
pub fn from_i64<T: Real>(k: i64) -> T {
    T::from_i64(k).expect("integer representable")
}

#[inline]
pub fn from_usize<T: Real>(k: usize) -> T {
    T::from_usize(k).expect("integer representable")
}
