use serde::{Deserialize, Serialize};

use crate::scalar::{lit, Real};

/// Numerical thresholds shared by the asserting operations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Tolerances<T> {
    /// Max-norm bound on `B B* - I`.
    pub unitarity: T,
    /// Bound on `|p(t-s) - round(p(t-s))|`.
    pub congruence: T,
    /// Distance below which a point counts as lying on the boundary.
    pub boundary: T,
    /// Target accuracy of spectrum points.
    pub root: T,
    /// Singular values of `I - M(λ)` below `kernel * n` span the kernel.
    pub kernel: T,
    /// Angle threshold for "kernel parallel to the all-ones vector".
    pub parallel: T,
    /// Largest condition number accepted before declaring a factor singular.
    pub condition: T,
}

impl<T: Real> Default for Tolerances<T> {
    fn default() -> Self {
        Self {
            unitarity: lit(1e-10),
            congruence: lit(1e-9),
            boundary: lit(1e-12),
            root: lit(1e-9),
            kernel: lit(1e-7),
            parallel: lit(1e-7),
            condition: lit(1e12),
        }
    }
}

impl<T: Real> Tolerances<T> {
    /// Thresholds scaled to single precision.
    pub fn single() -> Self {
        Self {
            unitarity: lit(1e-4),
            congruence: lit(1e-4),
            boundary: lit(1e-6),
            root: lit(1e-4),
            kernel: lit(1e-3),
            parallel: lit(1e-3),
            condition: lit(1e6),
        }
    }
}
