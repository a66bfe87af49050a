//! Spectral theory of finite unions of intervals.
//!
//! Given Ω = ∪(α_i, β_i), a unitary boundary matrix B defines a selfadjoint
//! restriction of `(1/2πi) d/dx` by `B f(α) = f(β)`. Its spectrum Λ_B is the
//! real zero set of `det(I - D_β(λ)* B D_α(λ))`, and when the eigenfunctions are
//! plain exponentials the pair (Ω, Λ_B) is a spectral pair. The modules cover
//! the geometry of Ω, boundary matrices, the spectrum solver, verification
//! of spectral pairs, the associated local translation groups, the complete
//! two-interval classification and the reproducing kernels of the maximal domain.
//!
//! Everything is generic over [`Real`] (`f32` or `f64`); the `*F64` aliases
//! below name the double-precision instantiations.

pub mod boundary_matrices;
pub mod error;
pub mod interval_geometry;
pub mod linalg;
pub mod quadrature;
pub mod rkhs;
pub mod scalar;
pub mod serde_util;
pub mod spectral_pairs;
pub mod spectrum_solver;
pub mod tolerance;
pub mod translation_group;
pub mod two_interval;

pub use boundary_matrices::BoundaryMatrix;
pub use error::{Result, SpectraError};
pub use interval_geometry::IntervalUnion;
pub use scalar::Real;
pub use spectral_pairs::PeriodicSpectrum;
pub use spectrum_solver::{SolverOptions, SpectrumPoint};
pub use tolerance::Tolerances;
pub use translation_group::{SampledFunction, TranslationGroup};

pub type IntervalUnionF64 = IntervalUnion<f64>;
pub type BoundaryMatrixF64 = BoundaryMatrix<f64>;
pub type PeriodicSpectrumF64 = PeriodicSpectrum<f64>;
pub type SpectrumPointF64 = SpectrumPoint<f64>;
pub type SampledFunctionF64 = SampledFunction<f64>;
pub type TranslationGroupF64 = TranslationGroup<f64>;
pub type TolerancesF64 = Tolerances<f64>;
pub type ComplexMatrixF64 = scalar::CMat<f64>;
