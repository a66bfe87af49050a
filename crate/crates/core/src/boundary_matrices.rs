//! Unitary boundary matrices B with `B f(α) = f(β)`, their construction from
//! deficiency-space isometries and from spectrum points, and structural checks
//! for periodic spectra.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SpectraError};
use crate::interval_geometry::{congruence_permutation, congruent_mod, IntervalUnion};
use crate::linalg::solve_guarded;
use crate::scalar::{abs2, c_one, c_real, cabs, e2pi, from_usize, lit, max_abs, to_f64, unitarity_defect, CMat, Real};
use crate::tolerance::Tolerances;

/// An n×n unitary matrix tied to an n-interval union.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct BoundaryMatrix<T> {
    #[serde(with = "crate::serde_util::cmat")]
    entries: CMat<T>,
}

impl<T: Real> BoundaryMatrix<T> {
    /// Accepts `m` if it is square and unitary within `tol`.
    pub fn new(m: CMat<T>, tol: T) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(SpectraError::SizeMismatch(m.nrows(), m.ncols()));
        }
        let d = unitarity_defect(&m);
        if !(d <= tol) {
            return Err(SpectraError::NonUnitaryInput(to_f64(d)));
        }
        Ok(Self { entries: m })
    }

    /// Wraps `m` without checking. Used for intermediate, possibly non-unitary candidates.
    pub fn unchecked(m: CMat<T>) -> Self {
        Self { entries: m }
    }

    pub fn for_union(m: CMat<T>, omega: &IntervalUnion<T>, tol: T) -> Result<Self> {
        if m.nrows() != omega.n() {
            return Err(SpectraError::SizeMismatch(m.nrows(), omega.n()));
        }
        Self::new(m, tol)
    }

    pub fn identity(n: usize) -> Self {
        Self { entries: CMat::identity(n, n) }
    }

    pub fn matrix(&self) -> &CMat<T> {
        &self.entries
    }

    pub fn into_matrix(self) -> CMat<T> {
        self.entries
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn unitarity_defect(&self) -> T {
        unitarity_defect(&self.entries)
    }
}

/// `D_v(λ) = diag(e^{2πiλ v_i})`.
pub fn diag_phase<T: Real>(v: &[T], lambda: T) -> CMat<T> {
    let mut d = CMat::zeros(v.len(), v.len());
    for (i, &x) in v.iter().enumerate() {
        d[(i, i)] = e2pi(lambda * x);
    }
    d
}

/// Normalizing constants (γ⁺, γ⁻) of the deficiency-space bases
/// `γ⁺_i χ_i e^{-2πt}` and `γ⁻_i χ_i e^{2πt}`.
pub fn deficiency_constants<T: Real>(omega: &IntervalUnion<T>) -> (Vec<T>, Vec<T>) {
    let four_pi = T::two_pi() * lit(2.0);
    let sq = four_pi.sqrt();
    let mut gp = Vec::with_capacity(omega.n());
    let mut gm = Vec::with_capacity(omega.n());
    for &(a, b) in omega.intervals() {
        // e^{-4πα} - e^{-4πβ} = e^{-4πα}(1 - e^{-4πℓ}), kept in factored form
        let s = (-(-four_pi * (b - a)).exp_m1()).sqrt();
        gp.push(sq * (T::two_pi() * a).exp() / s);
        gm.push(sq * (-T::two_pi() * b).exp() / s);
    }
    (gp, gm)
}

/// Per-interval `q_i = e^{-2πℓ_i}` and `S_i = √(4π)/√(1 - e^{-4πℓ_i})`.
fn scaled_factors<T: Real>(omega: &IntervalUnion<T>) -> (Vec<T>, Vec<T>) {
    let four_pi = T::two_pi() * lit(2.0);
    let sq = four_pi.sqrt();
    omega
        .lengths()
        .into_iter()
        .map(|l| ((-T::two_pi() * l).exp(), sq / (-(-four_pi * l).exp_m1()).sqrt()))
        .unzip()
}

/// Boundary matrix of the extension given by the isometry W between deficiency spaces:
/// `B = (Γ₋E(e^{2πβ})W + Γ₊E(e^{-2πβ}))(Γ₋E(e^{2πα})W + Γ₊E(e^{-2πα}))⁻¹`.
///
/// Evaluated as `S(W + Q)(QW + I)⁻¹S⁻¹`, which is the same expression with the
/// exponentials factored out per interval.
pub fn b_from_isometry<T: Real>(omega: &IntervalUnion<T>, w: &CMat<T>, tol: &Tolerances<T>) -> Result<BoundaryMatrix<T>> {
    let n = omega.n();
    if w.nrows() != n || w.ncols() != n {
        return Err(SpectraError::SizeMismatch(w.nrows(), n));
    }
    let d = unitarity_defect(w);
    if !(d <= tol.unitarity) {
        return Err(SpectraError::NonUnitaryInput(to_f64(d)));
    }
    let (q, s) = scaled_factors(omega);
    let qm = CMat::from_fn(n, n, |i, j| if i == j { c_real(q[i]) } else { c_real(T::zero()) });
    let num = w + &qm;
    let den = &qm * w + CMat::identity(n, n);
    // B̃ = num den⁻¹  ⇔  den^T B̃^T = num^T
    let bt = solve_guarded(&den.transpose(), &num.transpose(), tol.condition, SpectraError::SingularFactor)?.transpose();
    let b = CMat::from_fn(n, n, |i, j| bt[(i, j)] * c_real(s[i] / s[j]));
    let du = unitarity_defect(&b);
    if !(du <= tol.unitarity) {
        return Err(SpectraError::SingularFactor(to_f64(du)));
    }
    Ok(BoundaryMatrix { entries: b })
}

/// Inverse of [`b_from_isometry`]: `W = (B̃Q - I)⁻¹(Q - B̃)` with `B̃ = S⁻¹BS`.
pub fn isometry_from_b<T: Real>(omega: &IntervalUnion<T>, b: &BoundaryMatrix<T>, tol: &Tolerances<T>) -> Result<CMat<T>> {
    let n = omega.n();
    if b.n() != n {
        return Err(SpectraError::SizeMismatch(b.n(), n));
    }
    let (q, s) = scaled_factors(omega);
    let bm = b.matrix();
    let bt = CMat::from_fn(n, n, |i, j| bm[(i, j)] * c_real(s[j] / s[i]));
    let qm = CMat::from_fn(n, n, |i, j| if i == j { c_real(q[i]) } else { c_real(T::zero()) });
    let lhs = &bt * &qm - CMat::identity(n, n);
    let rhs = &qm - &bt;
    solve_guarded(&lhs, &rhs, tol.condition, SpectraError::SingularFactor)
}

/// `D_β(t₀)* B D_α(t₀)`, the matrix belonging to the translated spectrum Λ - t₀.
pub fn translate_b<T: Real>(b: &BoundaryMatrix<T>, omega: &IntervalUnion<T>, t0: T) -> BoundaryMatrix<T> {
    let da = diag_phase(&omega.alphas(), t0);
    let db = diag_phase(&omega.betas(), t0);
    BoundaryMatrix { entries: db.adjoint() * b.matrix() * da }
}

/// `‖B D_α(p) - D_β(p) B‖_max`.
pub fn period_residual<T: Real>(b: &BoundaryMatrix<T>, omega: &IntervalUnion<T>, p: T) -> T {
    let da = diag_phase(&omega.alphas(), p);
    let db = diag_phase(&omega.betas(), p);
    max_abs(&(b.matrix() * da - db * b.matrix()))
}

pub fn has_period<T: Real>(b: &BoundaryMatrix<T>, omega: &IntervalUnion<T>, p: T, tol: T) -> bool {
    period_residual(b, omega, p) <= tol
}

/// `M_{v,λ} = (e^{2πi v_i λ_j})/√n`.
pub fn exp_matrix<T: Real>(v: &[T], lambda: &[T]) -> CMat<T> {
    let n = v.len();
    let r = T::one() / from_usize::<T>(lambda.len()).sqrt();
    CMat::from_fn(n, lambda.len(), |i, j| e2pi(v[i] * lambda[j]) * c_real(r))
}

/// Result of [`b_from_spectrum_points`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct SpectrumMatrix<T> {
    pub matrix: BoundaryMatrix<T>,
    pub unitarity_defect: T,
    /// Set when the candidate is not unitary: the points cannot come from a spectrum.
    pub warning: Option<String>,
}

/// `B = M_{β,λ} M_{α,λ}⁻¹`.
pub fn b_from_spectrum_points<T: Real>(omega: &IntervalUnion<T>, lambda: &[T], tol: &Tolerances<T>) -> Result<SpectrumMatrix<T>> {
    let n = omega.n();
    if lambda.len() != n {
        return Err(SpectraError::SizeMismatch(lambda.len(), n));
    }
    let ma = exp_matrix(&omega.alphas(), lambda);
    let mb = exp_matrix(&omega.betas(), lambda);
    let bt = solve_guarded(&ma.transpose(), &mb.transpose(), tol.condition, SpectraError::SingularMalpha)?;
    let b = bt.transpose();
    let d = unitarity_defect(&b);
    let warning = (!(d <= tol.unitarity)).then(|| format!("candidate is not unitary (defect {:e})", to_f64(d)));
    Ok(SpectrumMatrix { matrix: BoundaryMatrix { entries: b }, unitarity_defect: d, warning })
}

/// One line of a [`StructureReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct StructureCheck<T> {
    pub name: String,
    pub passed: bool,
    pub residual: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct StructureReport<T> {
    /// σ with β_i ≡_p α_σ(i), when one exists.
    pub permutation: Option<Vec<usize>>,
    pub checks: Vec<StructureCheck<T>>,
    /// A nonempty proper index set closed under the coupling graph, if any.
    pub invariant_subset: Option<Vec<usize>>,
}

impl<T: Real> StructureReport<T> {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&StructureCheck<T>> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn worst_residual(&self) -> T {
        self.checks.iter().fold(T::zero(), |m, c| m.max(c.residual))
    }
}

/// Necessary conditions on the boundary matrix of a period-p spectrum containing 0.
///
/// Check names: `permutation`, `zero_pattern`, `row_sums`, `column_sums`,
/// `row_phase_sums`, `column_phase_sums`, `irreducible`.
pub fn structure_checks<T: Real>(
    b: &BoundaryMatrix<T>,
    omega: &IntervalUnion<T>,
    p: T,
    reps: &[T],
    tol: T,
    congruence_tol: T,
) -> Result<StructureReport<T>> {
    let n = omega.n();
    if b.n() != n {
        return Err(SpectraError::SizeMismatch(b.n(), n));
    }
    let bm = b.matrix();
    let mut cong = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            cong[i][j] = congruent_mod(omega.beta(i), omega.alpha(j), p, congruence_tol)?;
        }
    }
    let permutation = congruence_permutation(omega, p, congruence_tol)?;
    let mut checks = Vec::new();
    checks.push(StructureCheck {
        name: "permutation".into(),
        passed: permutation.is_some(),
        residual: if permutation.is_some() { T::zero() } else { T::one() },
    });

    let mut zero = T::zero();
    for i in 0..n {
        for j in 0..n {
            if !cong[i][j] {
                zero = zero.max(cabs(bm[(i, j)]));
            }
        }
    }
    checks.push(StructureCheck { name: "zero_pattern".into(), passed: zero <= tol, residual: zero });

    let phase_sums = |lambda: T, by_row: bool| -> T {
        let mut worst = T::zero();
        for a in 0..n {
            let mut s = c_real(T::zero());
            for c in 0..n {
                let (i, j) = if by_row { (a, c) } else { (c, a) };
                if cong[i][j] {
                    s += e2pi(-(omega.beta(i) - omega.alpha(j)) * lambda) * bm[(i, j)];
                }
            }
            worst = worst.max(cabs(s - c_one()));
        }
        worst
    };
    let rows = phase_sums(T::zero(), true);
    let cols = phase_sums(T::zero(), false);
    checks.push(StructureCheck { name: "row_sums".into(), passed: rows <= tol, residual: rows });
    checks.push(StructureCheck { name: "column_sums".into(), passed: cols <= tol, residual: cols });
    let rp = reps.iter().fold(T::zero(), |m, &l| m.max(phase_sums(l, true)));
    let cp = reps.iter().fold(T::zero(), |m, &l| m.max(phase_sums(l, false)));
    checks.push(StructureCheck { name: "row_phase_sums".into(), passed: rp <= tol, residual: rp });
    checks.push(StructureCheck { name: "column_phase_sums".into(), passed: cp <= tol, residual: cp });

    // Coupling graph: i → j when β_i ≡_p α_j and b_ij is numerically nonzero.
    // Entries below √tol are treated as structural zeros.
    let support = tol.sqrt();
    let edge = |i: usize, j: usize| cong[i][j] && abs2(bm[(i, j)]).sqrt() > support;
    let invariant_subset = closed_subset(n, edge);
    checks.push(StructureCheck {
        name: "irreducible".into(),
        passed: invariant_subset.is_none(),
        residual: if invariant_subset.is_none() { T::zero() } else { T::one() },
    });
    Ok(StructureReport { permutation, checks, invariant_subset })
}

/// Smallest reachable set from some start that is not everything, i.e. a witness
/// that the directed graph is not strongly connected.
fn closed_subset(n: usize, edge: impl Fn(usize, usize) -> bool) -> Option<Vec<usize>> {
    for s in 0..n {
        let mut seen = vec![false; n];
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(i) = stack.pop() {
            for j in 0..n {
                if !seen[j] && edge(i, j) {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        if seen.iter().any(|x| !x) {
            return Some((0..n).filter(|&i| seen[i]).collect());
        }
    }
    None
}
