//! Finite unions of open intervals, congruences modulo (1/p)Z, fiber sets and
//! the interval rearrangements used for periodic spectra.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SpectraError};
use crate::scalar::{from_i64, lit, to_f64, Real};
use crate::spectral_pairs::{verify_orthogonality, PeriodicSpectrum};

/// Ω = ∪ (α_i, β_i), sorted. Neighbouring intervals may touch but not overlap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct IntervalUnion<T> {
    intervals: Vec<(T, T)>,
}

impl<T: Real> IntervalUnion<T> {
    /// Sorts and validates raw pairs.
    pub fn new(raw: &[(T, T)]) -> Result<Self> {
        if raw.is_empty() {
            return Err(SpectraError::EmptyInput);
        }
        for (index, &(a, b)) in raw.iter().enumerate() {
            if !(b > a) {
                return Err(SpectraError::EmptyInterval { index, alpha: to_f64(a), beta: to_f64(b) });
            }
        }
        let mut iv = raw.to_vec();
        iv.sort_by(|x, y| x.0.partial_cmp(&y.0).expect("finite endpoints"));
        for w in iv.windows(2) {
            if w[1].0 < w[0].1 {
                return Err(SpectraError::OverlappingIntervals {
                    a0: to_f64(w[0].0),
                    b0: to_f64(w[0].1),
                    a1: to_f64(w[1].0),
                    b1: to_f64(w[1].1),
                });
            }
        }
        Ok(Self { intervals: iv })
    }

    pub fn single(a: T, b: T) -> Result<Self> {
        Self::new(&[(a, b)])
    }

    pub fn intervals(&self) -> &[(T, T)] {
        &self.intervals
    }

    pub fn n(&self) -> usize {
        self.intervals.len()
    }

    pub fn alpha(&self, i: usize) -> T {
        self.intervals[i].0
    }

    pub fn beta(&self, i: usize) -> T {
        self.intervals[i].1
    }

    pub fn alphas(&self) -> Vec<T> {
        self.intervals.iter().map(|x| x.0).collect()
    }

    pub fn betas(&self) -> Vec<T> {
        self.intervals.iter().map(|x| x.1).collect()
    }

    pub fn lengths(&self) -> Vec<T> {
        self.intervals.iter().map(|x| x.1 - x.0).collect()
    }

    pub fn measure(&self) -> T {
        self.intervals.iter().fold(T::zero(), |s, x| s + (x.1 - x.0))
    }

    pub fn min_len(&self) -> T {
        self.lengths().into_iter().fold(T::max_value().unwrap(), |a, b| a.min(b))
    }

    pub fn max_len(&self) -> T {
        self.lengths().into_iter().fold(T::zero(), |a, b| a.max(b))
    }

    pub fn lower(&self) -> T {
        self.intervals[0].0
    }

    pub fn upper(&self) -> T {
        self.intervals[self.n() - 1].1
    }

    /// Index of the interval whose interior contains `x`.
    pub fn component_of(&self, x: T) -> Option<usize> {
        self.intervals.iter().position(|&(a, b)| a < x && x < b)
    }

    pub fn contains(&self, x: T) -> bool {
        self.component_of(x).is_some()
    }

    /// Distance from `x` to the nearest endpoint.
    pub fn boundary_distance(&self, x: T) -> T {
        self.intervals
            .iter()
            .fold(T::max_value().unwrap(), |d, &(a, b)| d.min((x - a).abs()).min((x - b).abs()))
    }

    pub fn translate(&self, s: T) -> Self {
        Self { intervals: self.intervals.iter().map(|&(a, b)| (a + s, b + s)).collect() }
    }

    /// Multiplies every endpoint by `c > 0`.
    pub fn scale(&self, c: T) -> Self {
        Self { intervals: self.intervals.iter().map(|&(a, b)| (a * c, b * c)).collect() }
    }

    /// Joins touching neighbours into maximal intervals.
    pub fn merged(&self, tol: T) -> Self {
        let mut out: Vec<(T, T)> = Vec::with_capacity(self.n());
        for &(a, b) in &self.intervals {
            match out.last_mut() {
                Some(last) if (a - last.1).abs() <= tol => last.1 = b,
                _ => out.push((a, b)),
            }
        }
        Self { intervals: out }
    }

    /// Shift and scale that move Ω to start at 0 with measure 1:
    /// `normalized = (Ω - shift) * scale`.
    pub fn normalization(&self) -> (Self, T, T) {
        let shift = self.lower();
        let scale = T::one() / self.measure();
        (self.translate(-shift).scale(scale), shift, scale)
    }
}

/// `t ≡_p s`, i.e. `p(t - s) ∈ Z` within `tol`.
pub fn congruent_mod<T: Real>(t: T, s: T, p: T, tol: T) -> Result<bool> {
    if !(p > T::zero()) {
        return Err(SpectraError::NonpositivePeriod(to_f64(p)));
    }
    let d = p * (t - s);
    Ok((d - d.round()).abs() <= tol)
}

/// Ω_x = {k ∈ Z : x + k/p ∈ Ω}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct FiberSet<T> {
    pub base: T,
    pub period: T,
    pub members: Vec<i64>,
}

fn k_range<T: Real>(omega: &IntervalUnion<T>, p: T, x: T) -> (i64, i64) {
    let lo = (p * (omega.lower() - x)).ceil();
    let hi = (p * (omega.upper() - x)).floor();
    (to_f64(lo) as i64 - 1, to_f64(hi) as i64 + 1)
}

pub fn fiber_set<T: Real>(omega: &IntervalUnion<T>, p: T, x: T, tol: T) -> Result<FiberSet<T>> {
    if !(p > T::zero()) {
        return Err(SpectraError::NonpositivePeriod(to_f64(p)));
    }
    let (k0, k1) = k_range(omega, p, x);
    let mut members = Vec::new();
    for k in k0..=k1 {
        let y = x + from_i64::<T>(k) / p;
        if omega.boundary_distance(y) <= tol {
            return Err(SpectraError::BoundaryPoint(to_f64(y)));
        }
        if omega.contains(y) {
            members.push(k);
        }
    }
    Ok(FiberSet { base: x, period: p, members })
}

/// Fiber set at `x`, nudged to the right (by `10 tol` steps) when `x` sits on a
/// boundary image. Used by samplers.
pub fn fiber_set_nudged<T: Real>(omega: &IntervalUnion<T>, p: T, x: T, tol: T) -> FiberSet<T> {
    let step = tol * lit(10.0);
    let mut y = x;
    for _ in 0..64 {
        match fiber_set(omega, p, y, tol) {
            Ok(mut f) => {
                f.base = x;
                return f;
            }
            Err(_) => y += step,
        }
    }
    // Only reachable for absurd tolerances; fall back to open-set membership.
    let (k0, k1) = k_range(omega, p, y);
    let members = (k0..=k1).filter(|&k| omega.contains(y + from_i64::<T>(k) / p)).collect();
    FiberSet { base: x, period: p, members }
}

/// Reduction of `x` into `[0, 1/p)` together with the integer `a` with `x = a/p + [x]_p`.
pub fn reduce_mod<T: Real>(x: T, p: T) -> (T, i64) {
    let a = (x * p).floor();
    let mut r = x - a / p;
    let mut ai = to_f64(a) as i64;
    let cell = T::one() / p;
    if r >= cell {
        r -= cell;
        ai += 1;
    }
    if r < T::zero() {
        r += cell;
        ai -= 1;
    }
    (r, ai)
}

/// Breakpoints of the fiber map on `[0, 1/p)`: the images of all endpoints, sorted,
/// with 0 and 1/p appended.
pub fn fiber_breakpoints<T: Real>(omega: &IntervalUnion<T>, p: T, tol: T) -> Vec<T> {
    let cell = T::one() / p;
    let mut pts = vec![T::zero(), cell];
    for &(a, b) in omega.intervals() {
        for e in [a, b] {
            let (r, _) = reduce_mod(e, p);
            if r > tol && r < cell - tol {
                pts.push(r);
            }
        }
    }
    pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut out: Vec<T> = Vec::with_capacity(pts.len());
    for v in pts {
        if out.last().map_or(true, |&l| v - l > tol) {
            out.push(v);
        }
    }
    out
}

/// True when almost every point of R is covered exactly p times by the
/// (1/p)Z-translates of Ω. Requires |Ω| = 1.
pub fn is_p_tile<T: Real>(omega: &IntervalUnion<T>, p: usize, samples: usize, tol: T) -> Result<bool> {
    if p == 0 {
        return Err(SpectraError::NonpositivePeriod(0.0));
    }
    let m = omega.measure();
    if (m - T::one()).abs() > lit(1e-9) {
        return Err(SpectraError::UnnormalizedMeasure(to_f64(m)));
    }
    let pf: T = T::from_usize(p).unwrap();
    let bps = fiber_breakpoints(omega, pf, tol);
    let mut xs: Vec<T> = bps.windows(2).map(|w| (w[0] + w[1]) * lit(0.5)).collect();
    let cell = T::one() / pf;
    let ns = T::from_usize(samples.max(1)).unwrap();
    for s in 0..samples {
        xs.push(cell * (T::from_usize(s).unwrap() + lit(0.5)) / ns);
    }
    for x in xs {
        let f = fiber_set_nudged(omega, pf, x, tol);
        if f.members.len() != p {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Output of [`rearrange_to_lattice`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Rearrangement<T> {
    /// Translation `k_i ∈ (1/p)Z` applied to interval i (it moves to `J_i - k_i`).
    pub shifts: Vec<T>,
    /// Maximal intervals of the translated union.
    pub omega: IntervalUnion<T>,
}

fn check_permutation(sigma: &[usize], n: usize) -> Result<()> {
    if sigma.len() != n {
        return Err(SpectraError::SizeMismatch(sigma.len(), n));
    }
    let mut seen = vec![false; n];
    for &s in sigma {
        if s >= n || seen[s] {
            return Err(SpectraError::OutOfRange(format!("{sigma:?} is not a permutation")));
        }
        seen[s] = true;
    }
    Ok(())
}

/// Follows the cycles of σ, gluing `J_{σ(i)}` to the right end of `J_i`, so that
/// every cycle becomes one interval whose length lies in (1/p)Z.
pub fn rearrange_to_lattice<T: Real>(
    omega: &IntervalUnion<T>,
    p: T,
    sigma: &[usize],
    tol: T,
) -> Result<Rearrangement<T>> {
    let n = omega.n();
    check_permutation(sigma, n)?;
    for i in 0..n {
        if !congruent_mod(omega.beta(i), omega.alpha(sigma[i]), p, tol)? {
            return Err(SpectraError::CongruenceViolated {
                index: i,
                beta: to_f64(omega.beta(i)),
                alpha: to_f64(omega.alpha(sigma[i])),
                p: to_f64(p),
            });
        }
    }
    let snap = |v: T| (v * p).round() / p;
    let mut shifts: Vec<Option<T>> = vec![None; n];
    let mut right_edge: Option<T> = None;
    let mut placed: Vec<(T, T)> = Vec::with_capacity(n);
    for start in 0..n {
        if shifts[start].is_some() {
            continue;
        }
        let k0 = match right_edge {
            None => T::zero(),
            Some(edge) => {
                // largest k in (1/p)Z with α - k ≥ edge
                let k = ((omega.alpha(start) - edge) * p + tol).floor() / p;
                snap(k)
            }
        };
        shifts[start] = Some(k0);
        let mut cur = start;
        loop {
            let kc = shifts[cur].unwrap();
            placed.push((omega.alpha(cur) - kc, omega.beta(cur) - kc));
            let next = sigma[cur];
            if next == start {
                break;
            }
            if shifts[next].is_some() {
                return Err(SpectraError::CycleOverlap);
            }
            shifts[next] = Some(snap(omega.alpha(next) - omega.beta(cur) + kc));
            cur = next;
        }
        let edge = placed.iter().fold(T::min_value().unwrap(), |m, x| m.max(x.1));
        right_edge = Some(edge);
    }
    let mut sorted = placed.clone();
    sorted.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    for w in sorted.windows(2) {
        if w[1].0 < w[0].1 - tol {
            return Err(SpectraError::CycleOverlap);
        }
    }
    // Snap touching endpoints that only differ by rounding.
    for i in 1..sorted.len() {
        if (sorted[i].0 - sorted[i - 1].1).abs() <= tol {
            sorted[i].0 = sorted[i - 1].1;
        }
    }
    let merged = IntervalUnion::new(&sorted)?.merged(tol);
    Ok(Rearrangement { shifts: shifts.into_iter().map(|k| k.unwrap()).collect(), omega: merged })
}

/// Indices j with `β_i ≡_p α_j`.
pub fn congruent_partners<T: Real>(omega: &IntervalUnion<T>, i: usize, p: T, tol: T) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for j in 0..omega.n() {
        if congruent_mod(omega.beta(i), omega.alpha(j), p, tol)? {
            out.push(j);
        }
    }
    Ok(out)
}

/// A permutation σ with `β_i ≡_p α_{σ(i)}` for all i, if one exists.
pub fn congruence_permutation<T: Real>(omega: &IntervalUnion<T>, p: T, tol: T) -> Result<Option<Vec<usize>>> {
    let n = omega.n();
    let adj: Vec<Vec<usize>> = (0..n).map(|i| congruent_partners(omega, i, p, tol)).collect::<Result<_>>()?;
    // Kuhn's augmenting paths; n is small.
    let mut owner: Vec<Option<usize>> = vec![None; n];
    fn augment(i: usize, adj: &[Vec<usize>], seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for &j in &adj[i] {
            if seen[j] {
                continue;
            }
            seen[j] = true;
            if owner[j].map_or(true, |o| augment(o, adj, seen, owner)) {
                owner[j] = Some(i);
                return true;
            }
        }
        false
    }
    for i in 0..n {
        let mut seen = vec![false; n];
        if !augment(i, &adj, &mut seen, &mut owner) {
            return Ok(None);
        }
    }
    let mut sigma = vec![0; n];
    for (j, o) in owner.iter().enumerate() {
        sigma[o.unwrap()] = j;
    }
    Ok(Some(sigma))
}

/// Replaces `J_j` by `J_j + β_i - α_j`, where j is the unique interval with
/// `α_j ≡_p β_i`. The result has the same spectrum Λ.
pub fn swap_interval<T: Real>(
    omega: &IntervalUnion<T>,
    lambda: &PeriodicSpectrum<T>,
    i: usize,
    tol: T,
) -> Result<IntervalUnion<T>> {
    if i >= omega.n() {
        return Err(SpectraError::OutOfRange(format!("interval index {i}")));
    }
    if !lambda.contains(T::zero(), tol) {
        return Err(SpectraError::NotASpectrum("spectrum does not contain 0".into()));
    }
    let n_check = (4 * lambda.reps().len()).max(32);
    let defect = verify_orthogonality(omega, lambda, n_check);
    if defect > lit(1e-8) {
        return Err(SpectraError::NotASpectrum(format!("Gram defect {:e}", to_f64(defect))));
    }
    let partners = congruent_partners(omega, i, lambda.period(), tol)?;
    if partners.len() != 1 {
        return Err(SpectraError::NoUniquePartner { index: i, count: partners.len() });
    }
    let j = partners[0];
    let shift = omega.beta(i) - omega.alpha(j);
    let mut iv: Vec<(T, T)> = omega.intervals().to_vec();
    iv[j] = (iv[j].0 + shift, iv[j].1 + shift);
    // exact touching after the shift
    iv.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    for k in 1..iv.len() {
        if (iv[k].0 - iv[k - 1].1).abs() <= tol {
            iv[k].0 = iv[k - 1].1;
        }
    }
    IntervalUnion::new(&iv)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(v: &[(f64, f64)]) -> IntervalUnion<f64> {
        IntervalUnion::new(v).unwrap()
    }

    #[test]
    fn validate() {
        let o = u(&[(1.5, 2.0), (0.0, 0.5)]);
        assert_eq!(o.intervals(), &[(0.0, 0.5), (1.5, 2.0)]);
        assert_eq!(o.measure(), 1.0);
        assert!(matches!(
            IntervalUnion::new(&[(0.0, 1.0), (0.5, 2.0)]),
            Err(SpectraError::OverlappingIntervals { .. })
        ));
        assert!(matches!(IntervalUnion::<f64>::new(&[]), Err(SpectraError::EmptyInput)));
        assert!(matches!(IntervalUnion::new(&[(1.0, 1.0)]), Err(SpectraError::EmptyInterval { .. })));
    }

    #[test]
    fn congruence() {
        assert!(congruent_mod(0.5, 0.0, 2.0, 1e-9).unwrap());
        assert!(!congruent_mod(0.5, 0.75, 2.0, 1e-9).unwrap());
        assert!(congruent_mod(2.0, 1.5, 2.0, 1e-9).unwrap());
        assert!(congruent_mod(1.0, 0.0, -1.0, 1e-9).is_err());
    }

    #[test]
    fn fibers() {
        let o = u(&[(0.0, 0.5), (1.5, 2.0)]);
        assert_eq!(fiber_set(&o, 2.0, 0.25, 1e-12).unwrap().members, vec![0, 3]);
        let o1 = u(&[(0.0, 1.0)]);
        assert_eq!(fiber_set(&o1, 1.0, 0.5, 1e-12).unwrap().members, vec![0]);
        assert!(matches!(fiber_set(&o1, 1.0, 1.0, 1e-12), Err(SpectraError::BoundaryPoint(_))));
    }

    #[test]
    fn tiles() {
        assert!(is_p_tile(&u(&[(0.0, 1.0)]), 1, 64, 1e-12).unwrap());
        assert!(is_p_tile(&u(&[(0.0, 0.5), (1.5, 2.0)]), 2, 64, 1e-12).unwrap());
        assert!(is_p_tile(&u(&[(0.0, 0.5), (0.75, 1.25)]), 2, 64, 1e-12).unwrap());
        assert!(!is_p_tile(&u(&[(0.0, 0.3), (0.5, 1.2)]), 2, 64, 1e-12).unwrap());
        assert!(matches!(is_p_tile(&u(&[(0.0, 2.0)]), 1, 8, 1e-12), Err(SpectraError::UnnormalizedMeasure(_))));
    }

    #[test]
    fn rearrange() {
        let o = u(&[(0.0, 0.5), (1.5, 2.0)]);
        let r = rearrange_to_lattice(&o, 2.0, &[1, 0], 1e-9).unwrap();
        assert_eq!(r.shifts, vec![0.0, 1.0]);
        assert_eq!(r.omega.intervals(), &[(0.0, 1.0)]);
        let r1 = rearrange_to_lattice(&u(&[(0.0, 1.0)]), 1.0, &[0], 1e-9).unwrap();
        assert_eq!(r1.shifts, vec![0.0]);
        let bad = u(&[(0.0, 0.4), (1.5, 2.1)]);
        assert!(matches!(
            rearrange_to_lattice(&bad, 2.0, &[0, 1], 1e-9),
            Err(SpectraError::CongruenceViolated { .. })
        ));
    }

    #[test]
    fn permutation_search() {
        let o = u(&[(0.0, 0.3), (1.3, 2.0)]);
        assert_eq!(congruence_permutation(&o, 1.0, 1e-9).unwrap(), Some(vec![1, 0]));
        let o2 = u(&[(0.0, 0.3), (1.5, 2.2)]);
        assert_eq!(congruence_permutation(&o2, 1.0, 1e-9).unwrap(), None);
    }

    #[test]
    fn reduction() {
        assert_eq!(reduce_mod(0.75, 2.0), (0.25, 1));
        assert_eq!(reduce_mod(-0.25, 2.0), (0.25, -1));
        assert_eq!(reduce_mod(1.0, 2.0), (0.0, 2));
    }
}
