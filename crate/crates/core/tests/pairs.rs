use num_complex::Complex;
use proptest::prelude::*;
use spectra_core::spectral_pairs::{
    beurling_density, beurling_density_points, full_pipeline, gram_matrix, lattice_spectrum_search, parseval_curve,
    parseval_defect, parseval_defect_points, verify_orthogonality, verify_pair, RejectReason, TestFunction,
};
use spectra_core::{IntervalUnion, PeriodicSpectrum, SolverOptions};

type C = Complex<f64>;
const TAU: f64 = std::f64::consts::TAU;

fn case_two() -> (IntervalUnion<f64>, PeriodicSpectrum<f64>) {
    (
        IntervalUnion::new(&[(0.0, 0.5), (1.5, 2.0)]).unwrap(),
        PeriodicSpectrum::new(&[0.0, 1.0 / 3.0], 2.0).unwrap(),
    )
}

/// `∫_a^b e^{2πiδt} dt` written out directly.
fn oracle_integral(d: f64, a: f64, b: f64) -> C {
    if d == 0.0 {
        return C::new(b - a, 0.0);
    }
    (Complex::from_polar(1.0, TAU * d * b) - Complex::from_polar(1.0, TAU * d * a)) / C::new(0.0, TAU * d)
}

#[test]
fn gram_matrix_is_identity() {
    let (o, s) = case_two();
    let t0 = std::time::Instant::now();
    let pts = s.first_n(64);
    let g = gram_matrix(&o, &pts);
    let el = t0.elapsed().as_secs_f64();
    assert!(el < 1.0);
    let m = o.measure();
    for j in 0..64 {
        for k in 0..64 {
            let want = if j == k { 1.0 } else { 0.0 };
            assert!((g[(j, k)] / m - C::new(want, 0.0)).norm() <= 1e-10);
            let direct: C = o.intervals().iter().map(|&(a, b)| oracle_integral(pts[j] - pts[k], a, b)).sum();
            assert!((g[(j, k)] - direct).norm() <= 1e-12);
        }
    }
}

#[test]
fn verification_reports() {
    let (o, s) = case_two();
    let r = verify_pair(&o, &s).unwrap();
    assert!(r.passed, "{r:?}");
    assert!((r.density_estimate - 1.0).abs() < 1e-12);
    // Z = {0,1} + 2Z is also a spectrum of this set
    assert!(verify_pair(&o, &PeriodicSpectrum::new(&[0.0, 1.0], 2.0).unwrap()).unwrap().passed);
    let bad = verify_pair(&o, &PeriodicSpectrum::new(&[0.0, 0.5], 2.0).unwrap()).unwrap();
    assert!(!bad.passed);
    // ⟨e_0, e_{1/2}⟩ / |Ω| in closed form
    let c: C = o.intervals().iter().map(|&(a, b)| oracle_integral(-0.5, a, b)).sum();
    assert!(bad.gram_defect >= c.norm() - 1e-12);
}

/// |⟨χ_(0,1/4), e_n⟩|² on (0,1).
fn chi_quarter_coeff(l: f64) -> f64 {
    if l == 0.0 {
        1.0 / 16.0
    } else {
        let v = (std::f64::consts::PI * l / 4.0).sin() / (std::f64::consts::PI * l);
        v * v
    }
}

#[test]
fn parseval_on_the_unit_interval() {
    let o = IntervalUnion::new(&[(0.0, 1.0)]).unwrap();
    let z = PeriodicSpectrum::integers();
    let f = TestFunction::Indicator { a: 0.0, b: 0.25 };
    let ns = [64, 128, 256, 512];
    let d = parseval_curve(&o, &z, &f, &ns).unwrap();
    for (k, &n) in ns.iter().enumerate() {
        let want = 1.0 - z.first_n(n).iter().map(|&l| chi_quarter_coeff(l)).sum::<f64>() / 0.25;
        assert!((d[k] - want).abs() <= 1e-12, "N = {n}");
        assert!((parseval_defect(&o, &z, &f, n).unwrap() - d[k]).abs() <= 1e-14);
    }
    assert!(d.windows(2).all(|w| w[1] < w[0]));
    assert!(d[3] <= 2e-3);
}

#[test]
fn perturbed_point_set() {
    let o = IntervalUnion::new(&[(0.0, 1.0)]).unwrap();
    let f = TestFunction::Indicator { a: 0.0, b: 0.25 };
    for &n in &[64usize, 512, 4096] {
        let mut pts = PeriodicSpectrum::integers().first_n(n);
        pts[0] = 0.37;
        let want = 1.0 - pts.iter().map(|&l| chi_quarter_coeff(l)).sum::<f64>() / 0.25;
        let got = parseval_defect_points(&o, &pts, &f).unwrap();
        assert!((got - want).abs() <= 1e-12);
    }
}

#[test]
fn pipeline_accepts_a_spectral_seed() {
    let (o, s) = case_two();
    let out = full_pipeline(&o, &[0.0, 1.0 / 3.0], (-8.0, 8.0), &SolverOptions::default()).unwrap();
    assert!(out.succeeded(), "{:?}", out.diagnostics);
    let pair = out.pair.unwrap();
    assert!((pair.spectrum.period() - s.period()).abs() < 1e-9);
    assert!((pair.spectrum.reps()[1] - 1.0 / 3.0).abs() < 1e-9);
}

#[test]
fn pipeline_rejects_every_seed_on_a_non_spectral_set() {
    let o = IntervalUnion::new(&[(0.0, 0.3), (1.5, 2.2)]).unwrap();
    for j in 0..24 {
        let seed = [0.0, (2 * j + 1) as f64 / 24.0];
        let out = full_pipeline(&o, &seed, (-8.0, 8.0), &SolverOptions::default()).unwrap();
        assert!(!out.succeeded());
        assert!(
            matches!(out.reason, Some(RejectReason::NotUnitary { .. }) | Some(RejectReason::NotSpectralMatrix { .. })),
            "seed {seed:?}: {:?}",
            out.reason
        );
    }
}

#[test]
fn lattice_search_finds_all_case_two_spectra() {
    let (o, _) = case_two();
    let found = lattice_spectrum_search(&o, 2, 3, 1e-9).unwrap();
    let mut reps: Vec<f64> = found.iter().map(|s| s.reps()[1]).collect();
    reps.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert_eq!(reps.len(), 3, "{reps:?}");
    for (r, w) in reps.iter().zip([1.0 / 3.0, 1.0, 5.0 / 3.0]) {
        assert!((r - w).abs() < 1e-12);
    }
}

#[test]
fn density_of_spectra() {
    let (_, s) = case_two();
    assert!((beurling_density(&s) - 1.0).abs() < 1e-15);
    let pts = s.points_in(-500.0, 500.0);
    assert!((beurling_density_points(&pts, 1000.0) - 1.0).abs() < 1e-2);
}

proptest! {
    #[test]
    fn integers_are_orthogonal_on_any_unit_interval(a in -10.0f64..10.0) {
        let o = IntervalUnion::new(&[(a, a + 1.0)]).unwrap();
        prop_assert!(verify_orthogonality(&o, &PeriodicSpectrum::integers(), 32) <= 1e-12);
    }

    #[test]
    fn gram_is_hermitian(a in -3.0f64..3.0, l1 in 0.1f64..2.0, gap in 0.1f64..2.0, l2 in 0.1f64..2.0, x in -5.0f64..5.0, y in -5.0f64..5.0) {
        let o = IntervalUnion::new(&[(a, a + l1), (a + l1 + gap, a + l1 + gap + l2)]).unwrap();
        let g = gram_matrix(&o, &[0.0, x, y]);
        for i in 0..3 {
            for j in 0..3 {
                prop_assert!((g[(i, j)] - g[(j, i)].conj()).norm() <= 1e-14);
                let direct: C = o.intervals().iter().map(|&(p, q)| oracle_integral([0.0, x, y][i] - [0.0, x, y][j], p, q)).sum();
                prop_assert!((g[(i, j)] - direct).norm() <= 1e-9);
            }
        }
    }

    #[test]
    fn shifted_spectra_stay_spectra(t in -3.0f64..3.0) {
        let (o, s) = case_two();
        prop_assert!(verify_orthogonality(&o, &s.shifted(t).unwrap(), 32) <= 1e-10);
    }
}
