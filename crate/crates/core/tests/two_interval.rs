use std::collections::BTreeMap;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spectra_core::boundary_matrices::has_period;
use spectra_core::spectral_pairs::{full_pipeline, lattice_spectrum_search};
use spectra_core::two_interval::{classify, classify_union, cross_check_with_pipeline, u_closed_form, Verdict};
use spectra_core::{IntervalUnion, SampledFunction, SolverOptions, SpectraError};

type C = Complex<f64>;

fn e(l: f64, x: f64) -> C {
    Complex::from_polar(1.0, std::f64::consts::TAU * l * x)
}

#[test]
fn cross_checks() {
    let opts = SolverOptions::default();
    let c = classify(0.3, 2.0, 1e-9).unwrap();
    let r = cross_check_with_pipeline(&c, (-3.0, 3.0), &opts).unwrap();
    assert_eq!(r.entries[0].found.len(), 6);
    for l in [3u64, 5] {
        let c = classify(0.5, (l as f64 - 1.0) / 2.0, 1e-9).unwrap();
        let r = cross_check_with_pipeline(&c, (-2.0, 2.0), &opts).unwrap();
        assert_eq!(r.entries.len(), l as usize);
        // (2k+1)/l = 1 gives Z
        let k = (l - 1) / 2;
        let e = r.entries.iter().find(|e| e.k == Some(k)).unwrap();
        let want = [-2.0, -1.0, 0.0, 1.0];
        assert_eq!(e.found.len(), 4);
        for (g, w) in e.found.iter().zip(want) {
            assert!((g - w).abs() <= 1e-9);
        }
    }
    assert!(matches!(
        cross_check_with_pipeline(&classify(0.3, 0.5, 1e-9).unwrap(), (-2.0, 2.0), &opts),
        Err(SpectraError::WrongCase(_))
    ));
}

#[test]
fn case_two_matrices() {
    for l in 2..9u64 {
        let c = classify(0.5, l as f64 / 2.0 - 0.5, 1e-9).unwrap();
        let o = c.omega().unwrap();
        let Verdict::CaseII { spectra, .. } = &c.verdict else { panic!() };
        assert_eq!(spectra.len(), l as usize);
        for s in spectra {
            assert!(s.b.unitarity_defect() <= 1e-14);
            assert!(has_period(&s.b, &o, 2.0, 1e-12), "l = {l}, k = {}", s.k);
            let xi = Complex::from_polar(1.0, std::f64::consts::PI * (2 * s.k + 1) as f64 / l as f64);
            assert!((s.xi - xi).norm() <= 1e-15);
        }
    }
}

#[test]
fn closed_form_group() {
    let c = classify(0.5, 1.0, 1e-9).unwrap();
    let o = c.omega().unwrap();
    let f = SampledFunction::from_fn(&o, 1e-3, |x: f64| C::new(x.sin(), x * x));
    let u0 = u_closed_form(&c, 0, 0.0, &f).unwrap();
    assert!(u0.distance(&f).unwrap() <= 1e-14);
    let g = SampledFunction::from_fn(&o, 1e-3, |x| e(1.0 / 3.0, x));
    for &t in &[0.1, -0.77, 2.5, 13.0] {
        let u = u_closed_form(&c, 0, t, &g).unwrap();
        for (x, v) in g.points().into_iter().zip(u.values()) {
            assert!((v - e(1.0 / 3.0, t) * e(1.0 / 3.0, x)).norm() <= 1e-10);
        }
    }
    // both points in (0,1/2): plain translation
    let u = u_closed_form(&c, 0, 0.1, &f).unwrap();
    for (x, v) in f.points().into_iter().zip(u.values()) {
        if x + 0.1 < 0.5 - 1e-3 {
            assert!((v - C::new((x + 0.1).sin(), (x + 0.1) * (x + 0.1))).norm() <= 1e-9);
        }
    }
    let c1 = classify(0.3, 2.0, 1e-9).unwrap();
    let f1 = SampledFunction::from_fn(&c1.omega().unwrap(), 1e-2, |_| C::new(1.0, 0.0));
    assert!(matches!(u_closed_form(&c1, 0, 0.1, &f1), Err(SpectraError::WrongCase(_))));
}

#[test]
fn general_position_is_normalized() {
    let o = IntervalUnion::<f64>::new(&[(2.0, 2.6), (6.6, 8.0)]).unwrap();
    let c = classify_union(&o, 1e-9).unwrap();
    assert!(matches!(c.verdict, Verdict::CaseI { .. }));
    assert!((c.w - 0.3).abs() < 1e-12 && (c.rho - 2.0).abs() < 1e-12);
    let near = classify(0.3, 2.0 + 1e-8, 1e-9).unwrap();
    assert!(matches!(near.verdict, Verdict::NotSpectral));
    assert!(near.warning.is_some());
    assert!(classify_union(&IntervalUnion::<f64>::new(&[(0.0, 1.0)]).unwrap(), 1e-9).is_err());
}

/// Verdicts on the grid (1/8)Z against exhaustive lattice searches.
#[test]
fn exhaustiveness_on_a_rational_grid() {
    let mut rng = ChaCha8Rng::seed_from_u64(61);
    let mut memo: BTreeMap<(u32, u32), bool> = BTreeMap::new();
    let mut spectral = 0;
    for _ in 0..10_000 {
        let wi = rng.gen_range(1..8u32);
        let ri = rng.gen_range(1..17u32);
        let ok = *memo.entry((wi, ri)).or_insert_with(|| {
            let (w, rho) = (wi as f64 / 8.0, ri as f64 / 8.0);
            let c = classify(w, rho, 1e-9).unwrap();
            let o = c.omega().unwrap();
            let aligned: Vec<usize> = (1..=8).filter(|&p| (wi as usize * p) % 8 == 0 && (ri as usize * p) % 8 == 0).collect();
            let hits: Vec<bool> = aligned
                .iter()
                .map(|&p| !lattice_spectrum_search(&o, p, 24, 1e-7).unwrap().is_empty())
                .collect();
            if c.is_spectral() {
                let (spec, _) = &c.pairs()[0];
                let seed = [spec.reps()[0], *spec.reps().get(1).unwrap_or(&1.0)];
                let out = full_pipeline(&o, &seed, (-8.0, 8.0), &SolverOptions::default()).unwrap();
                assert!(out.succeeded(), "w = {w}, rho = {rho}");
                assert!(hits.iter().any(|&h| h), "w = {w}, rho = {rho}");
            } else {
                assert!(hits.iter().all(|&h| !h), "w = {w}, rho = {rho}: {aligned:?} {hits:?}");
            }
            c.is_spectral()
        });
        spectral += ok as usize;
    }
    assert!(spectral > 0 && spectral < 10_000);
}
