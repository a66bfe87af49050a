use num_complex::Complex;
use spectra_core::spectrum_solver::solve_spectrum;
use spectra_core::two_interval::{classify, Verdict};
use spectra_core::{BoundaryMatrix, IntervalUnion, SolverOptions, Tolerances};

#[test]
fn case_two_in_f32() {
    let c = classify(0.5f32, 1.0, 1e-5).unwrap();
    let Verdict::CaseII { spectra, .. } = &c.verdict else { panic!() };
    let o = c.omega().unwrap();
    let opts = SolverOptions { tol: Tolerances::<f32>::single(), grid_step: None };
    let b = BoundaryMatrix::new(spectra[0].b.matrix().clone(), 1e-5).unwrap();
    let pts = solve_spectrum(&b, &o, (-2.0, 2.0), &opts).unwrap();
    let want = [-2.0f32, -5.0 / 3.0, 0.0, 1.0 / 3.0];
    assert_eq!(pts.len(), 4);
    for (p, w) in pts.iter().zip(want) {
        assert!((p.lambda - w).abs() < 1e-4, "{} vs {w}", p.lambda);
    }
}

#[test]
fn unit_interval_in_f32() {
    let o = IntervalUnion::<f32>::new(&[(0.0, 1.0)]).unwrap();
    let b = BoundaryMatrix::new(nalgebra::DMatrix::from_element(1, 1, Complex::new(0.0f32, 1.0)), 1e-6).unwrap();
    let opts = SolverOptions { tol: Tolerances::<f32>::single(), grid_step: None };
    let pts = solve_spectrum(&b, &o, (0.0, 3.0), &opts).unwrap();
    // e^{2πiλ} = i at λ = 1/4 + Z
    assert_eq!(pts.len(), 3);
    for (p, w) in pts.iter().zip([0.25f32, 1.25, 2.25]) {
        assert!((p.lambda - w).abs() < 1e-4);
    }
}
