//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero if any fails.

use std::f64::consts::{PI, TAU};
use std::path::Path;
use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spectra_core::boundary_matrices::{b_from_spectrum_points, has_period, period_residual, structure_checks};
use spectra_core::rkhs::{verify_reproducing, SmoothSamples};
use spectra_core::spectral_pairs::{full_pipeline, gram_matrix, parseval_curve, parseval_defect_points, RejectReason, TestFunction};
use spectra_core::spectrum_solver::{solve_spectrum, track_eigenphases, winding_count};
use spectra_core::translation_group::{build_group, lattice_boundary_matrix};
use spectra_core::two_interval::{TwoIntervalCase, Verdict};
use spectra_core::{BoundaryMatrix, IntervalUnion, PeriodicSpectrum, SampledFunction, SolverOptions, Tolerances};
use spectra_kit::commands::SpectrumReport;
use spectra_kit::{run_text, Command, Overrides};

type C = Complex<f64>;
type M = DMatrix<C>;

struct Line {
    passed: bool,
    detail: String,
}

fn line(passed: bool, detail: String) -> Line {
    Line { passed, detail }
}

fn e(l: f64, x: f64) -> C {
    Complex::from_polar(1.0, TAU * l * x)
}

fn xi() -> C {
    Complex::from_polar(1.0, PI / 3.0)
}

fn case_two_b() -> M {
    let one = C::new(1.0, 0.0);
    let x = xi();
    M::from_row_slice(2, 2, &[(one + x) / 2.0, (one - x) / 2.0, (one - x) / 2.0, (one + x) / 2.0])
}

fn swap() -> M {
    let (z, o) = (C::new(0.0, 0.0), C::new(1.0, 0.0));
    M::from_row_slice(2, 2, &[z, o, o, z])
}

fn case_two_omega() -> IntervalUnion<f64> {
    IntervalUnion::new(&[(0.0, 0.5), (1.5, 2.0)]).unwrap()
}

fn case_one_omega() -> IntervalUnion<f64> {
    IntervalUnion::new(&[(0.0, 0.3), (1.3, 2.0)]).unwrap()
}

fn matrix_toml(b: &M) -> String {
    let rows: Vec<String> = (0..b.nrows())
        .map(|i| {
            let cells: Vec<String> = (0..b.ncols()).map(|j| format!("[{:e}, {:e}]", b[(i, j)].re, b[(i, j)].im)).collect();
            format!("[{}]", cells.join(", "))
        })
        .collect();
    format!("matrix = [{}]\n", rows.join(", "))
}

fn spectrum_via_cli(intervals: &str, b: &M, window: (f64, f64)) -> (SpectrumReport, i32) {
    let text = format!("intervals = {intervals}\n{}window = [{:e}, {:e}]\n", matrix_toml(b), window.0, window.1);
    let out = run_text(Command::Spectrum, &text, &Overrides::default(), Path::new(".")).unwrap();
    (serde_json::from_str(&out.stdout).unwrap(), out.code)
}

fn max_dev(got: &[f64], want: &[f64]) -> f64 {
    if got.len() != want.len() {
        return f64::INFINITY;
    }
    got.iter().zip(want).map(|(g, w)| (g - w).abs()).fold(0.0, f64::max)
}

fn c1() -> Line {
    let t0 = Instant::now();
    let (r, code) = spectrum_via_cli("[[0.0, 0.5], [1.5, 2.0]]", &case_two_b(), (-4.0, 4.0));
    let el = t0.elapsed().as_secs_f64();
    let want = [-4.0, -11.0 / 3.0, -2.0, -5.0 / 3.0, 0.0, 1.0 / 3.0, 2.0, 7.0 / 3.0];
    let got: Vec<f64> = r.points.iter().map(|p| p.lambda).collect();
    let d = max_dev(&got, &want);
    line(code == 0 && d <= 1e-9 && el < 1.0, format!("case II spectrum on [-4,4): max deviation {d:e} (tol 1e-9), {el:.3} s (limit 1 s)"))
}

fn c2() -> Line {
    let (r, code) = spectrum_via_cli("[[0.0, 0.3], [1.3, 2.0]]", &swap(), (-4.0, 4.0));
    let want: Vec<f64> = (-4..4).map(f64::from).collect();
    let got: Vec<f64> = r.points.iter().map(|p| p.lambda).collect();
    let d = max_dev(&got, &want);
    let text = "intervals = [[0.0, 0.3], [1.3, 2.0]]\n";
    let out = run_text(Command::Classify2, text, &Overrides::default(), Path::new(".")).unwrap();
    let parsed: TwoIntervalCase<f64> = serde_json::from_str(&out.stdout).unwrap();
    let case_one = out.code == 0 && matches!(parsed.verdict, Verdict::CaseI { .. });
    let direct = spectra_core::two_interval::classify_union(&case_one_omega(), 1e-9).unwrap();
    let direct_one = matches!(direct.verdict, Verdict::CaseI { .. });
    line(
        code == 0 && d <= 1e-9 && case_one && direct_one,
        format!("swap matrix spectrum = Z on [-4,4): max deviation {d:e} (tol 1e-9), classify2 CaseI = {case_one}"),
    )
}

fn c3() -> Line {
    let s = b_from_spectrum_points(&case_two_omega(), &[0.0, 1.0 / 3.0], &Tolerances::default()).unwrap();
    let want = case_two_b();
    let d = (s.matrix.matrix() - &want).iter().map(|z| z.norm()).fold(0.0, f64::max);
    line(d <= 1e-12 && s.warning.is_none(), format!("reconstructed B vs closed form: max entry deviation {d:e} (tol 1e-12)"))
}

fn c4() -> Line {
    let o = case_two_omega();
    let s = PeriodicSpectrum::new(&[0.0, 1.0 / 3.0], 2.0).unwrap();
    let t0 = Instant::now();
    let g = gram_matrix(&o, &s.first_n(64));
    let el = t0.elapsed().as_secs_f64();
    let m = o.measure();
    let d = (g / C::new(m, 0.0) - M::identity(64, 64)).iter().map(|z| z.norm()).fold(0.0, f64::max);
    line(d <= 1e-10 && el < 1.0, format!("64x64 normalized Gram: max |G - I| = {d:e} (tol 1e-10), {el:.4} s (limit 1 s)"))
}

fn c5() -> Line {
    let b2 = BoundaryMatrix::new(case_two_b(), 1e-12).unwrap();
    let b1 = BoundaryMatrix::new(swap(), 1e-12).unwrap();
    let (o2, o1) = (case_two_omega(), case_one_omega());
    let r2 = period_residual(&b2, &o2, 2.0);
    let r1 = period_residual(&b1, &o1, 1.0);
    let ok = has_period(&b2, &o2, 2.0, 1e-12) && has_period(&b1, &o1, 1.0, 1e-12);
    let halves = !has_period(&b2, &o2, 1.0, 1e-12) && !has_period(&b1, &o1, 0.5, 1e-12);
    line(
        ok && halves && r1 <= 1e-12 && r2 <= 1e-12,
        format!("period residuals {r2:e} (p=2), {r1:e} (p=1) (tol 1e-12); p/2 rejected = {halves}"),
    )
}

fn c6() -> Line {
    let b2 = BoundaryMatrix::new(case_two_b(), 1e-12).unwrap();
    let b1 = BoundaryMatrix::new(swap(), 1e-12).unwrap();
    let r2 = structure_checks(&b2, &case_two_omega(), 2.0, &[0.0, 1.0 / 3.0], 1e-10, 1e-9).unwrap();
    let r1 = structure_checks(&b1, &case_one_omega(), 1.0, &[0.0], 1e-10, 1e-9).unwrap();
    let o = IntervalUnion::new(&[(0.0, 1.0), (2.0, 3.0)]).unwrap();
    let ri = structure_checks(&BoundaryMatrix::identity(2), &o, 1.0, &[0.0], 1e-10, 1e-9).unwrap();
    let witness = !ri.check("irreducible").map_or(true, |c| c.passed) && ri.invariant_subset.is_some();
    let worst = r1.worst_residual().max(r2.worst_residual());
    line(
        r1.passed() && r2.passed() && worst <= 1e-10 && witness,
        format!("structure checks pass with worst residual {worst:e} (tol 1e-10); B=I irreducibility fails = {witness}"),
    )
}

fn random_fn(rng: &mut ChaCha8Rng, o: &IntervalUnion<f64>) -> impl Fn(f64) -> C + Clone {
    let iv = o.intervals().to_vec();
    let modes: Vec<Vec<(f64, C)>> = iv
        .iter()
        .map(|_| (0..3).map(|_| (rng.gen_range(-4.0..4.0), C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))).collect())
        .collect();
    move |x: f64| {
        let i = iv.iter().position(|&(a, b)| x >= a && x <= b).unwrap_or(0);
        modes[i].iter().map(|&(nu, c)| c * e(nu, x)).sum()
    }
}

fn c7() -> Line {
    let t0 = Instant::now();
    let o = case_two_omega();
    let s = PeriodicSpectrum::new(&[0.0, 1.0 / 3.0], 2.0).unwrap();
    let g = build_group(&o, &s, &Tolerances::default()).unwrap();
    let h = 1e-4;
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let (mut unit, mut law, mut local, mut eig) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..50 {
        let fx = random_fn(&mut rng, &o);
        let f = SampledFunction::from_fn(&o, h, fx);
        let t = h * rng.gen_range(-30000i64..30000) as f64;
        let s2 = h * rng.gen_range(-30000i64..30000) as f64;
        unit = unit.max(g.unitarity_defect(t, &f).unwrap());
        law = law.max(g.group_law_defect(s2, t, &f).unwrap());
        let toff: f64 = rng.gen_range(-0.4..0.4);
        local = local.max(g.local_translation_defect(toff, &f, 1e-3).unwrap());
        let lam = s.first_n(16)[rng.gen_range(0..16)];
        let el = SampledFunction::from_fn(&o, h, |x| e(lam, x));
        let u = g.apply_u(t, &el).unwrap();
        let want: Vec<C> = el.values().iter().map(|v| v * e(lam, t)).collect();
        eig = eig.max(u.distance(&el.with_values(want).unwrap()).unwrap() / el.norm());
    }
    let bl = lattice_boundary_matrix(&[0, 3], s.reps(), 2);
    let br = b_from_spectrum_points(&o, s.reps(), &Tolerances::default()).unwrap().matrix;
    let db = (&bl - br.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let el = t0.elapsed().as_secs_f64();
    line(
        unit <= 1e-7 && law <= 1e-7 && local <= 1e-6 && eig <= 1e-7 && db <= 1e-10 && el < 30.0,
        format!(
            "unitarity {unit:e} (1e-7), group law {law:e} (1e-7), local translation {local:e} (1e-6), eigenrelation {eig:e} (1e-7), lattice B {db:e} (1e-10), {el:.2} s (limit 30 s)"
        ),
    )
}

fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> M {
    M::from_fn(n, n, |_, _| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).qr().q()
}

fn c8() -> Line {
    let mut rng = ChaCha8Rng::seed_from_u64(88);
    let tol = Tolerances::default();
    let (mut worst_slack, mut mismatches) = (0.0f64, 0usize);
    for _ in 0..50 {
        let n = rng.gen_range(1..=5);
        let mut x = rng.gen_range(-1.0..1.0);
        let mut iv = Vec::new();
        for _ in 0..n {
            let l = rng.gen_range(0.1..1.5);
            iv.push((x, x + l));
            x += l + rng.gen_range(0.05..1.0);
        }
        let o = IntervalUnion::new(&iv).unwrap();
        let b = BoundaryMatrix::new(random_unitary(&mut rng, n), 1e-10).unwrap();
        let grid: Vec<f64> = (0..=2000).map(|k| -1.0 + k as f64 * 1e-3).collect();
        let tr = track_eigenphases(&b, &o, &grid).unwrap();
        let (lo, hi) = (-TAU * o.max_len(), -TAU * o.min_len());
        for s in tr.slopes() {
            for v in s {
                worst_slack = worst_slack.max(lo - v).max(v - hi);
            }
        }
        let roots: usize = solve_spectrum(&b, &o, (-1.0, 1.0), &SolverOptions::default()).unwrap().iter().map(|p| p.multiplicity).sum();
        let w = winding_count(&b, &o, -1.0, 1.0, &tol).unwrap() as usize;
        if w != roots || tr.crossings() as usize != roots {
            mismatches += 1;
        }
    }
    let slack = 1e-5 * TAU;
    line(
        worst_slack <= slack && mismatches == 0,
        format!("50 configurations: worst slope excursion {worst_slack:e} (tol {slack:e}), count mismatches {mismatches} (tol 0)"),
    )
}

fn c9() -> Line {
    let o = IntervalUnion::new(&[(0.0, 1.0), (2.0, 3.0)]).unwrap();
    type F = Box<dyn Fn(f64) -> C>;
    let battery: Vec<(F, F)> = vec![
        (Box::new(|_| C::new(1.0, 0.0)), Box::new(|_| C::new(0.0, 0.0))),
        (Box::new(|t| e(1.0, t)), Box::new(|t| e(1.0, t) * C::new(0.0, TAU))),
        (Box::new(|t| C::new(t * t, 0.0)), Box::new(|t| C::new(2.0 * t, 0.0))),
    ];
    let xs = [0.0, 1.0, 2.0, 3.0, 0.05, 0.21, 0.5, 0.618, 0.93, 2.07, 2.3, 2.5, 2.77, 2.95];
    let mut worst = 0.0f64;
    let mut min_order = f64::INFINITY;
    for (f, df) in &battery {
        let s = SmoothSamples::from_fn(&o, 1e-4, f, df);
        for &x in &xs {
            worst = worst.max(verify_reproducing(&o, x, &s, 1e-12).unwrap());
        }
        for &x in &[0.0, 0.5, 2.95] {
            let d: Vec<f64> = [0.02, 0.01, 0.005]
                .iter()
                .map(|&h| verify_reproducing(&o, x, &SmoothSamples::from_fn(&o, h, f, df), 1e-12).unwrap())
                .collect();
            for w in d.windows(2) {
                if w[0] > 1e-12 {
                    min_order = min_order.min((w[0] / w[1]).log2());
                }
            }
        }
    }
    if min_order.is_infinite() {
        min_order = f64::MAX;
    }
    line(
        worst <= 1e-7 && min_order >= 1.9,
        format!("reproducing defect {worst:e} at h=1e-4 (tol 1e-7), observed order {min_order:.2} (required 1.9)"),
    )
}

fn c10() -> Line {
    let o = IntervalUnion::new(&[(0.0, 1.0)]).unwrap();
    let f = TestFunction::Indicator { a: 0.0, b: 0.25 };
    let ns = [64usize, 128, 256, 512];
    let d = parseval_curve(&o, &PeriodicSpectrum::integers(), &f, &ns).unwrap();
    let mono = d.windows(2).all(|w| w[1] < w[0]);
    let perturbed: Vec<f64> = [64usize, 512, 4096, 32768]
        .iter()
        .map(|&n| {
            let mut pts = PeriodicSpectrum::integers().first_n(n);
            pts[0] = 0.37;
            parseval_defect_points(&o, &pts, &f).unwrap()
        })
        .collect();
    let plateau = perturbed[perturbed.len() - 1];
    line(
        d[3] <= 2e-3 && mono && plateau > 1e-2,
        format!(
            "Z defect {:e} at N=512 (tol 2e-3), monotone = {mono}; perturbed defects {perturbed:?} at N=64,512,4096,32768, plateau {plateau:.5} (required > 1e-2)",
            d[3]
        ),
    )
}

fn c11() -> Line {
    let o = IntervalUnion::new(&[(0.0, 0.3), (1.5, 2.2)]).unwrap();
    let mut failures = 0;
    let mut right_reason = 0;
    for j in 0..24 {
        let seed = [0.0, (2 * j + 1) as f64 / 24.0];
        let out = full_pipeline(&o, &seed, (-8.0, 8.0), &SolverOptions::default()).unwrap();
        if !out.succeeded() {
            failures += 1;
        }
        if matches!(out.reason, Some(RejectReason::NotUnitary { .. }) | Some(RejectReason::NotSpectralMatrix { .. })) {
            right_reason += 1;
        }
    }
    line(failures == 24 && right_reason == 24, format!("{failures}/24 seeds rejected, {right_reason}/24 by unitarity or spectral-matrix test"))
}

fn main() {
    let criteria: [(&str, fn() -> Line); 11] = [
        ("two-interval case II spectrum", c1),
        ("two-interval case I", c2),
        ("boundary matrix reconstruction", c3),
        ("Gram identity", c4),
        ("period relation", c5),
        ("structure suite", c6),
        ("translation group properties", c7),
        ("eigenphase tracks", c8),
        ("reproducing kernel", c9),
        ("completeness certificate", c10),
        ("pipeline falsification", c11),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let r = run();
        if !r.passed {
            failed += 1;
        }
        println!("{} criterion {} ({name}): {}", if r.passed { "PASS" } else { "FAIL" }, k + 1, r.detail);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
