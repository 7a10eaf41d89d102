mod common;

use common::*;
use gk_kaczmarz::driver::{run, SolverConfig, Status, StepKind, Variant};
use gk_kaczmarz::search::WindowSize;
use gk_kaczmarz::trace::write_trace_csv;

#[test]
fn six_by_six_terminates_within_six_cycles() {
    let mut rng = rng(66);
    for _ in 0..10 {
        let s = well_conditioned(&mut rng, 6, 6, 1e3);
        let cfg = SolverConfig::new(Variant::AffineFast).with_ell(WindowSize::Bounded(8));
        let trace = run(&s.a, &s.b, &[0.0; 6], Some(&s.x_star), &cfg).unwrap();
        let curve = trace.error_curve().unwrap();
        assert!(curve.iter().take(7).any(|&e| e <= 1e-10), "{curve:?}");
    }
}

#[test]
fn window_one_naive_reproduces_line_search() {
    let mut rng = rng(5);
    let s = sparse_system(&mut rng, 40, 15, 0.3);
    let x0 = vec![0.0; 15];
    let ls = run(
        &s.a,
        &s.b,
        &x0,
        Some(&s.x_star),
        &SolverConfig::new(Variant::LineSearch).with_max_cycles(60),
    )
    .unwrap();
    let aff = run(
        &s.a,
        &s.b,
        &x0,
        Some(&s.x_star),
        &SolverConfig::new(Variant::AffineNaive)
            .with_ell(WindowSize::Bounded(1))
            .with_max_cycles(60),
    )
    .unwrap();
    assert_eq!(ls.solution, aff.solution);
    let (mut a, mut b) = (Vec::new(), Vec::new());
    write_trace_csv(&ls.rows(), &mut a).unwrap();
    write_trace_csv(&aff.rows(), &mut b).unwrap();
    assert_eq!(a, b);
}

#[test]
fn runs_are_bitwise_reproducible() {
    let mut rng = rng(9);
    let s = sparse_system(&mut rng, 60, 25, 0.2);
    for variant in Variant::ALL {
        let cfg = SolverConfig::new(variant)
            .with_ell(WindowSize::Bounded(4))
            .with_seed(7)
            .with_max_cycles(40);
        let a = run(&s.a, &s.b, &[0.0; 25], Some(&s.x_star), &cfg).unwrap();
        let b = run(&s.a, &s.b, &[0.0; 25], Some(&s.x_star), &cfg).unwrap();
        assert_eq!(a, b, "{variant}");
    }
}

#[test]
fn naive_and_fast_error_curves_agree() {
    let mut rng = rng(10);
    for _ in 0..10 {
        let s = well_conditioned(&mut rng, 30, 12, 1e2);
        let go = |v| {
            let cfg = SolverConfig::new(v)
                .with_ell(WindowSize::Bounded(5))
                .with_max_cycles(30);
            run(&s.a, &s.b, &[0.0; 12], Some(&s.x_star), &cfg)
                .unwrap()
                .error_curve()
                .unwrap()
        };
        let (f, n) = (go(Variant::AffineFast), go(Variant::AffineNaive));
        assert_eq!(f.len(), n.len());
        let scale = norm(&s.x_star);
        for (a, b) in f.iter().zip(&n) {
            assert!((a - b).abs() <= 1e-8 * scale, "{a} vs {b}");
        }
    }
}

#[test]
fn random_affine_beats_random_kaczmarz_in_median() {
    let mut rng = rng(50);
    let s = gaussian_system(&mut rng, 50, 20);
    let at30 = |v, seed| {
        let cfg = SolverConfig::new(v)
            .with_ell(WindowSize::Bounded(4))
            .with_seed(seed)
            .with_max_cycles(30);
        let c = run(&s.a, &s.b, &[0.0; 20], Some(&s.x_star), &cfg)
            .unwrap()
            .error_curve()
            .unwrap();
        c[c.len().min(31) - 1]
    };
    let rk = median((0..20).map(|seed| at30(Variant::RandomKaczmarz, seed)).collect());
    let rka = median((0..20).map(|seed| at30(Variant::RandomAffine, seed)).collect());
    assert!(rka <= rk, "RK-AFF {rka:e} vs RK {rk:e}");
}

#[test]
fn unbounded_window_runs() {
    let mut rng = rng(12);
    let s = well_conditioned(&mut rng, 9, 9, 1e3);
    let cfg = SolverConfig::new(Variant::AffineFast).with_ell(WindowSize::Unbounded);
    let trace = run(&s.a, &s.b, &[0.0; 9], Some(&s.x_star), &cfg).unwrap();
    assert_eq!(trace.status, Status::Solved);
    assert!(trace.final_error.unwrap() <= 1e-10);
}

#[test]
fn accelerated_errors_never_increase() {
    let mut rng = rng(13);
    for variant in [
        Variant::LineSearch,
        Variant::AffineNaive,
        Variant::AffineFast,
        Variant::RandomAffine,
    ] {
        let s = sparse_system(&mut rng, 80, 30, 0.2);
        let cfg = SolverConfig::new(variant)
            .with_ell(WindowSize::Bounded(6))
            .with_max_cycles(80);
        let trace = run(&s.a, &s.b, &[0.0; 30], Some(&s.x_star), &cfg).unwrap();
        let curve = trace.error_curve().unwrap();
        let scale = curve[0];
        for (k, r) in trace.records.iter().enumerate() {
            if matches!(r.kind, StepKind::LineSearch | StepKind::Affine) {
                assert!(curve[k + 1] <= r.sweep_error.unwrap() + 1e-12 * scale);
                assert!(r.sweep_error.unwrap() <= curve[k] + 1e-12 * scale);
            }
        }
        let flops: Vec<u64> = trace.records.iter().map(|r| r.cum_flops.0).collect();
        assert!(flops.windows(2).all(|w| w[0] < w[1]));
    }
}
