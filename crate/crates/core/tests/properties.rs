mod common;

use common::*;
use gk_kaczmarz::flops::Flops;
use gk_kaczmarz::kernel::{project_row, sweep_cycle, sweep_epoch_random, EpochPlan, PlanSource, Weighting};
use gk_kaczmarz::search::{line_search_step, SearchWindow, WindowSize};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn ringed(alphas: &[f64]) -> DMatrix<f64> {
    let w = alphas.len();
    DMatrix::from_fn(w, w, |i, k| alphas[i.max(k)..].iter().sum())
}

/// A window grown by `steps` fast steps on a slowly converging system.
fn grown_window(seed: u64, ell: usize, steps: usize) -> (System, SearchWindow) {
    let mut rng = rng(seed);
    let n = 12 + (seed % 10) as usize;
    let s = gaussian_system(&mut rng, n + 2, n);
    let mut window = SearchWindow::new(WindowSize::Bounded(ell), normal_vec(&mut rng, n));
    for _ in 0..steps {
        let out = sweep_cycle(&s.a, &s.b, window.current());
        window.fast_step(&out, &mut Flops::default()).unwrap();
    }
    (s, window)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn projection_lands_on_hyperplane(seed in any::<u64>(), m in 1usize..6, n in 1usize..8) {
        let mut rng = rng(seed);
        let s = gaussian_system(&mut rng, m, n);
        let x = normal_vec(&mut rng, n);
        for j in 0..m {
            let y = project_row(&s.a, j, s.b[j], &x);
            let row = s.a.row(j);
            let lhs = row.dot(&y);
            let scale = row.norm_sq.sqrt() * norm(&y).max(norm(&x)) + s.b[j].abs();
            prop_assert!((lhs - s.b[j]).abs() <= 1e-12 * scale.max(1.0));
        }
    }

    #[test]
    fn identity_plan_matches_cycle(seed in any::<u64>(), m in 1usize..10, n in 1usize..10) {
        let mut rng = rng(seed);
        let s = sparse_system(&mut rng, m, n, 0.5);
        let x = normal_vec(&mut rng, n);
        prop_assert_eq!(sweep_epoch_random(&s.a, &s.b, &x, &EpochPlan::identity(m)), sweep_cycle(&s.a, &s.b, &x));
    }

    #[test]
    fn plans_are_reproducible(seed in any::<u64>(), epoch in any::<u64>(), squared in any::<bool>()) {
        let mut rng = rng(seed);
        let s = sparse_system(&mut rng, 9, 4, 0.5);
        let w = if squared { Weighting::SquaredNorm } else { Weighting::Uniform };
        let p1 = PlanSource::new(&s.a, seed, w).plan(epoch);
        let p2 = PlanSource::new(&s.a, seed, w).plan(epoch);
        prop_assert!(p1.indices.iter().all(|&i| i < 9));
        prop_assert_eq!(p1, p2);
    }

    #[test]
    fn line_search_gain_is_exact(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let s = gaussian_system(&mut rng, 8, 5);
        let x = normal_vec(&mut rng, 5);
        let out = sweep_cycle(&s.a, &s.b, &x);
        let step = line_search_step(&x, &out, &mut Flops::default()).unwrap();
        let measured = dist(&x, &s.x_star).powi(2) - dist(&step.x_next, &s.x_star).powi(2);
        prop_assert!((measured - step.solution.predicted_gain).abs() <= 1e-10 * step.solution.predicted_gain);
    }

    #[test]
    fn window_gram_is_ringed(seed in any::<u64>(), ell in 2usize..7, extra in 0usize..4) {
        let (_, window) = grown_window(seed, ell, ell - 1 + extra);
        let its: Vec<&[f64]> = window.iterates().collect();
        let x = *its.last().unwrap();
        let v: Vec<Vec<f64>> = its[..its.len() - 1].iter().map(|p| sub(p, x)).collect();
        let g = { let m = columns(&v); m.transpose() * m };
        let alphas: Vec<f64> = window.alphas().collect();
        let b = ringed(&alphas);
        prop_assert!((g - &b).norm() <= 1e-9 * b.norm());
    }

    #[test]
    fn gram_update_adds_gain(seed in any::<u64>(), ell in 2usize..6) {
        // after a step, ⟨x_i − x_next, x_j − x_next⟩ = (VᵀV)_ij + γ s̲ and
        // ⟨x_i − x_next, x_k − x_next⟩ = γ s̲
        let (s, mut window) = grown_window(seed, ell + 1, ell - 1);
        let before: Vec<Vec<f64>> = window.iterates().map(<[f64]>::to_vec).collect();
        let x = before.last().unwrap().clone();
        let v: Vec<Vec<f64>> = before[..before.len() - 1].iter().map(|p| sub(p, &x)).collect();
        let out = sweep_cycle(&s.a, &s.b, &x);
        let step = window.fast_step(&out, &mut Flops::default()).unwrap();
        let alpha = step.solution.gamma * step.solution.s_under;
        let scale = v.iter().map(|c| dot(c, c)).fold(alpha, f64::max);
        for i in 0..before.len() {
            for j in 0..before.len() {
                let new = dot(&sub(&before[i], &step.x_next), &sub(&before[j], &step.x_next));
                let old = if i < v.len() && j < v.len() { dot(&v[i], &v[j]) } else { 0.0 };
                prop_assert!((new - old - alpha).abs() <= 1e-8 * scale, "({i},{j}): {new} vs {old} + {alpha}");
            }
        }
    }

    #[test]
    fn planar_gain(seed in any::<u64>()) {
        let (s, mut window) = grown_window(seed, 2, 1);
        let its: Vec<Vec<f64>> = window.iterates().map(<[f64]>::to_vec).collect();
        let x = its[1].clone();
        let u = sub(&its[0], &x);
        let out = sweep_cycle(&s.a, &s.b, &x);
        let d = sub(&out.endpoint, &x);
        let cos2 = dot(&u, &d).powi(2) / (dot(&u, &u) * dot(&d, &d));
        let ls = line_search_step(&x, &out, &mut Flops::default()).unwrap().solution.predicted_gain;
        let before = dist(&x, &s.x_star).powi(2);
        let step = window.fast_step(&out, &mut Flops::default()).unwrap();
        let measured = before - dist(&step.x_next, &s.x_star).powi(2);
        let expected = ls / (1.0 - cos2);
        prop_assert!((measured - expected).abs() <= 1e-7 * expected, "{measured} vs {expected}");
    }

    #[test]
    fn gains_telescope(seed in any::<u64>(), ell in 2usize..6, steps in 1usize..12) {
        let mut rng = rng(seed);
        let n = 15;
        let s = gaussian_system(&mut rng, n + 1, n);
        let x0 = normal_vec(&mut rng, n);
        let mut window = SearchWindow::new(WindowSize::Bounded(ell), x0.clone());
        let mut total = 0.0;
        for _ in 0..steps {
            let out = sweep_cycle(&s.a, &s.b, window.current());
            total += window.fast_step(&out, &mut Flops::default()).unwrap().solution.predicted_gain;
        }
        let measured = dist(&x0, &s.x_star).powi(2) - dist(window.current(), &s.x_star).powi(2);
        prop_assert!((measured - total).abs() <= 1e-8 * measured, "{measured} vs {total}");
    }

    #[test]
    fn naive_and_fast_steps_agree(seed in any::<u64>(), ell in 1usize..6) {
        let (s, window) = grown_window(seed, ell, ell - 1);
        let out = sweep_cycle(&s.a, &s.b, window.current());
        let (mut fw, mut nw) = (window.clone(), window);
        let f = fw.fast_step(&out, &mut Flops::default()).unwrap();
        let n = nw.naive_step(&out, &mut Flops::default()).unwrap();
        prop_assert!(dist(&f.x_next, &n.x_next) <= 1e-8 * norm(&n.x_next));
        prop_assert!((f.solution.s_under - n.solution.s_under).abs() <= 1e-8 * n.solution.s_under);
    }
}
