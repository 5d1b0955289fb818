//! Checks of the fitting routines against independent reference
//! computations that share no code with the implementation.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use tubersg_core::poly::{PUBLISHED_C1, PUBLISHED_C2};
use tubersg_core::{fit_linear_at_frequency, fit_poly4, published_model, FrequencyGrid, Poly4};

/// Slope and intercept from the 2x2 normal equations with raw sums,
/// solved by Cramer's rule.
fn normal_equation_line(pairs: &[(f64, f64)]) -> (f64, f64) {
    let n = pairs.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(x, y) in pairs {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let det = n * sxx - sx * sx;
    ((n * sxy - sx * sy) / det, (sxx * sy - sx * sxy) / det)
}

fn naive_poly(a: &[f64; 5], f: f64) -> f64 {
    let mut s = 0.0;
    for (i, c) in a.iter().enumerate() {
        s += c * f.powi(i as i32);
    }
    s
}

fn rms_residual(a: &[f64; 5], grid: &FrequencyGrid, values: &[f64]) -> f64 {
    let ss: f64 = grid
        .points()
        .iter()
        .zip(values)
        .map(|(&f, v)| (v - naive_poly(a, f)).powi(2))
        .sum();
    (ss / values.len() as f64).sqrt()
}

#[test]
fn noisy_published_slope_recovered_at_one_ghz() {
    let m = published_model();
    let (c1, c2) = m.coefficients_at(1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let noise = Normal::new(0.0, 4.5e-3).unwrap();
    let pairs: Vec<(f64, f64)> = (0..200)
        .map(|_| {
            let sg: f64 = rng.random_range(1.036..1.121);
            let eps = (sg - c2) / c1;
            (eps, sg + noise.sample(&mut rng))
        })
        .collect();
    let fit = fit_linear_at_frequency(&pairs).unwrap();
    let (slope, intercept) = normal_equation_line(&pairs);
    assert!((fit.slope - slope).abs() <= 1e-10 * slope.abs());
    assert!((fit.intercept - intercept).abs() <= 1e-10 * intercept.abs());
    let truth = PUBLISHED_C1.iter().sum::<f64>();
    assert!((truth + 4.113e-3).abs() < 1e-15);
    assert!(
        (fit.slope - truth).abs() <= 0.10 * truth.abs(),
        "slope {} vs {truth}",
        fit.slope
    );
}

#[test]
fn closed_form_matches_normal_equations_on_random_fits() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..1000 {
        let n = rng.random_range(3..120);
        let slope_true = rng.random_range(-0.01..0.0);
        let icpt_true = rng.random_range(1.2..1.5);
        let pairs: Vec<(f64, f64)> = (0..n)
            .map(|_| {
                let x = rng.random_range(40.0..80.0);
                (
                    x,
                    slope_true * x + icpt_true + rng.random_range(-0.01..0.01),
                )
            })
            .collect();
        let fit = fit_linear_at_frequency(&pairs).unwrap();
        let (s, c) = normal_equation_line(&pairs);
        assert!(
            (fit.slope - s).abs() <= 1e-10 * s.abs().max(1e-6),
            "{} vs {s}",
            fit.slope
        );
        assert!((fit.intercept - c).abs() <= 1e-10 * c.abs());
    }
}

#[test]
fn quartic_fit_is_least_squares_optimal() {
    // Brute force: no perturbed candidate beats the fitted coefficients.
    let grid = FrequencyGrid::default_band();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let values: Vec<f64> = grid
            .points()
            .iter()
            .map(|&f| (3.0 * f).sin() + 0.1 * rng.random_range(-1.0..1.0))
            .collect();
        let p = fit_poly4(&grid, &values).unwrap();
        let best = rms_residual(p.coeffs(), &grid, &values);
        for _ in 0..500 {
            let mut cand = *p.coeffs();
            let i = rng.random_range(0..5);
            let scale = 10f64.powi(rng.random_range(-8..-1));
            cand[i] += rng.random_range(-1.0..1.0) * scale;
            assert!(rms_residual(&cand, &grid, &values) >= best * (1.0 - 1e-12));
        }
    }
}

#[test]
fn published_columns_recovered_exactly() {
    let grid = FrequencyGrid::default_band();
    for truth in [PUBLISHED_C1, PUBLISHED_C2] {
        let values: Vec<f64> = grid
            .points()
            .iter()
            .map(|&f| naive_poly(&truth, f))
            .collect();
        let p = fit_poly4(&grid, &values).unwrap();
        for (a, t) in p.coeffs().iter().zip(&truth) {
            assert!((a - t).abs() <= 1e-9 * t.abs());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn quartic_fit_exact_on_degree_four_data(a in prop::array::uniform5(-10.0f64..10.0)) {
        let grid = FrequencyGrid::default_band();
        let values: Vec<f64> = grid.points().iter().map(|&f| naive_poly(&a, f)).collect();
        let p = fit_poly4(&grid, &values).unwrap();
        for (got, want) in p.coeffs().iter().zip(&a) {
            prop_assert!((got - want).abs() <= 1e-9 * want.abs().max(1.0));
        }
    }

    #[test]
    fn horner_matches_naive(a in prop::array::uniform5(-10.0f64..10.0), f in 0.3f64..=3.0) {
        let p = Poly4::new(a, 0.3, 3.0).unwrap();
        let scale: f64 = a.iter().enumerate().map(|(i, c)| c.abs() * f.powi(i as i32)).sum();
        prop_assert!((p.eval(f).unwrap() - naive_poly(&a, f)).abs() <= 1e-12 * scale);
    }
}
