use bslab::one_site::{cdf_one, pi_one, q_one, uniform_limit_check, FixedPointOne, InitialGuess};
use bslab::quad::cumulative_trapezoid;
use bslab::FitnessConfig;
use proptest::prelude::*;

/// Right-hand side of the one-site integral equation, written out directly.
fn rhs(n: usize, x: f64) -> f64 {
    let nf = n as f64;
    let c = (1.0 - (1.0 - x).powi(n as i32 - 1)) / (nf - 1.0);
    let p = (1.0 - x).powi(n as i32 - 2);
    c * q_one(n, x).unwrap() + (1.0 - p) / nf + p * cdf_one(n, x).unwrap()
}

#[test]
fn closed_form_solves_the_integral_equation() {
    for n in [3, 4, 5, 10, 50] {
        for k in 0..1000 {
            let x = k as f64 / 999.0;
            let r = (rhs(n, x) - q_one(n, x).unwrap()).abs();
            assert!(r < 1e-10, "N={n} x={x} residual {r}");
        }
    }
}

#[test]
fn cdf_is_antiderivative() {
    let h = 1e-5;
    let d = (cdf_one(4, 0.5 + h).unwrap() - cdf_one(4, 0.5 - h).unwrap()) / (2.0 * h);
    assert!((d - q_one(4, 0.5).unwrap()).abs() < 1e-8);
    assert!((q_one(4, 0.5).unwrap() - 0.290657).abs() < 1e-6);
    // trapezoid integral of q recovers Q at fine resolution
    let m = 4000;
    let q: Vec<f64> = (0..=m).map(|i| q_one(6, i as f64 / m as f64).unwrap()).collect();
    let c = cumulative_trapezoid(&q, 1.0 / m as f64);
    assert!((c[m] - cdf_one(6, 1.0).unwrap()).abs() < 1e-7);
}

#[test]
fn reference_values() {
    assert_eq!(q_one(4, 1.0).unwrap(), 0.375);
    assert!((q_one(3, 1.0).unwrap() - 2.0 / 3.0).abs() < 1e-15);
    assert!((cdf_one(4, 1.0).unwrap() - 0.25).abs() < 1e-15);
    assert_eq!(cdf_one(7, 0.0).unwrap(), 0.0);
    let ones = FitnessConfig::new(vec![1.0; 4]).unwrap();
    assert!((pi_one(4, &ones).unwrap() - 1.5).abs() < 1e-15);
    let zeros = FitnessConfig::new(vec![0.0; 4]).unwrap();
    assert_eq!(pi_one(4, &zeros).unwrap(), 0.0);
    assert!((uniform_limit_check(1000, 0.5).unwrap() - 1.0).abs() < 0.01);
    assert!((uniform_limit_check(3, 1.0).unwrap() - 2.0).abs() < 1e-14);
}

#[test]
fn fixed_point_is_independent_of_start() {
    let a = FixedPointOne::new(5, 400).tol(1e-12).solve().unwrap();
    let b = FixedPointOne::new(5, 400)
        .tol(1e-12)
        .initial(InitialGuess::Identity)
        .solve()
        .unwrap();
    assert!(a.grid.max_abs_diff(&b.grid).unwrap() < 1e-8);
    assert!(a.grid.values()[0].abs() < 1e-12);
}

#[test]
fn fixed_point_error_is_second_order() {
    let err = |m: usize| {
        let out = FixedPointOne::new(4, m).tol(1e-13).solve().unwrap();
        out.grid
            .nodes()
            .zip(out.grid.values())
            .map(|(x, q)| (q - q_one(4, x).unwrap()).abs())
            .fold(0.0, f64::max)
    };
    let ratio = err(100) / err(200);
    assert!((3.5..4.5).contains(&ratio), "{ratio}");
}

proptest! {
    #[test]
    fn density_nonnegative_and_normalized(n in 3usize..10_000, k in 0usize..1000) {
        let x = k as f64 / 999.0;
        prop_assert!(q_one(n, x).unwrap() >= 0.0);
        prop_assert_eq!(q_one(n, 0.0).unwrap(), 0.0);
        prop_assert!((n as f64 * cdf_one(n, 1.0).unwrap() - 1.0).abs() < 1e-14);
    }
}
