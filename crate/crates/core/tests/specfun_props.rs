mod common;

use common::{graded, rel, series_2f1};
use harmonia::quadrature::{integrate_de, QuadSettings};
use harmonia::specfun::{beta, gamma, hyp2f1, hyp2f1_euler, hyp2f1_series, AccuracyBudget};
use proptest::prelude::*;

/// `(β, γ)` patterns appearing in the bound coefficients, as functions of s.
pub fn patterns(s: f64) -> [(f64, f64); 6] {
    [
        (1.0, s + 2.0),
        (1.0, s + 3.0),
        (2.0, s + 3.0),
        (s + 1.0, s + 2.0),
        (s + 1.0, s + 3.0),
        (s + 2.0, s + 3.0),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn beta_symmetric(a in 0.01f64..40.0, b in 0.01f64..40.0) {
        let (x, y) = (beta(a, b).unwrap(), beta(b, a).unwrap());
        prop_assert!(rel(x, y) <= 1e-13, "B({a},{b}) = {x}, B({b},{a}) = {y}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn beta_matches_integral(a in 0.05f64..=4.0, b in 0.05f64..=4.0) {
        // Split at 1/2 and reflect the right half so both singular ends sit at zero.
        let quad = QuadSettings::new(1e-14, 1e-13, 16).unwrap();
        let left = integrate_de(|t: f64| t.powf(a - 1.0) * (1.0 - t).powf(b - 1.0), 0.0, 0.5, &quad).unwrap();
        let right = integrate_de(|u: f64| (1.0 - u).powf(a - 1.0) * u.powf(b - 1.0), 0.0, 0.5, &quad).unwrap();
        let direct = left.value + right.value;
        let closed = beta(a, b).unwrap();
        prop_assert!((closed - direct).abs() <= 1e-9, "B({a},{b}) = {closed}, integral {direct}");
    }

    #[test]
    fn hyp2f1_nondecreasing_in_z(q in 1.0f64..5.0, s in 0.05f64..=1.0, k in 0usize..6, z in 0.0f64..0.85, dz in 1e-6f64..0.05) {
        let (b, c) = patterns(s)[k];
        let budget = AccuracyBudget::default();
        let lo = hyp2f1(2.0 * q, b, c, z, &budget).unwrap();
        let hi = hyp2f1(2.0 * q, b, c, z + dz, &budget).unwrap();
        prop_assert!(hi >= lo * (1.0 - 1e-12), "F({z}) = {lo} > F({}) = {hi}", z + dz);
    }
}

#[test]
fn gamma_recurrence() {
    for i in 1..=100 {
        let x = 0.1 * i as f64;
        let lhs = gamma(x + 1.0).unwrap();
        let rhs = x * gamma(x).unwrap();
        assert!(rel(lhs, rhs) <= 1e-12, "x = {x}: {lhs} vs {rhs}");
    }
}

#[test]
fn gamma_against_products() {
    // Γ(n + 1/2) = (2n)! √π / (4^n n!)
    let sqrt_pi = std::f64::consts::PI.sqrt();
    let mut fact = [1.0f64; 21];
    for n in 1..=20 {
        fact[n] = fact[n - 1] * n as f64;
    }
    for n in 0..=10 {
        let exact = fact[2 * n] * sqrt_pi / (4f64.powi(n as i32) * fact[n]);
        assert!(rel(gamma(n as f64 + 0.5).unwrap(), exact) <= 1e-13);
    }
}

#[test]
fn euler_and_series_agree_on_bound_grid() {
    let budget = AccuracyBudget::default();
    let mut worst: f64 = 0.0;
    for q in [1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0] {
        for s in [0.1, 0.25, 0.5, 0.75, 1.0] {
            for (b, c) in patterns(s) {
                for zi in 0..=18 {
                    let z = 0.05 * zi as f64;
                    let e = hyp2f1_euler(2.0 * q, b, c, z, &budget).unwrap();
                    let sr = hyp2f1_series(2.0 * q, b, c, z, &budget).unwrap();
                    let d = rel(e, sr);
                    worst = worst.max(d);
                    assert!(d <= 1e-10, "2F1({}, {b}; {c}; {z}): euler {e}, series {sr}", 2.0 * q);
                }
            }
        }
    }
    assert!(worst <= 1e-10);
}

#[test]
fn hyp2f1_against_independent_oracles() {
    let budget = AccuracyBudget::default();
    for z in [0.1f64, 0.3, 0.5, 0.7, 0.9] {
        let log_form = -(1.0 - z).ln() / z;
        assert!(rel(hyp2f1(1.0, 1.0, 2.0, z, &budget).unwrap(), log_form) <= 1e-12);
    }
    // 2F1(2,1;3;1/2) from the series, and from Σ 2z^k/(k+2) = 2[-ln(1-z) - z]/z².
    let z: f64 = 0.5;
    let closed = 2.0 * (-(1.0 - z).ln() - z) / (z * z);
    let v = hyp2f1(2.0, 1.0, 3.0, z, &budget).unwrap();
    assert!(rel(v, series_2f1(2.0, 1.0, 3.0, z)) <= 1e-13);
    assert!(rel(v, closed) <= 1e-13);
    assert!((v - 1.545_177_444_479_562_5).abs() < 1e-14);

    // Euler integral by the graded Gauss-Legendre oracle.
    for &(a, b, c, z) in &[(3.0, 1.25, 3.25, 0.6), (6.0, 2.0, 3.5, 0.85), (2.0, 1.5, 2.5, 0.3)] {
        let integral = graded(|t: f64| t.powf(b - 1.0) * (1.0 - t).powf(c - b - 1.0) * (1.0 - z * t).powf(-a), 0.0, 1.0);
        let oracle = integral / beta(b, c - b).unwrap();
        assert!(rel(hyp2f1(a, b, c, z, &budget).unwrap(), oracle) <= 1e-11);
    }
}

#[test]
fn hyp2f1_domain() {
    let budget = AccuracyBudget::default();
    assert_eq!(hyp2f1(3.0, 1.0, 2.5, 0.0, &budget).unwrap(), 1.0);
    assert!(hyp2f1(1.0, 1.0, 2.0, 1.0, &budget).is_err());
    assert!(hyp2f1(1.0, 2.0, 2.0, 0.5, &budget).is_err());
    assert!(hyp2f1(1.0, 1.0, 2.0, -0.1, &budget).is_err());
}
