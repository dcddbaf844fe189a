mod common;

use bergman_shift::polynomials::{circle_grid, eval_monic, evaluate, kappa, ratio};
use bergman_shift::{HessenbergTruncation, JacobiSequence, VerblunskySequence};
use common::*;
use proptest::prelude::*;

#[test]
fn chebyshev_ratio_fixed_point() {
    let t =
        HessenbergTruncation::jacobi(&JacobiSequence::constant(0.5, 0.0).unwrap(), 210).unwrap();
    let r = ratio(&t, 200, c(2.0, 0.0), false).unwrap();
    assert!((r - c(4.0 - 2.0 * 3f64.sqrt(), 0.0)).norm() <= 1e-8);
}

#[test]
fn shift_ratio_is_reciprocal() {
    let t = HessenbergTruncation::ggt(&VerblunskySequence::zero(), 40).unwrap();
    for z in [c(2.0, 0.0), c(0.5, -1.5), c(-3.0, 0.25)] {
        for normalized in [false, true] {
            assert!((ratio(&t, 30, z, normalized).unwrap() - z.inv()).norm() <= 1e-15);
        }
    }
}

#[test]
fn zero_of_the_polynomial_is_a_pole() {
    let t = HessenbergTruncation::jacobi(&JacobiSequence::constant(0.5, 0.0).unwrap(), 10).unwrap();
    assert!(ratio(&t, 1, c(0.0, 0.0), false).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ratio_is_a_resolvent_entry(values in alphas(31..=31, 0.8), n in 1usize..=30, theta in 0.0..std::f64::consts::TAU) {
        let t = ggt(&values);
        let z = bergman_shift::Complex64::from_polar(2.0 * t.norm_bound(), theta);
        let want = resolvent_corner(&t.leading(n).unwrap().to_dense(), z);
        prop_assert!((ratio(&t, n, z, false).unwrap() - want).norm() <= 1e-10);
    }

    #[test]
    fn jacobi_ratio_is_a_resolvent_entry((a, b) in jacobi_params(31..=31), n in 1usize..=30, theta in 0.0..std::f64::consts::TAU) {
        let t = jacobi(&a, &b);
        let z = bergman_shift::Complex64::from_polar(2.0 * t.norm_bound(), theta);
        let want = resolvent_corner(&t.leading(n).unwrap().to_dense(), z);
        prop_assert!((ratio(&t, n, z, false).unwrap() - want).norm() <= 1e-10);
    }

    #[test]
    fn ratios_obey_the_resolvent_bound(values in alphas(60..=60, 0.95)) {
        let t = ggt(&values);
        let r_est = t.norm_bound();
        let r = 2.0 * r_est;
        for n in 1..t.size() {
            for z in circle_grid(r, 64) {
                let v = ratio(&t, n, z, false).unwrap().norm();
                prop_assert!(v <= 1.0 / (r - r_est) + 0.1);
            }
        }
    }

    #[test]
    fn kappa_times_subdiagonals_is_one((a, b) in jacobi_params(40..=40), n in 1usize..40) {
        let t = jacobi(&a, &b);
        let prod: f64 = (1..=n).map(|j| t.subdiagonal(j).unwrap().re).product();
        prop_assert!((kappa(&t, n).unwrap() * prod - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn orthonormal_is_kappa_times_monic(values in alphas(30..=30, 0.9), n in 0usize..30, re in -2.0..2.0f64, im in -2.0..2.0f64) {
        let t = ggt(&values);
        let e = evaluate(&t, n, c(re, im)).unwrap();
        prop_assert!((e.orthonormal - e.monic * e.kappa).norm() <= 1e-12 * e.orthonormal.norm().max(1e-300));
        prop_assert_eq!(e.monic, eval_monic(&t, n, c(re, im)).unwrap());
    }
}
