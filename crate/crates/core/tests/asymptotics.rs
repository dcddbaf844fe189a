mod common;

use bergman_shift::asymptotics::{
    beta_term, cesaro_bound_check, cesaro_moment, h_coeff, laurent_ratio, path_sum_diagonal,
    relative_h_profile, relative_ratio_difference, weak_moment,
};
use bergman_shift::polynomials::ratio;
use bergman_shift::{
    degenerate_pair, Complex64, HessenbergTruncation, JacobiSequence, PowerMode, VerblunskySequence,
};
use common::*;
use proptest::prelude::*;

#[test]
fn chebyshev_single_measure_cesaro_bound() {
    let t = HessenbergTruncation::jacobi(&JacobiSequence::constant(0.5, 0.0).unwrap(), 30).unwrap();
    assert!(cesaro_bound_check(&t, &t, 2, 20).unwrap().holds);
}

#[test]
fn degenerate_pair_cesaro_bound() {
    let (mu, nu) = degenerate_pair(410).unwrap();
    let a = HessenbergTruncation::ggt(&mu, 410).unwrap();
    let b = HessenbergTruncation::ggt(&nu, 410).unwrap();
    for n in [100, 200, 400] {
        assert!(cesaro_bound_check(&a, &b, 1, n).unwrap().holds);
    }
}

#[test]
fn shift_has_no_moments() {
    let t = HessenbergTruncation::ggt(&VerblunskySequence::zero(), 30).unwrap();
    for j in 1..6 {
        assert_eq!(weak_moment(&t, j, 10).unwrap(), c(0.0, 0.0));
        assert_eq!(cesaro_moment(&t, j, 10).unwrap(), c(0.0, 0.0));
    }
    assert_eq!(cesaro_moment(&t, 0, 10).unwrap(), c(1.0, 0.0));
}

#[test]
fn reciprocal_differences_shrink_with_n() {
    let a =
        HessenbergTruncation::ggt(&VerblunskySequence::reciprocal(1.0, 2.0).unwrap(), 210).unwrap();
    let b = HessenbergTruncation::ggt(&VerblunskySequence::zero(), 210).unwrap();
    let grid = [25, 50, 100, 200];
    let r: Vec<f64> = grid
        .iter()
        .map(|&n| relative_ratio_difference(&a, &b, 0, n, 2.0, 64, false).unwrap())
        .collect();
    let h = relative_h_profile(&a, &b, 0, 3, &grid).unwrap();
    let hmax: Vec<f64> = grid
        .iter()
        .map(|&n| {
            h.rows
                .iter()
                .filter(|row| row.n == n)
                .fold(0.0f64, |m, row| m.max(row.value.norm()))
        })
        .collect();
    for k in 1..grid.len() {
        assert!(r[k - 1] >= 1.5 * r[k], "{r:?}");
        assert!(hmax[k - 1] >= 1.5 * hmax[k], "{hmax:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn path_sum_splits_into_descent_and_beta(values in alphas(4..=16, 0.9), m in 1usize..=6) {
        let t = ggt(&values);
        for n in m..=t.size() {
            let whole = path_sum_diagonal(&t, m, n, PowerMode::Truncated).unwrap();
            let parts = h_coeff(&t, m - 1, n).unwrap() + beta_term(&t, n, m).unwrap();
            prop_assert!((whole - parts).norm() <= 1e-12);
        }
    }

    #[test]
    fn beta_ignores_the_corner_entry(values in alphas(10..=10, 0.9), m in 2usize..=6, bump in disk(1.0)) {
        let t = ggt(&values);
        let n = 10;
        let mut rows = t.to_dense();
        rows[n - m][n - 1] += bump;
        let u = HessenbergTruncation::from_dense(&rows).unwrap();
        prop_assert!((beta_term(&t, n, m).unwrap() - beta_term(&u, n, m).unwrap()).norm() <= 1e-14);
    }

    #[test]
    fn laurent_partial_sums_stay_within_the_tail_bound(values in alphas(31..=31, 0.85), theta in 0.0..std::f64::consts::TAU) {
        let t = ggt(&values);
        let r = t.norm_bound();
        for n in 1..=30 {
            let l = laurent_ratio(&t, n, 30).unwrap();
            prop_assert_eq!(l.coefficients[0], c(1.0, 0.0));
            for (m, cm) in l.coefficients.iter().enumerate() {
                prop_assert!(cm.norm() <= r.powi(m as i32) * (1.0 + 1e-9));
            }
            for scale in [1.5, 2.0, 3.0] {
                let z = Complex64::from_polar(scale * r, theta);
                let err = (ratio(&t, n, z, false).unwrap() - l.partial_sum(z)).norm();
                prop_assert!(err <= l.tail_bound(r, z));
            }
        }
    }

    #[test]
    fn jacobi_moments_are_real((a, b) in jacobi_params(30..=30), j in 0usize..6, n in 0usize..20) {
        let t = jacobi(&a, &b);
        prop_assert!(weak_moment(&t, j, n).unwrap().im.abs() <= 1e-12);
        if n >= 1 {
            prop_assert!(cesaro_moment(&t, j, n).unwrap().im.abs() <= 1e-12);
        }
    }
}
