#![allow(dead_code)]

use std::f64::consts::TAU;

use bergman_shift::{
    Complex64, DiscretePlanarMeasure, HessenbergTruncation, JacobiSequence, VerblunskySequence,
};
use proptest::prelude::*;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Points of the closed disk of radius `radius`.
pub fn disk(radius: f64) -> impl Strategy<Value = Complex64> {
    (0.0..=1.0f64, 0.0..TAU).prop_map(move |(u, t)| Complex64::from_polar(radius * u.sqrt(), t))
}

pub fn alphas(
    len: impl Into<prop::collection::SizeRange>,
    radius: f64,
) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec(disk(radius), len)
}

pub fn ggt(alphas: &[Complex64]) -> HessenbergTruncation {
    let seq = VerblunskySequence::from_values(alphas.to_vec()).unwrap();
    HessenbergTruncation::ggt(&seq, alphas.len()).unwrap()
}

pub fn jacobi_params(
    len: impl Into<prop::collection::SizeRange> + Clone,
) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (
        prop::collection::vec(0.2..1.0f64, len.clone()),
        prop::collection::vec(-0.5..0.5f64, len),
    )
        .prop_map(|(a, mut b)| {
            b.truncate(a.len());
            b.resize(a.len(), 0.0);
            (a, b)
        })
}

pub fn jacobi(a: &[f64], b: &[f64]) -> HessenbergTruncation {
    let seq = JacobiSequence::from_values(a.to_vec(), b.to_vec()).unwrap();
    HessenbergTruncation::jacobi(&seq, a.len()).unwrap()
}

/// Distinct points spread over `[-1, 1]²` with positive weights.
pub fn discrete(count: usize) -> impl Strategy<Value = DiscretePlanarMeasure> {
    prop::collection::vec(((-1.0..1.0f64), (-1.0..1.0f64), (0.1..1.0f64)), count).prop_map(|pts| {
        let (z, w): (Vec<_>, Vec<_>) = pts.into_iter().map(|(x, y, w)| (c(x, y), w)).unzip();
        DiscretePlanarMeasure::new(z, w).unwrap()
    })
}

/// `(zI − A)^{-1}` entry `(n, n)` (1-based) of a dense matrix by Gaussian elimination.
pub fn resolvent_corner(a: &[Vec<Complex64>], z: Complex64) -> Complex64 {
    let n = a.len();
    let mut m: Vec<Vec<Complex64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { z - a[i][j] } else { -a[i][j] })
                .collect()
        })
        .collect();
    let mut rhs = vec![c(0.0, 0.0); n];
    rhs[n - 1] = c(1.0, 0.0);
    for k in 0..n {
        let p = (k..n)
            .max_by(|&x, &y| m[x][k].norm().total_cmp(&m[y][k].norm()))
            .unwrap();
        m.swap(k, p);
        rhs.swap(k, p);
        for i in k + 1..n {
            let f = m[i][k] / m[k][k];
            let pivot = m[k].clone();
            for (x, v) in m[i].iter_mut().zip(&pivot).skip(k) {
                *x -= f * v;
            }
            let v = rhs[k];
            rhs[i] -= f * v;
        }
    }
    let mut x = vec![c(0.0, 0.0); n];
    for i in (0..n).rev() {
        let s: Complex64 = (i + 1..n).map(|j| m[i][j] * x[j]).sum();
        x[i] = (rhs[i] - s) / m[i][i];
    }
    x[n - 1]
}

pub fn dense_power_diagonal(a: &[Vec<Complex64>], m: usize, n: usize) -> Complex64 {
    let size = a.len();
    let mut v = vec![c(0.0, 0.0); size];
    v[n - 1] = c(1.0, 0.0);
    for _ in 0..m {
        v = (0..size)
            .map(|i| (0..size).map(|k| a[i][k] * v[k]).sum())
            .collect();
    }
    v[n - 1]
}
