//! Small dense complex matrices: products, LU determinants and solves.
//!
//! Used for cross-checks at modest sizes; the structured routines in
//! [`crate::hessenberg`] and [`crate::polynomials`] never form dense powers.

use num_complex::Complex64;

use crate::error::{invalid, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Builds from square rows; panics on ragged input.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let n = rows.len();
        assert!(
            rows.iter().all(|r| r.len() == n),
            "rows must form a square matrix"
        );
        Self {
            n,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// 0-based access.
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.n + j] = v;
    }

    pub fn mul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// `z·I − self`.
    pub fn shifted_negative(&self, z: Complex64) -> DenseMatrix {
        let mut out = self.clone();
        for x in out.data.iter_mut() {
            *x = -*x;
        }
        for i in 0..self.n {
            out.data[i * self.n + i] += z;
        }
        out
    }

    /// LU with partial pivoting; returns the packed factors, the permutation
    /// and the sign of the permutation.
    fn lu(&self) -> (Vec<Complex64>, Vec<usize>, f64) {
        let n = self.n;
        let mut a = self.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        for k in 0..n {
            let p = (k..n)
                .max_by(|&x, &y| a[x * n + k].norm().total_cmp(&a[y * n + k].norm()))
                .unwrap();
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let pivot = a[k * n + k];
            if pivot.norm() == 0.0 {
                continue;
            }
            for i in (k + 1)..n {
                let f = a[i * n + k] / pivot;
                a[i * n + k] = f;
                for j in (k + 1)..n {
                    let t = a[k * n + j];
                    a[i * n + j] -= f * t;
                }
            }
        }
        (a, perm, sign)
    }

    pub fn determinant(&self) -> Complex64 {
        let (a, _, sign) = self.lu();
        (0..self.n).fold(Complex64::new(sign, 0.0), |d, i| d * a[i * self.n + i])
    }

    /// Solves `self · x = rhs`.
    pub fn solve(&self, rhs: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.n;
        if rhs.len() != n {
            return Err(invalid("right-hand side length does not match the matrix"));
        }
        let (a, perm, _) = self.lu();
        if (0..n).any(|i| a[i * n + i].norm() == 0.0) {
            return Err(invalid("matrix is singular"));
        }
        let mut y: Vec<Complex64> = perm.iter().map(|&p| rhs[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let t = a[i * n + j] * y[j];
                y[i] -= t;
            }
        }
        for i in (0..n).rev() {
            for j in (i + 1)..n {
                let t = a[i * n + j] * y[j];
                y[i] -= t;
            }
            y[i] /= a[i * n + i];
        }
        Ok(y)
    }
}
