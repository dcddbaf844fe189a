//! Zeros of `P_n` as eigenvalues of the leading `n×n` block.
//!
//! Upper-Hessenberg blocks go through a single-shift complex QR iteration
//! with Givens rotations; symmetric tridiagonal blocks use the implicit QL
//! iteration. Zeros are listed with multiplicity and sorted by modulus, then
//! by argument.

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hessenberg::{HessenbergTruncation, Storage};
use crate::polynomials::newton_quotient;
use crate::report::{fmt_f64, write_csv};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
/// QR/QL sweeps allowed per deflated eigenvalue.
pub const MAX_SWEEPS: usize = 100;

/// Zeros of `P_n` with their Newton residual.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroSet {
    pub degree: usize,
    pub zeros: Vec<Complex64>,
    /// `max_i |P_n(z_i)/P_n'(z_i)|`.
    pub residual: f64,
}

/// Statistics written alongside the zero CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroSummary {
    pub degree: usize,
    pub count: usize,
    pub max_residual: f64,
    pub mean_residual: f64,
    pub max_modulus: f64,
}

fn canonical_sort(zs: &mut [Complex64]) {
    zs.sort_by(|a, b| {
        a.norm()
            .total_cmp(&b.norm())
            .then(a.arg().total_cmp(&b.arg()))
    });
}

/// Eigenvalues of an `n×n` upper-Hessenberg matrix stored row-major.
pub fn hessenberg_eigenvalues(mut h: Vec<Complex64>, n: usize) -> Result<Vec<Complex64>> {
    assert_eq!(h.len(), n * n);
    let idx = |i: usize, j: usize| i * n + j;
    let mut out = Vec::with_capacity(n);
    if n == 0 {
        return Ok(out);
    }
    let norm = h.iter().fold(0.0f64, |m, x| m.max(x.norm()));
    let tiny = f64::MIN_POSITIVE * n as f64 / f64::EPSILON;
    let mut lo = 0usize;
    let mut hi = n - 1;
    let mut sweeps = 0usize;
    loop {
        if lo > hi {
            break;
        }
        if lo == hi {
            out.push(h[idx(hi, hi)]);
            if hi == 0 {
                break;
            }
            hi -= 1;
            lo = 0;
            sweeps = 0;
            continue;
        }
        // Split at the lowest negligible subdiagonal in the active range.
        let mut split = lo;
        for l in (lo + 1..=hi).rev() {
            let sub = h[idx(l, l - 1)].norm();
            let mut scale = h[idx(l - 1, l - 1)].norm() + h[idx(l, l)].norm();
            if scale == 0.0 {
                scale = norm;
            }
            if sub <= f64::EPSILON * scale || sub <= tiny {
                h[idx(l, l - 1)] = ZERO;
                split = l;
                break;
            }
        }
        lo = split;
        if lo == hi {
            continue;
        }
        // A column with nothing above the diagonal splits off its diagonal entry.
        if (lo..hi).all(|i| h[idx(i, hi)] == ZERO) {
            out.push(h[idx(hi, hi)]);
            hi -= 1;
            lo = 0;
            sweeps = 0;
            continue;
        }
        if hi - lo == 1 {
            let (a, b, c, d) = (
                h[idx(lo, lo)],
                h[idx(lo, hi)],
                h[idx(hi, lo)],
                h[idx(hi, hi)],
            );
            let (l1, l2) = eig2(a, b, c, d);
            out.push(l1);
            out.push(l2);
            if lo == 0 {
                break;
            }
            hi = lo - 1;
            lo = 0;
            sweeps = 0;
            continue;
        }
        sweeps += 1;
        if sweeps > MAX_SWEEPS {
            return Err(Error::EigenNonConvergence { degree: n });
        }
        let shift = if sweeps.is_multiple_of(10) {
            h[idx(hi, hi)] + 0.75 * h[idx(hi, hi - 1)].re.abs()
        } else {
            let (a, b, c, d) = (
                h[idx(hi - 1, hi - 1)],
                h[idx(hi - 1, hi)],
                h[idx(hi, hi - 1)],
                h[idx(hi, hi)],
            );
            let (l1, l2) = eig2(a, b, c, d);
            if (l1 - d).norm() <= (l2 - d).norm() {
                l1
            } else {
                l2
            }
        };
        qr_sweep(&mut h, n, lo, hi, shift);
    }
    Ok(out)
}

/// Eigenvalues of `[[a, b], [c, d]]`.
fn eig2(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> (Complex64, Complex64) {
    let mean = (a + d) * 0.5;
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let l1 = mean + disc;
    // Recover the smaller root through the product to avoid cancellation.
    let det = a * d - b * c;
    let l2 = if l1.norm() > 0.0 && (mean - disc).norm() < 1e-8 * l1.norm() {
        det / l1
    } else {
        mean - disc
    };
    (l1, l2)
}

/// One shifted QR step `H − σI = QR`, `H ← RQ + σI` on rows/columns `lo..=hi`.
fn qr_sweep(h: &mut [Complex64], n: usize, lo: usize, hi: usize, shift: Complex64) {
    let idx = |i: usize, j: usize| i * n + j;
    for k in lo..=hi {
        h[idx(k, k)] -= shift;
    }
    let mut rots = Vec::with_capacity(hi - lo);
    for k in lo..hi {
        let x = h[idx(k, k)];
        let y = h[idx(k + 1, k)];
        let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
        let (c, s) = if r == 0.0 {
            (Complex64::new(1.0, 0.0), ZERO)
        } else {
            (x / r, y / r)
        };
        for col in k..=hi {
            let a = h[idx(k, col)];
            let b = h[idx(k + 1, col)];
            h[idx(k, col)] = c.conj() * a + s.conj() * b;
            h[idx(k + 1, col)] = -s * a + c * b;
        }
        rots.push((c, s));
    }
    for (off, (c, s)) in rots.into_iter().enumerate() {
        let k = lo + off;
        for row in lo..=(k + 1).min(hi) {
            let a = h[idx(row, k)];
            let b = h[idx(row, k + 1)];
            h[idx(row, k)] = a * c + b * s;
            h[idx(row, k + 1)] = -a * s.conj() + b * c.conj();
        }
    }
    for k in lo..=hi {
        h[idx(k, k)] += shift;
    }
}

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `d` and
/// off-diagonal `e` (`e.len() + 1 == d.len()`), by implicit QL.
pub fn tridiagonal_eigenvalues(mut d: Vec<f64>, e: &[f64]) -> Result<Vec<f64>> {
    let n = d.len();
    assert_eq!(e.len() + 1, n.max(1));
    let mut e: Vec<f64> = e.iter().copied().chain(std::iter::once(0.0)).collect();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_SWEEPS {
                return Err(Error::EigenNonConvergence { degree: n });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0f64, 1.0f64, 0.0f64);
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(d)
}

/// Zeros of `P_n` for `1 ≤ n ≤ N`.
pub fn zeros(trunc: &HessenbergTruncation, n: usize) -> Result<ZeroSet> {
    if n == 0 || n > trunc.size() {
        return Err(Error::Bounds(format!(
            "zeros need 1 ≤ n ≤ {}, got {n}",
            trunc.size()
        )));
    }
    let mut zs = match &trunc.storage {
        Storage::Tridiagonal { a, b } => tridiagonal_eigenvalues(b[..n].to_vec(), &a[..n - 1])?
            .into_iter()
            .map(|x| Complex64::new(x, 0.0))
            .collect(),
        _ => hessenberg_eigenvalues(trunc.leading_row_major(n), n)?,
    };
    canonical_sort(&mut zs);
    let mut residual = 0.0f64;
    for z in &zs {
        residual = residual.max(newton_quotient(trunc, n, *z)?.norm());
    }
    Ok(ZeroSet {
        degree: n,
        zeros: zs,
        residual,
    })
}

/// `(1/n) Σ z_i^j` over the zeros.
pub fn zero_moments(zs: &ZeroSet, j: u32) -> Complex64 {
    if j == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let sum: Complex64 = zs.zeros.iter().map(|z| z.powu(j)).sum();
    sum / zs.zeros.len() as f64
}

impl ZeroSet {
    pub fn summary(&self, trunc: &HessenbergTruncation) -> Result<ZeroSummary> {
        let residuals = self
            .zeros
            .iter()
            .map(|z| newton_quotient(trunc, self.degree, *z).map(|q| q.norm()))
            .collect::<Result<Vec<_>>>()?;
        Ok(ZeroSummary {
            degree: self.degree,
            count: self.zeros.len(),
            max_residual: self.residual,
            mean_residual: residuals.iter().sum::<f64>() / residuals.len() as f64,
            max_modulus: self.zeros.iter().fold(0.0f64, |m, z| m.max(z.norm())),
        })
    }

    /// CSV with header `n,index,re,im`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_csv(
            out,
            &["n", "index", "re", "im"],
            self.zeros.iter().enumerate().map(|(i, z)| {
                [
                    self.degree.to_string(),
                    i.to_string(),
                    fmt_f64(z.re),
                    fmt_f64(z.im),
                ]
            }),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotics::cesaro_moment;
    use crate::coefficients::{JacobiSequence, VerblunskySequence};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn wobbly(n: usize) -> HessenbergTruncation {
        let seq = VerblunskySequence::from_fn(|k| {
            Complex64::from_polar(0.8 * ((k as f64) * 2.1).sin().abs(), 0.6 * k as f64)
        });
        HessenbergTruncation::ggt(&seq, n).unwrap()
    }

    #[test]
    fn shift_has_zero_roots() {
        let t = HessenbergTruncation::ggt(&VerblunskySequence::zero(), 12).unwrap();
        let zs = zeros(&t, 12).unwrap();
        assert_eq!(zs.zeros, vec![ZERO; 12]);
        assert_eq!(zs.residual, 0.0);
        assert_eq!(zero_moments(&zs, 3), ZERO);
        assert_eq!(zero_moments(&zs, 0), c(1.0, 0.0));
    }

    #[test]
    fn chebyshev_pair() {
        let t =
            HessenbergTruncation::jacobi(&JacobiSequence::constant(0.5, 0.0).unwrap(), 6).unwrap();
        let zs = zeros(&t, 2).unwrap();
        assert!((zs.zeros[0] - c(0.5, 0.0)).norm() < 1e-15);
        assert!((zs.zeros[1] - c(-0.5, 0.0)).norm() < 1e-15);
        assert!((zero_moments(&zs, 2) - c(0.25, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn trace_identity() {
        let t = wobbly(10);
        let zs = zeros(&t, 10).unwrap();
        let trace: Complex64 = (1..=10).map(|i| t.entry(i, i).unwrap()).sum();
        let sum: Complex64 = zs.zeros.iter().sum();
        assert!((trace - sum).norm() < 1e-10);
        assert!(zs.zeros.iter().all(|z| z.norm() < 1.0 + 1e-8));
        assert!(zs.residual < 1e-7, "{}", zs.residual);
    }

    #[test]
    fn power_sums_match_traces() {
        let t = wobbly(30);
        for n in [1, 7, 30] {
            let zs = zeros(&t, n).unwrap();
            for j in 0..=6 {
                let a = zero_moments(&zs, j);
                let b = cesaro_moment(&t, j as usize, n).unwrap();
                assert!((a - b).norm() < 1e-8, "n={n} j={j}");
            }
        }
    }

    #[test]
    fn general_dense_path() {
        let rows = vec![
            vec![c(1.0, 0.0), c(2.0, 1.0), c(0.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 1.0), c(3.0, 0.0)],
            vec![c(0.0, 0.0), c(0.5, 0.0), c(-1.0, 0.0)],
        ];
        let t = HessenbergTruncation::from_dense(&rows).unwrap();
        let zs = zeros(&t, 3).unwrap();
        assert!(zs.residual < 1e-12);
        let sum: Complex64 = zs.zeros.iter().sum();
        assert!((sum - c(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn interlacing_on_the_line() {
        let seq = JacobiSequence::from_fns(
            |n| 0.3 + 0.2 * (n as f64).sin().abs(),
            |n| 0.4 * (1.7 * n as f64).cos(),
            1.0,
        )
        .unwrap();
        let t = HessenbergTruncation::jacobi(&seq, 25).unwrap();
        let real = |n| {
            let mut v: Vec<f64> = zeros(&t, n).unwrap().zeros.iter().map(|z| z.re).collect();
            v.sort_by(f64::total_cmp);
            v
        };
        for n in 1..24 {
            let (a, b) = (real(n), real(n + 1));
            for i in 0..n {
                assert!(b[i] < a[i] && a[i] < b[i + 1], "n={n}");
            }
        }
    }

    #[test]
    fn csv_layout() {
        let zs = ZeroSet {
            degree: 2,
            zeros: vec![c(0.5, 0.0), c(-0.5, 0.0)],
            residual: 0.0,
        };
        let mut buf = Vec::new();
        zs.write_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "n,index,re,im\n2,0,0.5,0\n2,1,-0.5,0\n"
        );
    }
}
