//! Truncations of the Bergman shift matrix.
//!
//! Public indices follow the usual 1-based matrix convention: `entry(i, j)` is
//! `M_{ij}` with `1 ≤ i, j ≤ N`, and internal 0-based storage is offset by one.
//! Each source keeps the representation its structure allows, so circle and
//! line truncations can be very large without forming an `N×N` array:
//!
//! * `ggt`: Verblunsky coefficients `α_0..α_{N-1}`, with
//!   `M_{ij} = −α_{i−2} ᾱ_{j−1} ∏_{k=i−1}^{j−2} ρ_k` for `i ≤ j`,
//!   `M_{j+1,j} = ρ_{j−1}`, `ρ_k = √(1−|α_k|²)` and `α_{−1} = −1`;
//! * `jacobi`: `b_n` on the diagonal and `a_n` on both off-diagonals;
//! * `arnoldi` and `dense`: a row-major array.

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coefficients::{DiscretePlanarMeasure, JacobiSequence, VerblunskySequence};
use crate::error::{invalid, io_error, Error, Result};
use crate::report::fmt_f64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Norm below which an Arnoldi candidate vector counts as a breakdown.
pub const ARNOLDI_BREAKDOWN: f64 = 1e-13;
/// Largest tolerated deviation of the Arnoldi basis from orthonormality.
pub const ARNOLDI_ORTHOGONALITY_TOL: f64 = 1e-10;

/// Which construction produced a truncation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Ggt,
    Jacobi,
    Arnoldi,
    /// An explicitly supplied Hessenberg matrix.
    Dense,
}

impl Source {
    pub fn as_str(self) -> &'static str {
        match self {
            Source::Ggt => "ggt",
            Source::Jacobi => "jacobi",
            Source::Arnoldi => "arnoldi",
            Source::Dense => "dense",
        }
    }
}

/// Whether a matrix power is taken of the full truncation `M` or of the
/// leading `n×n` block `π_n M π_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerMode {
    /// `((π_n M π_n)^m)_{n,n}`.
    Truncated,
    /// `(M^m)_{n,n}`; fails if the entry would depend on rows past `N`.
    Full,
}

#[derive(Debug, Clone)]
pub(crate) enum Storage {
    Ggt {
        alpha: Vec<Complex64>,
        rho: Vec<f64>,
    },
    /// `a[k] = a_{k+1}` (length `N-1`), `b[k] = b_{k+1}` (length `N`).
    Tridiagonal {
        a: Vec<f64>,
        b: Vec<f64>,
    },
    Dense {
        entries: Vec<Complex64>,
    },
}

/// The `N×N` upper-left corner of the Bergman shift matrix.
#[derive(Debug, Clone)]
pub struct HessenbergTruncation {
    size: usize,
    source: Source,
    pub(crate) storage: Storage,
    norm_bound: f64,
    orthogonality_residual: Option<f64>,
}

/// Metadata written alongside CSV exports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationHeader {
    #[serde(rename = "N")]
    pub size: usize,
    pub source: Source,
    #[serde(rename = "R_est")]
    pub norm_bound: f64,
}

/// `√(1−|α|²)` evaluated as `√((1−|α|)(1+|α|))`.
pub(crate) fn rho_of(alpha: Complex64) -> f64 {
    let r = alpha.norm();
    ((1.0 - r) * (1.0 + r)).sqrt()
}

impl HessenbergTruncation {
    /// GGT truncation from Verblunsky coefficients `α_0..α_{N-1}`.
    pub fn ggt(seq: &VerblunskySequence, size: usize) -> Result<Self> {
        if size == 0 {
            return Err(invalid("truncation size must be positive"));
        }
        let alpha = seq.materialize(size)?;
        Ok(Self::ggt_from_alpha(alpha))
    }

    pub(crate) fn ggt_from_alpha(alpha: Vec<Complex64>) -> Self {
        let size = alpha.len();
        let rho: Vec<f64> = alpha.iter().map(|a| rho_of(*a)).collect();
        // S_i = Σ_{j≥i} |α_{j−1}| ∏_{k=i−1}^{j−2} ρ_k satisfies S_i = |α_{i−1}| + ρ_{i−1} S_{i+1};
        // row i sums to ρ_{i−2} + |α_{i−2}| S_i.
        let mut max_row = 0.0f64;
        let mut tail = 0.0f64;
        for i in (1..=size).rev() {
            tail = alpha[i - 1].norm() + if i < size { rho[i - 1] * tail } else { 0.0 };
            let (sub, lead) = if i >= 2 {
                (rho[i - 2], alpha[i - 2].norm())
            } else {
                (0.0, 1.0)
            };
            max_row = max_row.max(sub + lead * tail);
        }
        // A compression of an isometry has norm at most 1.
        let norm_bound = max_row.min(1.0);
        Self {
            size,
            source: Source::Ggt,
            storage: Storage::Ggt { alpha, rho },
            norm_bound,
            orthogonality_residual: None,
        }
    }

    /// Symmetric tridiagonal truncation from Jacobi parameters.
    pub fn jacobi(seq: &JacobiSequence, size: usize) -> Result<Self> {
        if size == 0 {
            return Err(invalid("truncation size must be positive"));
        }
        let (mut a, b) = seq.materialize(size)?;
        a.truncate(size - 1);
        Self::tridiagonal(a, b)
    }

    pub(crate) fn tridiagonal(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        let size = b.len();
        if a.len() + 1 != size {
            return Err(invalid("tridiagonal storage needs N-1 off-diagonal values"));
        }
        if let Some(k) = a.iter().position(|x| !(*x > 0.0)) {
            return Err(Error::InvalidCoefficient {
                index: k + 1,
                reason: format!("a_{} = {} is not positive", k + 1, a[k]),
            });
        }
        let norm_bound = (0..size).fold(0.0f64, |m, k| {
            let left = if k > 0 { a[k - 1] } else { 0.0 };
            let right = if k + 1 < size { a[k] } else { 0.0 };
            m.max(left + b[k].abs() + right)
        });
        Ok(Self {
            size,
            source: Source::Jacobi,
            storage: Storage::Tridiagonal { a, b },
            norm_bound,
            orthogonality_residual: None,
        })
    }

    /// Arnoldi (classical Gram–Schmidt applied twice) realization of the shift
    /// on `L²(μ)` for a discrete measure; requires `N ≤ count − 1`.
    pub fn arnoldi(mu: &DiscretePlanarMeasure, size: usize) -> Result<Self> {
        if size == 0 {
            return Err(invalid("truncation size must be positive"));
        }
        if size + 1 > mu.count() {
            return Err(invalid(format!(
                "a measure with {} support points has orthonormal polynomials only up to degree {}, \
                 so N must be at most {}",
                mu.count(),
                mu.count() - 1,
                mu.count() - 1
            )));
        }
        let points = mu.points();
        let count = points.len();
        // q_k[s] = √w_s p_k(z_s): the weighted inner product becomes the Euclidean one.
        let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(size);
        basis.push(
            mu.weights()
                .iter()
                .map(|w| Complex64::new(w.sqrt(), 0.0))
                .collect(),
        );
        let mut entries = vec![ZERO; size * size];

        for col in 0..size {
            let mut v: Vec<Complex64> = basis[col].iter().zip(points).map(|(q, z)| q * z).collect();
            for _pass in 0..2 {
                let coeffs: Vec<Complex64> = basis
                    .iter()
                    .map(|q| q.iter().zip(&v).map(|(qi, vi)| qi.conj() * vi).sum())
                    .collect();
                for (row, (c, q)) in coeffs.iter().zip(&basis).enumerate() {
                    for (vi, qi) in v.iter_mut().zip(q) {
                        *vi -= c * qi;
                    }
                    entries[row * size + col] += c;
                }
            }
            if col + 1 == size {
                break;
            }
            let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            if norm < ARNOLDI_BREAKDOWN {
                return Err(Error::DegenerateMeasure { degree: col + 1 });
            }
            entries[(col + 1) * size + col] = Complex64::new(norm, 0.0);
            basis.push(v.into_iter().map(|x| x / norm).collect());
        }

        let mut residual = 0.0f64;
        for i in 0..basis.len() {
            for j in 0..=i {
                let ip: Complex64 = basis[i]
                    .iter()
                    .zip(&basis[j])
                    .map(|(a, b)| b.conj() * a)
                    .sum();
                let target = if i == j { ONE } else { ZERO };
                residual = residual.max((ip - target).norm());
            }
        }
        debug_assert_eq!(basis[0].len(), count);
        if residual > ARNOLDI_ORTHOGONALITY_TOL {
            return Err(Error::DegenerateMeasure {
                degree: basis.len() - 1,
            });
        }

        let mut t = Self::dense_unchecked(size, entries, Source::Arnoldi);
        t.orthogonality_residual = Some(residual);
        Ok(t)
    }

    /// Wraps an explicit square upper-Hessenberg matrix given as rows.
    pub fn from_dense(rows: &[Vec<Complex64>]) -> Result<Self> {
        let size = rows.len();
        if size == 0 || rows.iter().any(|r| r.len() != size) {
            return Err(invalid("dense input must be a non-empty square matrix"));
        }
        for (i, row) in rows.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                if i > j + 1 && *x != ZERO {
                    return Err(invalid(format!(
                        "entry ({}, {}) lies below the first subdiagonal but is nonzero",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        let entries = rows.iter().flatten().copied().collect();
        Ok(Self::dense_unchecked(size, entries, Source::Dense))
    }

    fn dense_unchecked(size: usize, entries: Vec<Complex64>, source: Source) -> Self {
        let norm_bound = (0..size).fold(0.0f64, |m, i| {
            m.max(
                entries[i * size..(i + 1) * size]
                    .iter()
                    .map(|x| x.norm())
                    .sum(),
            )
        });
        Self {
            size,
            source,
            storage: Storage::Dense { entries },
            norm_bound,
            orthogonality_residual: None,
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn source(&self) -> Source {
        self.source
    }

    /// `R_est`: a bound on the norm of the truncation and all its leading blocks.
    ///
    /// For `jacobi`, `arnoldi` and `dense` sources this is the maximum absolute
    /// row sum. For `ggt` it is additionally capped at 1.
    pub fn norm_bound(&self) -> f64 {
        self.norm_bound
    }

    /// `max_{i,j} |⟨p_i,p_j⟩ − δ_ij|` of the Arnoldi basis, when available.
    pub fn orthogonality_residual(&self) -> Option<f64> {
        self.orthogonality_residual
    }

    pub fn header(&self) -> TruncationHeader {
        TruncationHeader {
            size: self.size,
            source: self.source,
            norm_bound: self.norm_bound,
        }
    }

    /// Verblunsky coefficients backing a `ggt` truncation.
    pub fn verblunsky(&self) -> Option<&[Complex64]> {
        match &self.storage {
            Storage::Ggt { alpha, .. } => Some(alpha),
            _ => None,
        }
    }

    /// `M_{ij}` without bounds checks beyond a debug assertion (1-based).
    pub(crate) fn at(&self, i: usize, j: usize) -> Complex64 {
        debug_assert!(i >= 1 && j >= 1 && i <= self.size && j <= self.size);
        if i > j + 1 {
            return ZERO;
        }
        match &self.storage {
            Storage::Ggt { alpha, rho } => {
                if i == j + 1 {
                    return Complex64::new(rho[j - 1], 0.0);
                }
                let lead = if i >= 2 { alpha[i - 2] } else { -ONE };
                let prod: f64 = rho[(i - 1)..(j - 1)].iter().product();
                -lead * alpha[j - 1].conj() * prod
            }
            Storage::Tridiagonal { a, b } => {
                if i == j {
                    Complex64::new(b[i - 1], 0.0)
                } else if i + 1 == j {
                    Complex64::new(a[i - 1], 0.0)
                } else if i == j + 1 {
                    Complex64::new(a[j - 1], 0.0)
                } else {
                    ZERO
                }
            }
            Storage::Dense { entries } => entries[(i - 1) * self.size + (j - 1)],
        }
    }

    fn check(&self, i: usize, what: &str) -> Result<()> {
        if i == 0 || i > self.size {
            return Err(Error::Bounds(format!(
                "{what} {i} outside 1..={} for an N = {} truncation",
                self.size, self.size
            )));
        }
        Ok(())
    }

    /// `M_{ij}` (1-based).
    pub fn entry(&self, i: usize, j: usize) -> Result<Complex64> {
        self.check(i, "row")?;
        self.check(j, "column")?;
        Ok(self.at(i, j))
    }

    /// `M_{j+1,j}` for `1 ≤ j ≤ N−1`.
    pub fn subdiagonal(&self, j: usize) -> Result<Complex64> {
        self.check(j + 1, "subdiagonal row")?;
        Ok(self.at(j + 1, j))
    }

    /// `κ_{n−2}/κ_{n−1} = M_{n,n−1}` for `2 ≤ n ≤ N`.
    pub fn kappa_ratio(&self, n: usize) -> Result<Complex64> {
        if n < 2 {
            return Err(Error::Bounds(format!("kappa ratio needs n ≥ 2, got {n}")));
        }
        self.check(n, "kappa-ratio index")?;
        Ok(self.at(n, n - 1))
    }

    /// `h_{j,n} = (κ_{n−1−j}/κ_{n−1}) M_{n−j,n} = ∏_{l<j} M_{n−l,n−l−1} · M_{n−j,n}`.
    pub fn descent_weight(&self, j: usize, n: usize) -> Result<Complex64> {
        self.check(n, "index")?;
        if j >= n {
            return Err(Error::Bounds(format!(
                "h_{{j,n}} needs j ≤ n−1 (j = {j}, n = {n})"
            )));
        }
        Ok(self.descent_weight_unchecked(j, n))
    }

    pub(crate) fn descent_weight_unchecked(&self, j: usize, n: usize) -> Complex64 {
        match &self.storage {
            // h_{j,n} = −α_{n−j−2} ᾱ_{n−1} ∏_{k=n−j−1}^{n−2} ρ_k²
            Storage::Ggt { alpha, rho } => {
                let lead = if n - j >= 2 { alpha[n - j - 2] } else { -ONE };
                let prod: f64 = rho[(n - j - 1)..(n - 1)].iter().map(|r| r * r).product();
                -lead * alpha[n - 1].conj() * prod
            }
            _ => {
                let mut w = self.at(n - j, n);
                for l in 0..j {
                    w *= self.at(n - l, n - l - 1);
                }
                w
            }
        }
    }

    /// Dense copy as rows.
    pub fn to_dense(&self) -> Vec<Vec<Complex64>> {
        let n = self.size;
        let flat = self.leading_row_major(n);
        flat.chunks(n).map(|r| r.to_vec()).collect()
    }

    /// Leading `n×n` block, row-major, in `O(n²)` for every storage kind.
    pub(crate) fn leading_row_major(&self, n: usize) -> Vec<Complex64> {
        debug_assert!(n <= self.size);
        let mut out = vec![ZERO; n * n];
        match &self.storage {
            Storage::Ggt { alpha, rho } => {
                for i in 1..=n {
                    let lead = if i >= 2 { alpha[i - 2] } else { -ONE };
                    if i >= 2 {
                        out[(i - 1) * n + (i - 2)] = Complex64::new(rho[i - 2], 0.0);
                    }
                    let mut prod = 1.0;
                    for j in i..=n {
                        if j > i {
                            prod *= rho[j - 2];
                        }
                        out[(i - 1) * n + (j - 1)] = -lead * alpha[j - 1].conj() * prod;
                    }
                }
            }
            _ => {
                for i in 1..=n {
                    for j in i.saturating_sub(1).max(1)..=n {
                        out[(i - 1) * n + (j - 1)] = self.at(i, j);
                    }
                }
            }
        }
        out
    }

    /// Leading `n×n` block as a new truncation with the same source tag.
    pub fn leading(&self, n: usize) -> Result<Self> {
        self.check(n, "leading block size")?;
        Ok(match &self.storage {
            Storage::Ggt { alpha, .. } => Self::ggt_from_alpha(alpha[..n].to_vec()),
            Storage::Tridiagonal { a, b } => {
                Self::tridiagonal(a[..n - 1].to_vec(), b[..n].to_vec())?
            }
            Storage::Dense { .. } => {
                let entries = self.leading_row_major(n);
                let mut t = Self::dense_unchecked(n, entries, self.source);
                t.orthogonality_residual = self.orthogonality_residual;
                t
            }
        })
    }

    /// Euclidean norm of column `j`.
    pub fn column_norm(&self, j: usize) -> Result<f64> {
        self.check(j, "column")?;
        Ok((1..=self.size.min(j + 1))
            .map(|i| self.at(i, j).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    /// The `(2m+1)×(2m+1)` window centered on `M_{n,n}`.
    pub fn window(&self, center: usize, half_width: usize) -> Result<MatrixWindow> {
        if center <= half_width || center + half_width > self.size {
            return Err(Error::Bounds(format!(
                "window of half-width {half_width} at {center} needs {} ≤ n−m and n+m ≤ {}",
                1, self.size
            )));
        }
        let w = 2 * half_width + 1;
        let first = center - half_width;
        let mut entries = Vec::with_capacity(w * w);
        for r in 0..w {
            for c in 0..w {
                entries.push(self.at(first + r, first + c));
            }
        }
        Ok(MatrixWindow {
            center,
            half_width,
            entries,
        })
    }

    /// `(A^m)_{n,n}` where `A` is `M` or `π_n M π_n` according to `mode`.
    ///
    /// Evaluated as `e_nᵀ A^m e_n` by repeated row-vector products. A path
    /// `n → i_1 → … → n` through a Hessenberg matrix drops at most one index
    /// per step, so only indices in `[n−k, n+m−k]` can matter after `k` steps.
    pub fn power_diagonal(&self, m: usize, n: usize, mode: PowerMode) -> Result<Complex64> {
        self.check(n, "index")?;
        let cap = match mode {
            PowerMode::Truncated => n,
            PowerMode::Full => {
                if m >= 1 && n + m - 1 > self.size {
                    return Err(Error::TruncationContamination {
                        index: n,
                        power: m,
                        size: self.size,
                    });
                }
                self.size
            }
        };
        Ok(self.power_entry(n, m, cap))
    }

    /// `((π_cap M π_cap)^m)_{start,start}` for `start ≤ cap ≤ N`.
    pub(crate) fn power_entry(&self, start: usize, m: usize, cap: usize) -> Complex64 {
        if m == 0 {
            return ONE;
        }
        let lo_at = |k: usize| start.saturating_sub(k).max(1);
        let hi_at = |k: usize| (start + m - k).min(cap);
        let mut lo = start;
        let mut v = vec![ONE];
        for k in 1..=m {
            let (nlo, nhi) = (lo_at(k), hi_at(k));
            let hi = lo + v.len() - 1;
            let mut next = vec![ZERO; nhi + 1 - nlo];
            for (slot, j) in next.iter_mut().zip(nlo..=nhi) {
                let top = hi.min(j + 1);
                let mut acc = ZERO;
                for i in lo..=top {
                    let vi = v[i - lo];
                    if vi != ZERO {
                        acc += vi * self.at(i, j);
                    }
                }
                *slot = acc;
            }
            lo = nlo;
            v = next;
        }
        v[start - lo]
    }

    /// Writes `i,j,re,im` for every nonzero entry, row by row.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = io_error;
        w.write_record(["i", "j", "re", "im"]).map_err(io)?;
        for i in 1..=self.size {
            for j in i.saturating_sub(1).max(1)..=self.size {
                let x = self.at(i, j);
                if x != ZERO {
                    w.write_record([i.to_string(), j.to_string(), fmt_f64(x.re), fmt_f64(x.im)])
                        .map_err(io)?;
                }
            }
        }
        w.flush().map_err(io_error)?;
        Ok(())
    }
}

/// A `(2m+1)×(2m+1)` block of a truncation centered on a diagonal entry.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixWindow {
    pub center: usize,
    pub half_width: usize,
    /// Row-major entries.
    pub entries: Vec<Complex64>,
}

impl MatrixWindow {
    pub fn width(&self) -> usize {
        2 * self.half_width + 1
    }

    /// Entry at 0-based `(r, c)` within the window.
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.entries[r * self.width() + c]
    }

    /// `max |self − other|` entrywise; windows must have equal width.
    pub fn distance(&self, other: &MatrixWindow) -> Result<f64> {
        if self.half_width != other.half_width {
            return Err(invalid(format!(
                "cannot compare windows of half-widths {} and {}",
                self.half_width, other.half_width
            )));
        }
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .fold(0.0, |m, (a, b)| m.max((a - b).norm())))
    }
}
