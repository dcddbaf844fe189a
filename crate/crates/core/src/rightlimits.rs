//! Finite-window diagnostics for right limits.
//!
//! A right limit is observed operationally: windows `A_n^{(m)}` of half-width
//! `m` are extracted along a subsequence and declared converged when their
//! spread over the tail of the subsequence is at most `ε`.

use std::io::Write;
use std::ops::RangeInclusive;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::hessenberg::{HessenbergTruncation, MatrixWindow};
use crate::polynomials::{circle_grid, MonicStepper};
use crate::report::{fmt_f64, write_csv};

/// Minimum subsequence length for a right-limit estimate.
pub const MIN_SUBSEQUENCE: usize = 4;

/// Indices `n_1 < n_2 < …` along which windows are taken.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SubsequenceSpec {
    Explicit {
        indices: Vec<usize>,
    },
    /// `offset, offset + stride, …`, up to `end` or the largest admissible index.
    Arithmetic {
        offset: usize,
        stride: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        end: Option<usize>,
    },
}

impl SubsequenceSpec {
    /// Parses `"3,5,9"` (explicit) or `"offset:stride[:end]"` (arithmetic).
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        let num = |s: &str| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| invalid(format!("subsequence: '{s}' is not a non-negative integer")))
        };
        if text.contains(':') {
            let parts: Vec<&str> = text.split(':').collect();
            let (offset, stride, end) = match parts.as_slice() {
                [o, s] => (num(o)?, num(s)?, None),
                [o, s, e] => (num(o)?, num(s)?, Some(num(e)?)),
                _ => {
                    return Err(invalid(format!(
                        "subsequence '{text}' is not offset:stride[:end]"
                    )))
                }
            };
            let spec = SubsequenceSpec::Arithmetic {
                offset,
                stride,
                end,
            };
            spec.validate()?;
            Ok(spec)
        } else {
            let indices = text
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(num)
                .collect::<Result<Vec<_>>>()?;
            let spec = SubsequenceSpec::Explicit { indices };
            spec.validate()?;
            Ok(spec)
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            SubsequenceSpec::Explicit { indices } => {
                if indices.first() == Some(&0) {
                    return Err(invalid("subsequence indices start at 1"));
                }
                if indices.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(invalid("subsequence indices must be strictly increasing"));
                }
            }
            SubsequenceSpec::Arithmetic { offset, stride, .. } => {
                if *offset == 0 || *stride == 0 {
                    return Err(invalid(
                        "arithmetic subsequence needs offset ≥ 1 and stride ≥ 1",
                    ));
                }
            }
        }
        Ok(())
    }

    /// Concrete indices, all at most `limit`. Explicit lists must fit; an
    /// arithmetic progression is cut at `limit`.
    pub fn resolve(&self, limit: usize) -> Result<Vec<usize>> {
        self.validate()?;
        match self {
            SubsequenceSpec::Explicit { indices } => {
                if let Some(&bad) = indices.iter().find(|&&i| i > limit) {
                    return Err(Error::Bounds(format!(
                        "subsequence index {bad} exceeds {limit}"
                    )));
                }
                Ok(indices.clone())
            }
            SubsequenceSpec::Arithmetic {
                offset,
                stride,
                end,
            } => {
                let last = end.map_or(limit, |e| e.min(limit));
                Ok((*offset..=last).step_by(*stride).collect())
            }
        }
    }

    /// The subsequence `n − k`; indices that would drop below 1 are an error.
    pub fn shifted_down(&self, k: usize) -> Result<Self> {
        let spec = match self {
            SubsequenceSpec::Explicit { indices } => SubsequenceSpec::Explicit {
                indices: indices.iter().map(|i| i.saturating_sub(k)).collect(),
            },
            SubsequenceSpec::Arithmetic {
                offset,
                stride,
                end,
            } => SubsequenceSpec::Arithmetic {
                offset: offset.saturating_sub(k),
                stride: *stride,
                end: end.map(|e| e.saturating_sub(k)),
            },
        };
        spec.validate()?;
        Ok(spec)
    }
}

fn window_indices(
    trunc: &HessenbergTruncation,
    sub: &SubsequenceSpec,
    m: usize,
) -> Result<Vec<usize>> {
    let limit = trunc
        .size()
        .checked_sub(m)
        .ok_or_else(|| Error::Bounds(format!("half-width {m} exceeds N = {}", trunc.size())))?;
    let indices = sub.resolve(limit)?;
    if let Some(&bad) = indices.iter().find(|&&i| i <= m) {
        return Err(Error::Bounds(format!(
            "window of half-width {m} at index {bad} reaches row 0"
        )));
    }
    Ok(indices)
}

/// Windows along a subsequence and their spread over its second half.
#[derive(Debug, Clone, PartialEq)]
pub struct RightLimitEstimate {
    pub half_width: usize,
    /// Window at the last subsequence index.
    pub window: MatrixWindow,
    pub dispersion: f64,
    pub epsilon: f64,
    pub converged: bool,
    pub indices: Vec<usize>,
}

/// Index at which the tail (second half) of a length-`len` list starts.
fn tail_start(len: usize) -> usize {
    len / 2
}

/// Extracts windows at every subsequence index; dispersion is the largest
/// entrywise distance to the final window over the tail half.
pub fn detect_right_limit(
    trunc: &HessenbergTruncation,
    sub: &SubsequenceSpec,
    half_width: usize,
    epsilon: f64,
) -> Result<RightLimitEstimate> {
    let indices = window_indices(trunc, sub, half_width)?;
    if indices.len() < MIN_SUBSEQUENCE {
        return Err(Error::InsufficientData(format!(
            "a right-limit estimate needs at least {MIN_SUBSEQUENCE} indices, got {}",
            indices.len()
        )));
    }
    let last = trunc.window(*indices.last().unwrap(), half_width)?;
    let mut dispersion = 0.0f64;
    for &n in &indices[tail_start(indices.len())..] {
        dispersion = dispersion.max(trunc.window(n, half_width)?.distance(&last)?);
    }
    Ok(RightLimitEstimate {
        half_width,
        window: last,
        dispersion,
        epsilon,
        converged: dispersion <= epsilon,
        indices,
    })
}

/// One paired comparison `(k, n_k, m_k, j, sup_diff)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairedRow {
    pub k: usize,
    pub n_k: usize,
    pub m_k: usize,
    pub j: i64,
    pub sup_diff: f64,
}

/// Per-pair differences plus the maximum over the tail half of the pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedComparison {
    pub rows: Vec<PairedRow>,
    pub tail_max: f64,
}

impl PairedComparison {
    fn new(rows: Vec<PairedRow>, pairs: usize) -> Self {
        let start = tail_start(pairs);
        let tail_max = rows
            .iter()
            .filter(|r| r.k >= start)
            .fold(0.0f64, |m, r| m.max(r.sup_diff));
        Self { rows, tail_max }
    }

    /// CSV with header `k,n_k,m_k,j,sup_diff`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_csv(
            out,
            &["k", "n_k", "m_k", "j", "sup_diff"],
            self.rows.iter().map(|r| {
                [
                    r.k.to_string(),
                    r.n_k.to_string(),
                    r.m_k.to_string(),
                    r.j.to_string(),
                    fmt_f64(r.sup_diff),
                ]
            }),
        )
    }
}

fn paired(a: Vec<usize>, b: Vec<usize>) -> Result<Vec<(usize, usize)>> {
    if a.len() != b.len() {
        return Err(invalid(format!(
            "paired subsequences must have equal length ({} vs {})",
            a.len(),
            b.len()
        )));
    }
    if a.is_empty() {
        return Err(invalid("paired subsequences are empty"));
    }
    Ok(a.into_iter().zip(b).collect())
}

/// `max |A^{(m)}_{n_k} − B^{(m)}_{m_k}|` entrywise for each pair `k`.
pub fn right_limit_difference(
    a: &HessenbergTruncation,
    b: &HessenbergTruncation,
    sub_a: &SubsequenceSpec,
    sub_b: &SubsequenceSpec,
    half_width: usize,
) -> Result<PairedComparison> {
    let pairs = paired(
        window_indices(a, sub_a, half_width)?,
        window_indices(b, sub_b, half_width)?,
    )?;
    let rows = pairs
        .iter()
        .enumerate()
        .map(|(k, &(n, m))| {
            Ok(PairedRow {
                k,
                n_k: n,
                m_k: m,
                j: 0,
                sup_diff: a
                    .window(n, half_width)?
                    .distance(&b.window(m, half_width)?)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PairedComparison::new(rows, pairs.len()))
}

fn check_radius(radius: f64, truncs: &[&HessenbergTruncation]) -> Result<()> {
    let r_max = truncs.iter().fold(0.0f64, |m, t| m.max(t.norm_bound()));
    if !(radius > r_max) {
        return Err(invalid(format!(
            "radius {radius} must exceed the norm bound {r_max}"
        )));
    }
    Ok(())
}

/// Normalized ratios `p_{d−1}/p_d` at every degree `1..=max_degree` on one point.
fn normalized_profile(
    t: &HessenbergTruncation,
    z: Complex64,
    max_degree: usize,
) -> Result<Vec<Complex64>> {
    let mut s = MonicStepper::new(t, z);
    let mut out = Vec::with_capacity(max_degree + 1);
    out.push(Complex64::new(f64::NAN, f64::NAN));
    for _ in 0..max_degree {
        s.step()?;
        out.push(s.normalized_ratio()?);
    }
    Ok(out)
}

/// For each pair `(n_k, m_k)` and each `j` in `js`, the maximum over `points`
/// grid points on `|z| = radius` of
/// `|p_{n_k+j−1}/p_{n_k+j}(A) − p_{m_k+j−1}/p_{m_k+j}(B)|`.
#[allow(clippy::too_many_arguments)]
pub fn normalized_ratio_difference(
    a: &HessenbergTruncation,
    b: &HessenbergTruncation,
    sub_a: &SubsequenceSpec,
    sub_b: &SubsequenceSpec,
    js: RangeInclusive<i64>,
    radius: f64,
    points: usize,
) -> Result<PairedComparison> {
    check_radius(radius, &[a, b])?;
    if points == 0 || js.is_empty() {
        return Err(invalid("need at least one grid point and one offset j"));
    }
    let (j_lo, j_hi) = (*js.start(), *js.end());
    let degree = |n: usize, j: i64, t: &HessenbergTruncation| -> Result<usize> {
        let d = n as i64 + j;
        if d < 1 || d as usize + 1 > t.size() {
            return Err(Error::Bounds(format!(
                "normalized ratio at degree {d} needs 1 ≤ d ≤ N − 1 = {}",
                t.size() as i64 - 1
            )));
        }
        Ok(d as usize)
    };
    let pairs = paired(sub_a.resolve(usize::MAX)?, sub_b.resolve(usize::MAX)?)?;
    let mut max_a = 0;
    let mut max_b = 0;
    for &(n, m) in &pairs {
        for j in [j_lo, j_hi] {
            max_a = max_a.max(degree(n, j, a)?);
            max_b = max_b.max(degree(m, j, b)?);
        }
    }
    let width = (j_hi - j_lo + 1) as usize;
    let mut sup = vec![0.0f64; pairs.len() * width];
    for z in circle_grid(radius, points) {
        let pa = normalized_profile(a, z, max_a)?;
        let pb = normalized_profile(b, z, max_b)?;
        for (k, &(n, m)) in pairs.iter().enumerate() {
            for (jj, j) in js.clone().enumerate() {
                let d = (pa[degree(n, j, a)?] - pb[degree(m, j, b)?]).norm();
                let slot = &mut sup[k * width + jj];
                *slot = slot.max(d);
            }
        }
    }
    let rows = pairs
        .iter()
        .enumerate()
        .flat_map(|(k, &(n, m))| {
            let sup = &sup;
            js.clone().enumerate().map(move |(jj, j)| PairedRow {
                k,
                n_k: n,
                m_k: m,
                j,
                sup_diff: sup[k * width + jj],
            })
        })
        .collect();
    Ok(PairedComparison::new(rows, pairs.len()))
}

/// Result of the window-matching search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BestMatch {
    pub distance: f64,
    /// The minimizing index `m`.
    pub index: usize,
}

/// `min_{k < m ≤ H} max_z |p_{m−1}/p_m(z; A) − p_{n−1}/p_n(z; B)|` over the
/// `points`-point grid on `|z| = radius`.
///
/// All grid points advance together, so memory is `O(points)`. Needs
/// `H + 1 ≤ N(A)` and `n + 1 ≤ N(B)`.
pub fn best_match_distance(
    a: &HessenbergTruncation,
    b: &HessenbergTruncation,
    n: usize,
    k: usize,
    radius: f64,
    points: usize,
    horizon: usize,
) -> Result<BestMatch> {
    check_radius(radius, &[a, b])?;
    if k >= horizon {
        return Err(invalid(format!("empty search range ({k}, {horizon}]")));
    }
    if n == 0 || points == 0 {
        return Err(invalid("need n ≥ 1 and at least one grid point"));
    }
    if horizon + 1 > a.size() {
        return Err(Error::Bounds(format!(
            "search horizon {horizon} needs a truncation of size {} (have {})",
            horizon + 1,
            a.size()
        )));
    }
    let grid = circle_grid(radius, points);
    let targets = grid
        .iter()
        .map(|&z| {
            let mut s = MonicStepper::new(b, z);
            s.advance_to(n)?;
            s.normalized_ratio()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut steppers: Vec<MonicStepper> = grid.iter().map(|&z| MonicStepper::new(a, z)).collect();
    for s in steppers.iter_mut() {
        s.advance_to(k)?;
    }
    let mut best = BestMatch {
        distance: f64::INFINITY,
        index: k + 1,
    };
    for m in (k + 1)..=horizon {
        let mut sup = 0.0f64;
        for (s, t) in steppers.iter_mut().zip(&targets) {
            s.step()?;
            sup = sup.max((s.normalized_ratio()? - t).norm());
        }
        if sup < best.distance {
            best = BestMatch {
                distance: sup,
                index: m,
            };
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::{
        alexandrov, degenerate_pair, strip, JacobiSequence, VerblunskySequence,
    };

    fn cheb(n: usize) -> HessenbergTruncation {
        HessenbergTruncation::jacobi(&JacobiSequence::constant(0.5, 0.0).unwrap(), n).unwrap()
    }

    fn every(from: usize, to: usize) -> SubsequenceSpec {
        SubsequenceSpec::Arithmetic {
            offset: from,
            stride: 1,
            end: Some(to),
        }
    }

    #[test]
    fn parsing() {
        assert_eq!(
            SubsequenceSpec::parse("3,5, 9").unwrap(),
            SubsequenceSpec::Explicit {
                indices: vec![3, 5, 9]
            }
        );
        let a = SubsequenceSpec::parse("2:3").unwrap();
        assert_eq!(a.resolve(12).unwrap(), vec![2, 5, 8, 11]);
        assert_eq!(
            SubsequenceSpec::parse("2:3:8")
                .unwrap()
                .resolve(100)
                .unwrap(),
            vec![2, 5, 8]
        );
        assert!(SubsequenceSpec::parse("5,3").is_err());
        assert!(SubsequenceSpec::parse("0:2").is_err());
        assert!(SubsequenceSpec::parse("a:b").is_err());
        assert!(SubsequenceSpec::Explicit {
            indices: vec![3, 50]
        }
        .resolve(10)
        .is_err());
    }

    #[test]
    fn constant_windows_converge() {
        let est = detect_right_limit(&cheb(60), &SubsequenceSpec::parse("5:7").unwrap(), 2, 1e-12)
            .unwrap();
        assert_eq!(est.dispersion, 0.0);
        assert!(est.converged);
        assert!(matches!(
            detect_right_limit(
                &cheb(60),
                &SubsequenceSpec::parse("5,9,20").unwrap(),
                1,
                1e-3
            ),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn periodic_two_limits() {
        let t = HessenbergTruncation::jacobi(
            &JacobiSequence::periodic(vec![1.0, 2.0], vec![0.0]).unwrap(),
            40,
        )
        .unwrap();
        let even =
            detect_right_limit(&t, &SubsequenceSpec::parse("2:2").unwrap(), 1, 1e-12).unwrap();
        let odd =
            detect_right_limit(&t, &SubsequenceSpec::parse("3:2").unwrap(), 1, 1e-12).unwrap();
        assert!(even.converged && odd.converged);
        // even n: a_{n−1} = 1 above-left, a_n = 2 below-right
        assert_eq!(even.window.get(0, 1).re, 1.0);
        assert_eq!(even.window.get(1, 2).re, 2.0);
        assert_eq!(odd.window.get(0, 1).re, 2.0);
        assert_eq!(odd.window.get(1, 2).re, 1.0);
    }

    #[test]
    fn decaying_to_shift() {
        let t = HessenbergTruncation::ggt(&VerblunskySequence::reciprocal(1.0, 2.0).unwrap(), 220)
            .unwrap();
        let est = detect_right_limit(&t, &every(100, 200), 1, 0.02).unwrap();
        assert!(est.converged, "{}", est.dispersion);
        let shift = HessenbergTruncation::ggt(&VerblunskySequence::zero(), 220).unwrap();
        assert!(est.window.distance(&shift.window(200, 1).unwrap()).unwrap() < 0.02);
    }

    #[test]
    fn stripping_shifts_windows() {
        let seq =
            VerblunskySequence::from_fn(|n| Complex64::from_polar(0.5, 0.37 * (n * n) as f64));
        let t = HessenbergTruncation::ggt(&seq, 80).unwrap();
        let s = HessenbergTruncation::ggt(&strip(&seq, 3).unwrap(), 77).unwrap();
        let sub = SubsequenceSpec::parse("10:5").unwrap();
        let a = detect_right_limit(&t, &sub, 2, 1e-3).unwrap();
        let b = detect_right_limit(&s, &sub.shifted_down(3).unwrap(), 2, 1e-3).unwrap();
        assert!(a.window.distance(&b.window).unwrap() <= 1e-14);
        assert!((a.dispersion - b.dispersion).abs() <= 1e-14);
    }

    #[test]
    fn alexandrov_only_touches_first_row() {
        let seq = VerblunskySequence::reciprocal(1.0, 2.0).unwrap();
        let t = HessenbergTruncation::ggt(&seq, 60).unwrap();
        let l = HessenbergTruncation::ggt(&alexandrov(&seq, Complex64::i()).unwrap(), 60).unwrap();
        let sub = every(5, 50);
        let d = right_limit_difference(&t, &l, &sub, &sub, 3).unwrap();
        assert!(d.rows.iter().all(|r| r.sup_diff <= 1e-14));
        assert!(right_limit_difference(&t, &l, &every(5, 50), &every(5, 40), 1).is_err());
    }

    #[test]
    fn degenerate_diagonal_gap() {
        let (mu, nu) = degenerate_pair(520).unwrap();
        let a = HessenbergTruncation::ggt(&mu, 520).unwrap();
        let b = HessenbergTruncation::ggt(&nu, 520).unwrap();
        let d = right_limit_difference(&a, &b, &every(400, 500), &every(400, 500), 0).unwrap();
        assert!((d.tail_max - 2.0 * 0.5f64.sin()).abs() < 1e-2);
    }

    #[test]
    fn ratio_differences() {
        let seq = VerblunskySequence::reciprocal(1.0, 2.0).unwrap();
        let t = HessenbergTruncation::ggt(&seq, 80).unwrap();
        let s = HessenbergTruncation::ggt(&strip(&seq, 2).unwrap(), 78).unwrap();
        let sub = SubsequenceSpec::parse("10:10:60").unwrap();
        let same = normalized_ratio_difference(&t, &t, &sub, &sub, -2..=2, 2.0, 16).unwrap();
        assert_eq!(same.tail_max, 0.0);
        let shifted = normalized_ratio_difference(
            &t,
            &s,
            &sub,
            &sub.shifted_down(2).unwrap(),
            -2..=2,
            2.0,
            16,
        )
        .unwrap();
        assert!(shifted.tail_max <= 1e-12, "{}", shifted.tail_max);
        assert!(normalized_ratio_difference(&t, &t, &sub, &sub, 0..=0, 0.5, 16).is_err());
    }

    #[test]
    fn grid_refinement_is_stable() {
        let seq = VerblunskySequence::reciprocal(1.0, 2.0).unwrap();
        let t = HessenbergTruncation::ggt(&seq, 200).unwrap();
        let free = HessenbergTruncation::ggt(&VerblunskySequence::zero(), 200).unwrap();
        let sub = SubsequenceSpec::parse("100:20:180").unwrap();
        let g64 = normalized_ratio_difference(&t, &free, &sub, &sub, 0..=1, 2.0, 64).unwrap();
        let g128 = normalized_ratio_difference(&t, &free, &sub, &sub, 0..=1, 2.0, 128).unwrap();
        assert!((g64.tail_max - g128.tail_max).abs() < 1e-6);
    }

    #[test]
    fn best_match_trivial() {
        let seq = VerblunskySequence::from_fn(|n| Complex64::from_polar(0.4, n as f64 * 0.9));
        let t = HessenbergTruncation::ggt(&seq, 101).unwrap();
        let m = best_match_distance(&t, &t, 40, 10, 2.0, 32, 100).unwrap();
        assert_eq!(m.distance, 0.0);
        assert_eq!(m.index, 40);
        assert!(best_match_distance(&t, &t, 40, 100, 2.0, 32, 100).is_err());
        assert!(best_match_distance(&t, &t, 40, 10, 2.0, 32, 101).is_err());
    }

    #[test]
    fn paired_csv() {
        let c = PairedComparison::new(
            vec![PairedRow {
                k: 0,
                n_k: 4,
                m_k: 3,
                j: -1,
                sup_diff: 0.5,
            }],
            1,
        );
        let mut buf = Vec::new();
        c.write_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "k,n_k,m_k,j,sup_diff\n0,4,3,-1,0.5\n"
        );
    }
}
