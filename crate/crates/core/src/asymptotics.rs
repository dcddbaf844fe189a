//! h-coefficients, path expansions of diagonal powers, Laurent coefficients
//! of the ratio, weak and Cesàro moments, and comparisons between two
//! measures.
//!
//! Two kinds of power appear: the full truncation `M^m` (weak moments) and
//! the leading block `(π_n M π_n)^m` (ratios, Cesàro moments). Every function
//! states which one it uses; see [`PowerMode`].

use std::collections::BTreeMap;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::hessenberg::{HessenbergTruncation, PowerMode};
use crate::polynomials::{circle_grid, MonicStepper};
use crate::report::{fmt_f64, last_quartile_max, write_csv};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Largest power for which index paths are enumerated explicitly.
pub const MAX_PATH_POWER: usize = 12;
/// Largest number of Laurent coefficients beyond `c_0`.
pub const MAX_LAURENT_TERMS: usize = 40;

/// `h_{j,n} = (κ_{n−1−j}/κ_{n−1}) M_{n−j,n}` for `0 ≤ j ≤ n−1`.
pub fn h_coeff(trunc: &HessenbergTruncation, j: usize, n: usize) -> Result<Complex64> {
    trunc.descent_weight(j, n)
}

fn path_bounds(trunc: &HessenbergTruncation, m: usize, n: usize, mode: PowerMode) -> Result<usize> {
    if m == 0 {
        return Err(invalid("path sums need m ≥ 1"));
    }
    if m > MAX_PATH_POWER {
        return Err(Error::SizeLimit(format!(
            "path enumeration is limited to m ≤ {MAX_PATH_POWER}, got {m}; use matrix powers instead"
        )));
    }
    if n == 0 || n > trunc.size() {
        return Err(Error::Bounds(format!(
            "index {n} outside 1..={}",
            trunc.size()
        )));
    }
    match mode {
        PowerMode::Truncated => Ok(n),
        PowerMode::Full => {
            if n + m - 1 > trunc.size() {
                return Err(Error::TruncationContamination {
                    index: n,
                    power: m,
                    size: trunc.size(),
                });
            }
            Ok(trunc.size())
        }
    }
}

/// Depth-first enumeration of closed paths `n → … → n` of length `m` with
/// `i_{k+1} ≥ i_k − 1` and indices `≤ cap`. With `skip_descent`, the path
/// `n → n−1 → … → n−m+1 → n` is left out.
fn enumerate(
    trunc: &HessenbergTruncation,
    n: usize,
    m: usize,
    cap: usize,
    skip_descent: bool,
) -> Complex64 {
    struct Walk<'a> {
        t: &'a HessenbergTruncation,
        n: usize,
        m: usize,
        cap: usize,
        skip_descent: bool,
        total: Complex64,
    }
    impl Walk<'_> {
        fn go(&mut self, pos: usize, step: usize, weight: Complex64, on_descent: bool) {
            let left = self.m - step;
            if left == 0 {
                if pos == self.n && !(self.skip_descent && on_descent) {
                    self.total += weight;
                }
                return;
            }
            // After this step `left − 1` steps remain, each dropping at most one.
            let hi = (self.n + left - 1).min(self.cap);
            for next in pos.saturating_sub(1).max(1)..=hi {
                let e = self.t.at(pos, next);
                if e == ZERO {
                    continue;
                }
                let descending = on_descent
                    && if left == 1 {
                        next == self.n
                    } else {
                        next + 1 == pos
                    };
                self.go(next, step + 1, weight * e, descending);
            }
        }
    }
    let mut w = Walk {
        t: trunc,
        n,
        m,
        cap,
        skip_descent,
        total: ZERO,
    };
    w.go(n, 0, ONE, true);
    w.total
}

/// `((π_n M π_n)^m)_{n,n}` or `(M^m)_{n,n}` as an explicit sum over index paths.
pub fn path_sum_diagonal(
    trunc: &HessenbergTruncation,
    m: usize,
    n: usize,
    mode: PowerMode,
) -> Result<Complex64> {
    let cap = path_bounds(trunc, m, n, mode)?;
    Ok(enumerate(trunc, n, m, cap, false))
}

/// `β_{n,m} = ((π_n M π_n)^m)_{n,n} − h_{m−1,n}`: the path sum without the
/// maximal-descent path. When `m > n` that path does not exist and `β` is
/// the whole path sum.
pub fn beta_term(trunc: &HessenbergTruncation, n: usize, m: usize) -> Result<Complex64> {
    let cap = path_bounds(trunc, m, n, PowerMode::Truncated)?;
    Ok(enumerate(trunc, n, m, cap, m <= n))
}

/// Coefficients of `P_{n−1}(z)/P_n(z) = Σ_m c_m / z^{m+1}`,
/// `c_m = ((π_n M π_n)^m)_{n,n}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaurentCoefficients {
    pub center: usize,
    pub coefficients: Vec<Complex64>,
}

impl LaurentCoefficients {
    /// `M`: the highest power kept.
    pub fn terms(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// `Σ_{m=0}^{M} c_m / z^{m+1}`.
    pub fn partial_sum(&self, z: Complex64) -> Complex64 {
        let w = ONE / z;
        self.coefficients
            .iter()
            .rev()
            .fold(ZERO, |acc, c| (acc + c) * w)
    }

    /// Bound on `|ratio − partial sum|` when every `|c_m| ≤ R^m`:
    /// `(R/|z|)^{M+1} · max(|z|, 1) / (|z| − R)`.
    ///
    /// The exact geometric tail is `(R/|z|)^{M+1}/(|z| − R)`; the extra
    /// factor keeps the commonly quoted form `(R/|z|)^{M+1}|z|/(|z|−R)` valid
    /// for `|z| < 1` too.
    pub fn tail_bound(&self, norm_bound: f64, z: Complex64) -> f64 {
        let r = z.norm();
        if !(r > norm_bound) {
            return f64::INFINITY;
        }
        (norm_bound / r).powi(self.coefficients.len() as i32) * r.max(1.0) / (r - norm_bound)
    }
}

/// `c_0..c_M` for the ratio at index `n`, `M ≤ 40`.
pub fn laurent_ratio(
    trunc: &HessenbergTruncation,
    n: usize,
    terms: usize,
) -> Result<LaurentCoefficients> {
    if terms > MAX_LAURENT_TERMS {
        return Err(Error::SizeLimit(format!(
            "at most {MAX_LAURENT_TERMS} Laurent terms, got {terms}"
        )));
    }
    let coefficients = (0..=terms)
        .map(|m| trunc.power_diagonal(m, n, PowerMode::Truncated))
        .collect::<Result<Vec<_>>>()?;
    Ok(LaurentCoefficients {
        center: n,
        coefficients,
    })
}

/// `∫ z^j |p_n|² dμ = (M^j)_{n+1,n+1}` for the degree `n ≥ 0`; needs `n+j ≤ N`.
pub fn weak_moment(trunc: &HessenbergTruncation, j: usize, n: usize) -> Result<Complex64> {
    trunc.power_diagonal(j, n + 1, PowerMode::Full)
}

/// `∫ z^j dσ_n = (1/n) tr((π_n M π_n)^j)` for `1 ≤ n ≤ N`.
pub fn cesaro_moment(trunc: &HessenbergTruncation, j: usize, n: usize) -> Result<Complex64> {
    if n == 0 || n > trunc.size() {
        return Err(Error::Bounds(format!(
            "Cesàro moment needs 1 ≤ n ≤ {}, got {n}",
            trunc.size()
        )));
    }
    let trace: Complex64 = (1..=n).map(|i| trunc.power_entry(i, j, n)).sum();
    Ok(trace / n as f64)
}

/// What a [`MomentReport`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentKind {
    Weak,
    Cesaro,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub kind: MomentKind,
    pub order: usize,
    pub index: usize,
    pub value: Complex64,
}

/// Evaluates a weak or Cesàro moment and wraps it in a report.
pub fn moment(
    trunc: &HessenbergTruncation,
    kind: MomentKind,
    j: usize,
    n: usize,
) -> Result<MomentReport> {
    let value = match kind {
        MomentKind::Weak => weak_moment(trunc, j, n)?,
        MomentKind::Cesaro => cesaro_moment(trunc, j, n)?,
    };
    Ok(MomentReport {
        kind,
        order: j,
        index: n,
        value,
    })
}

/// One line of a comparison report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub quantity: String,
    pub j: i64,
    pub n: usize,
    pub value: Complex64,
    pub bound: Option<f64>,
}

/// Summary of a comparison: last-quartile maxima of `|value|` per series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonSummary {
    pub max_last_quartile: BTreeMap<String, f64>,
    pub grid: Vec<usize>,
    pub q: usize,
}

/// Rows plus summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub rows: Vec<ComparisonRow>,
    pub summary: ComparisonSummary,
}

impl ComparisonReport {
    /// Wraps rows and summarizes each `quantity_j` series by its last-quartile maximum.
    pub fn new(rows: Vec<ComparisonRow>, grid: &[usize], q: usize) -> Self {
        let mut series: BTreeMap<String, Vec<f64>> = BTreeMap::new();
        for r in &rows {
            series
                .entry(format!("{}_j{}", r.quantity, r.j))
                .or_default()
                .push(r.value.norm());
        }
        let max_last_quartile = series
            .into_iter()
            .map(|(k, v)| (k, last_quartile_max(&v)))
            .collect();
        Self {
            rows,
            summary: ComparisonSummary {
                max_last_quartile,
                grid: grid.to_vec(),
                q,
            },
        }
    }

    /// Last-quartile maximum for one series, e.g. `("h", 2)`.
    pub fn tail_max(&self, quantity: &str, j: i64) -> Option<f64> {
        self.summary
            .max_last_quartile
            .get(&format!("{quantity}_j{j}"))
            .copied()
    }

    /// CSV with header `quantity,j,n,re,im,bound` (empty bound when absent).
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_csv(
            out,
            &["quantity", "j", "n", "re", "im", "bound"],
            self.rows.iter().map(|r| {
                [
                    r.quantity.clone(),
                    r.j.to_string(),
                    r.n.to_string(),
                    fmt_f64(r.value.re),
                    fmt_f64(r.value.im),
                    r.bound.map(fmt_f64).unwrap_or_default(),
                ]
            }),
        )
    }
}

fn check_grid(grid: &[usize]) -> Result<()> {
    if grid.is_empty() {
        return Err(invalid("the n-grid is empty"));
    }
    Ok(())
}

/// `h_{j,n}(A) − h_{j,n−q}(B)` for `j ≤ j_max` and `n` on the grid.
pub fn relative_h_profile(
    a: &HessenbergTruncation,
    b: &HessenbergTruncation,
    q: usize,
    j_max: usize,
    grid: &[usize],
) -> Result<ComparisonReport> {
    check_grid(grid)?;
    let mut rows = Vec::new();
    for j in 0..=j_max {
        for &n in grid {
            if n < q + j + 1 {
                return Err(Error::Bounds(format!(
                    "h-profile needs n − q ≥ j + 1 (n = {n}, q = {q}, j = {j})"
                )));
            }
            let d = h_coeff(a, j, n)? - h_coeff(b, j, n - q)?;
            rows.push(ComparisonRow {
                quantity: "h".into(),
                j: j as i64,
                n,
                value: d,
                bound: None,
            });
        }
    }
    Ok(ComparisonReport::new(rows, grid, q))
}

fn shifted(n: usize, q: usize) -> Result<usize> {
    n.checked_sub(q)
        .ok_or_else(|| Error::Bounds(format!("shift q = {q} exceeds n = {n}")))
}

/// `weak_j(A, n) − weak_j(B, n−q)`.
pub fn relative_weak_moments(
    a: &HessenbergTruncation,
    b: &HessenbergTruncation,
    q: usize,
    j: usize,
    n: usize,
) -> Result<Complex64> {
    Ok(weak_moment(a, j, n)? - weak_moment(b, j, shifted(n, q)?)?)
}

/// `cesàro_j(A, n) − cesàro_j(B, n−q)`; the usual comparison takes `q = 0`.
pub fn relative_cesaro_moments(
    a: &HessenbergTruncation,
    b: &HessenbergTruncation,
    q: usize,
    j: usize,
    n: usize,
) -> Result<Complex64> {
    Ok(cesaro_moment(a, j, n)? - cesaro_moment(b, j, shifted(n, q)?)?)
}

/// `max_{z on the grid} |ρ_A(n, z) − ρ_B(n−q, z)|` where `ρ` is the monic
/// (or, with `normalized`, orthonormal) ratio and the grid has `points`
/// equally spaced points on `|z| = radius`.
pub fn relative_ratio_difference(
    a: &HessenbergTruncation,
    b: &HessenbergTruncation,
    q: usize,
    n: usize,
    radius: f64,
    points: usize,
    normalized: bool,
) -> Result<f64> {
    let m = shifted(n, q)?;
    if m == 0 {
        return Err(Error::Bounds("ratios need n − q ≥ 1".into()));
    }
    let mut sup = 0.0f64;
    for z in circle_grid(radius, points) {
        let mut sa = MonicStepper::new(a, z);
        let mut sb = MonicStepper::new(b, z);
        sa.advance_to(n)?;
        sb.advance_to(m)?;
        let (ra, rb) = if normalized {
            (sa.normalized_ratio()?, sb.normalized_ratio()?)
        } else {
            (sa.monic_ratio()?, sb.monic_ratio()?)
        };
        sup = sup.max((ra - rb).norm());
    }
    Ok(sup)
}

/// Both sides of the Cesàro averaging bound at one `(j, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CesaroBound {
    pub j: usize,
    pub n: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// `lhs = |ces_j(A,n) − ces_j(B,n) − (1/n) Σ_{k<n} (weak_j(A,k) − weak_j(B,k))|`,
/// `rhs = 2j (R_A + R_B)/n`, with `R` the truncations' norm bounds.
pub fn cesaro_bound_check(
    a: &HessenbergTruncation,
    b: &HessenbergTruncation,
    j: usize,
    n: usize,
) -> Result<CesaroBound> {
    if n == 0 {
        return Err(Error::Bounds("Cesàro bound needs n ≥ 1".into()));
    }
    let mut avg = ZERO;
    for k in 0..n {
        avg += weak_moment(a, j, k)? - weak_moment(b, j, k)?;
    }
    avg /= n as f64;
    let lhs = (cesaro_moment(a, j, n)? - cesaro_moment(b, j, n)? - avg).norm();
    let rhs = 2.0 * j as f64 * (a.norm_bound() + b.norm_bound()) / n as f64;
    Ok(CesaroBound {
        j,
        n,
        lhs,
        rhs,
        holds: lhs <= rhs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::{degenerate_pair, strip, JacobiSequence, VerblunskySequence};
    use crate::polynomials::ratio;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cheb(n: usize) -> HessenbergTruncation {
        HessenbergTruncation::jacobi(&JacobiSequence::constant(0.5, 0.0).unwrap(), n).unwrap()
    }

    fn wobbly(n: usize) -> HessenbergTruncation {
        let seq = VerblunskySequence::from_fn(|k| {
            Complex64::from_polar(0.2 + 0.6 * ((k as f64) * 1.3).cos().abs(), 0.7 * k as f64)
        });
        HessenbergTruncation::ggt(&seq, n).unwrap()
    }

    #[test]
    fn h_examples() {
        let t = cheb(10);
        assert_eq!(h_coeff(&t, 0, 5).unwrap(), t.entry(5, 5).unwrap());
        assert_eq!(h_coeff(&t, 1, 5).unwrap(), c(0.25, 0.0));
        let g = HessenbergTruncation::ggt(&VerblunskySequence::constant(c(0.3, 0.4)).unwrap(), 10)
            .unwrap();
        assert!((h_coeff(&g, 0, 5).unwrap() - c(-0.25, 0.0)).norm() < 1e-15);
        assert!((h_coeff(&g, 0, 1).unwrap() - c(0.3, -0.4)).norm() < 1e-15);
        assert!(h_coeff(&t, 5, 5).is_err());
    }

    #[test]
    fn path_sums() {
        let t = wobbly(14);
        for n in 1..=14 {
            let p1 = path_sum_diagonal(&t, 1, n, PowerMode::Truncated).unwrap();
            assert_eq!(p1, h_coeff(&t, 0, n).unwrap());
            if n >= 2 {
                let p2 = path_sum_diagonal(&t, 2, n, PowerMode::Truncated).unwrap();
                let h0 = h_coeff(&t, 0, n).unwrap();
                assert!((p2 - (h0 * h0 + h_coeff(&t, 1, n).unwrap())).norm() < 1e-15);
                assert_eq!(beta_term(&t, n, 2).unwrap(), h0 * h0);
            }
            for m in 1..=6 {
                for mode in [PowerMode::Truncated, PowerMode::Full] {
                    let Ok(p) = path_sum_diagonal(&t, m, n, mode) else {
                        assert!(mode == PowerMode::Full && n + m - 1 > 14);
                        continue;
                    };
                    let d = t.power_diagonal(m, n, mode).unwrap();
                    assert!((p - d).norm() < 1e-12, "m={m} n={n} {mode:?}");
                }
            }
        }
        assert!(matches!(
            path_sum_diagonal(&t, 13, 5, PowerMode::Truncated),
            Err(Error::SizeLimit(_))
        ));
    }

    #[test]
    fn beta_decomposition() {
        let t = wobbly(12);
        for n in 1..=12 {
            assert_eq!(beta_term(&t, n, 1).unwrap(), ZERO);
            for m in 1..=n.min(7) {
                let total = path_sum_diagonal(&t, m, n, PowerMode::Truncated).unwrap();
                let h = h_coeff(&t, m - 1, n).unwrap();
                assert!((beta_term(&t, n, m).unwrap() + h - total).norm() < 1e-12);
            }
        }
        assert_eq!(beta_term(&cheb(10), 6, 3).unwrap(), ZERO);
    }

    #[test]
    fn laurent_examples() {
        let shift = HessenbergTruncation::ggt(&VerblunskySequence::zero(), 8).unwrap();
        let l = laurent_ratio(&shift, 6, 5).unwrap();
        assert_eq!(l.coefficients[0], ONE);
        assert!(l.coefficients[1..].iter().all(|x| *x == ZERO));

        let l = laurent_ratio(&cheb(40), 20, 6).unwrap();
        let expect = [1.0, 0.0, 0.25, 0.0, 0.125, 0.0, 0.078125];
        for (got, e) in l.coefficients.iter().zip(expect) {
            assert!((got - c(e, 0.0)).norm() < 1e-15);
        }
        assert!(laurent_ratio(&cheb(40), 20, 41).is_err());
    }

    #[test]
    fn laurent_converges_to_ratio() {
        let t = wobbly(30);
        let r = t.norm_bound();
        for n in [1, 10, 30] {
            let l = laurent_ratio(&t, n, 30).unwrap();
            for (k, scale) in [1.5, 2.0, 3.0].into_iter().enumerate() {
                let z = Complex64::from_polar(scale * r, 0.3 + k as f64);
                let diff = (ratio(&t, n, z, false).unwrap() - l.partial_sum(z)).norm();
                assert!(diff <= l.tail_bound(r, z), "n={n} scale={scale}");
            }
            for (m, cm) in l.coefficients.iter().enumerate() {
                assert!(cm.norm() <= r.powi(m as i32) * (1.0 + 1e-9));
            }
        }
    }

    #[test]
    fn moments() {
        let t = cheb(30);
        assert_eq!(weak_moment(&t, 0, 7).unwrap(), ONE);
        assert!((weak_moment(&t, 2, 7).unwrap() - c(0.5, 0.0)).norm() < 1e-15);
        let shift = HessenbergTruncation::ggt(&VerblunskySequence::zero(), 10).unwrap();
        assert_eq!(weak_moment(&shift, 1, 4).unwrap(), ZERO);
        assert!(matches!(
            weak_moment(&t, 3, 28),
            Err(Error::TruncationContamination { .. })
        ));
        assert!(weak_moment(&t, 2, 28).is_ok());

        assert!((cesaro_moment(&t, 2, 2).unwrap() - c(0.25, 0.0)).norm() < 1e-15);
        assert_eq!(cesaro_moment(&t, 0, 9).unwrap(), ONE);
        for j in 1..5 {
            assert_eq!(cesaro_moment(&shift, j, 10).unwrap(), ZERO);
        }
    }

    #[test]
    fn relative_profiles() {
        let seq = VerblunskySequence::reciprocal(1.0, 2.0).unwrap();
        let a = HessenbergTruncation::ggt(&seq, 120).unwrap();
        let same = relative_h_profile(&a, &a, 0, 3, &[10, 20, 40]).unwrap();
        assert!(same.rows.iter().all(|r| r.value == ZERO));

        let stripped = HessenbergTruncation::ggt(&strip(&seq, 1).unwrap(), 119).unwrap();
        let shifted = relative_h_profile(&a, &stripped, 1, 3, &[10, 50, 100]).unwrap();
        assert!(shifted.rows.iter().all(|r| r.value.norm() < 1e-15));

        let free = HessenbergTruncation::ggt(&VerblunskySequence::zero(), 120).unwrap();
        let grid: Vec<usize> = (50..=100).collect();
        let report = relative_h_profile(&a, &free, 0, 3, &grid).unwrap();
        for j in 0..=3 {
            assert!(report.tail_max("h", j).unwrap() < 0.05);
        }
        assert!(relative_h_profile(&a, &free, 5, 3, &[8]).is_err());

        assert!(
            relative_weak_moments(&a, &stripped, 1, 3, 60)
                .unwrap()
                .norm()
                < 1e-14
        );
        assert_eq!(relative_cesaro_moments(&a, &a, 0, 3, 60).unwrap(), ZERO);
    }

    #[test]
    fn degenerate_pair_weak_gap() {
        let (mu, nu) = degenerate_pair(600).unwrap();
        let a = HessenbergTruncation::ggt(&mu, 600).unwrap();
        let b = HessenbergTruncation::ggt(&nu, 600).unwrap();
        let d = relative_weak_moments(&a, &b, 0, 1, 500).unwrap().norm();
        let expect = 2.0 * 0.5f64.sin() * (1.0 - 1.0 / 501.0) * (1.0 - 1.0 / 502.0);
        assert!((d - expect).abs() < 1e-3, "{d} vs {expect}");
    }

    #[test]
    fn cesaro_bounds() {
        let t = cheb(40);
        let same = cesaro_bound_check(&t, &t, 2, 20).unwrap();
        assert_eq!(same.lhs, 0.0);
        assert!(same.holds);
        let shift = HessenbergTruncation::ggt(&VerblunskySequence::zero(), 40).unwrap();
        let chk = cesaro_bound_check(&t, &shift, 2, 20).unwrap();
        assert!(chk.holds, "{chk:?}");
    }

    #[test]
    fn report_csv() {
        let t = cheb(10);
        let report = relative_h_profile(&t, &t, 0, 0, &[4]).unwrap();
        let mut buf = Vec::new();
        report.write_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "quantity,j,n,re,im,bound\nh,0,4,0,0,\n"
        );
        let json = serde_json::to_string(&report.summary).unwrap();
        assert_eq!(
            json,
            r#"{"max_last_quartile":{"h_j0":0.0},"grid":[4],"q":0}"#
        );
    }
}
