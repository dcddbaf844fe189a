//! Monic and orthonormal polynomials from a Hessenberg truncation.
//!
//! `P_n(z) = det(z − π_n M π_n)`. Expanding along the last column of
//! `z − H_k` gives
//!
//! `P_k = (z − M_kk) P_{k−1} − Σ_{i<k} M_ik (∏_{l=i}^{k−1} M_{l+1,l}) P_{i−1}`,
//!
//! which is used as-is for `arnoldi`/`dense` truncations. Tridiagonal
//! truncations reduce it to three terms. For `ggt` truncations the sum
//! collapses to two running quantities:
//! `P_k = z P_{k−1} + ᾱ_{k−1} T_k` and `T_{k+1} = ρ²_{k−1} T_k + α_{k−1} P_k`
//! with `P_0 = 1`, `T_1 = −1`.
//!
//! Values are carried with a common scale factor so that large degrees do not
//! overflow; the factor cancels in every ratio.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::hessenberg::{HessenbergTruncation, Storage};
use crate::report::{fmt_complex, fmt_f64, write_csv};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const RESCALE_HIGH: f64 = 1e100;
const RESCALE_LOW: f64 = 1e-100;
/// `|P_n(z)|` below this counts as a zero of `P_n`.
pub const POLE_THRESHOLD: f64 = 1e-300;

#[derive(Debug, Clone)]
enum State {
    Ggt {
        prev: Complex64,
        cur: Complex64,
        tail: Complex64,
    },
    Tridiagonal {
        prev: Complex64,
        cur: Complex64,
    },
    /// `history[k] = P_k` (scaled).
    Dense {
        history: Vec<Complex64>,
    },
}

/// Advances `P_0(z), P_1(z), …` one degree at a time.
#[derive(Debug, Clone)]
pub struct MonicStepper<'a> {
    trunc: &'a HessenbergTruncation,
    z: Complex64,
    degree: usize,
    state: State,
    log_scale: f64,
}

impl<'a> MonicStepper<'a> {
    pub fn new(trunc: &'a HessenbergTruncation, z: Complex64) -> Self {
        let state = match &trunc.storage {
            Storage::Ggt { .. } => State::Ggt {
                prev: ZERO,
                cur: ONE,
                tail: -ONE,
            },
            Storage::Tridiagonal { .. } => State::Tridiagonal {
                prev: ZERO,
                cur: ONE,
            },
            Storage::Dense { .. } => State::Dense { history: vec![ONE] },
        };
        Self {
            trunc,
            z,
            degree: 0,
            state,
            log_scale: 0.0,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn z(&self) -> Complex64 {
        self.z
    }

    /// `P_k(z)·e^{−log_scale}` for the current degree `k`.
    pub fn scaled_current(&self) -> Complex64 {
        match &self.state {
            State::Ggt { cur, .. } | State::Tridiagonal { cur, .. } => *cur,
            State::Dense { history } => history[self.degree],
        }
    }

    fn scaled_previous(&self) -> Complex64 {
        match &self.state {
            State::Ggt { prev, .. } | State::Tridiagonal { prev, .. } => *prev,
            State::Dense { history } => history[self.degree - 1],
        }
    }

    /// Natural logarithm of the common scale factor.
    pub fn log_scale(&self) -> f64 {
        self.log_scale
    }

    /// `P_k(z)`; may overflow to infinity at large degree.
    pub fn current(&self) -> Complex64 {
        self.scaled_current() * self.log_scale.exp()
    }

    /// `ln |P_k(z)|`.
    pub fn log_abs_current(&self) -> f64 {
        self.scaled_current().norm().ln() + self.log_scale
    }

    /// Moves from `P_k` to `P_{k+1}`; requires `k < N`.
    pub fn step(&mut self) -> Result<()> {
        let k = self.degree + 1;
        if k > self.trunc.size() {
            return Err(Error::Bounds(format!(
                "P_{k} needs a truncation of size at least {k}, have {}",
                self.trunc.size()
            )));
        }
        let z = self.z;
        match (&mut self.state, &self.trunc.storage) {
            (State::Ggt { prev, cur, tail }, Storage::Ggt { alpha, rho }) => {
                let a = alpha[k - 1];
                let next = z * *cur + a.conj() * *tail;
                *tail = *tail * (rho[k - 1] * rho[k - 1]) + a * next;
                *prev = *cur;
                *cur = next;
            }
            (State::Tridiagonal { prev, cur }, Storage::Tridiagonal { a, b }) => {
                let off = if k >= 2 { a[k - 2] * a[k - 2] } else { 0.0 };
                let next = (z - b[k - 1]) * *cur - *prev * off;
                *prev = *cur;
                *cur = next;
            }
            (State::Dense { history }, Storage::Dense { .. }) => {
                let t = self.trunc;
                let mut next = (z - t.at(k, k)) * history[k - 1];
                let mut chain = ONE;
                for i in (1..k).rev() {
                    chain *= t.at(i + 1, i);
                    next -= t.at(i, k) * chain * history[i - 1];
                }
                history.push(next);
            }
            _ => unreachable!("stepper state always matches the storage kind"),
        }
        self.degree = k;
        self.rescale();
        Ok(())
    }

    fn rescale(&mut self) {
        let m = match &self.state {
            State::Ggt { prev, cur, tail } => prev.norm().max(cur.norm()).max(tail.norm()),
            State::Tridiagonal { prev, cur } => prev.norm().max(cur.norm()),
            State::Dense { history } => history.iter().fold(0.0f64, |m, x| m.max(x.norm())),
        };
        if !(m > RESCALE_HIGH || (m < RESCALE_LOW && m > 0.0)) || !m.is_finite() {
            return;
        }
        let inv = 1.0 / m;
        match &mut self.state {
            State::Ggt { prev, cur, tail } => {
                *prev *= inv;
                *cur *= inv;
                *tail *= inv;
            }
            State::Tridiagonal { prev, cur } => {
                *prev *= inv;
                *cur *= inv;
            }
            State::Dense { history } => history.iter_mut().for_each(|x| *x *= inv),
        }
        self.log_scale += m.ln();
    }

    /// Advances until the degree equals `n`.
    pub fn advance_to(&mut self, n: usize) -> Result<()> {
        while self.degree < n {
            self.step()?;
        }
        Ok(())
    }

    /// `P_{k−1}(z)/P_k(z)` at the current degree `k ≥ 1`.
    pub fn monic_ratio(&self) -> Result<Complex64> {
        if self.degree == 0 {
            return Err(Error::Bounds("ratio needs degree at least 1".into()));
        }
        let cur = self.scaled_current();
        if cur.norm() == 0.0 || cur.norm().ln() + self.log_scale < POLE_THRESHOLD.ln() {
            return Err(Error::Pole {
                degree: self.degree,
                z: fmt_complex(self.z),
            });
        }
        Ok(self.scaled_previous() / cur)
    }

    /// `p_{k−1}(z)/p_k(z) = M_{k+1,k} P_{k−1}(z)/P_k(z)`; needs `k+1 ≤ N`.
    pub fn normalized_ratio(&self) -> Result<Complex64> {
        let r = self.monic_ratio()?;
        Ok(r * self.trunc.subdiagonal(self.degree)?)
    }
}

/// `P_n(z)`.
pub fn eval_monic(trunc: &HessenbergTruncation, n: usize, z: Complex64) -> Result<Complex64> {
    let mut s = MonicStepper::new(trunc, z);
    s.advance_to(n)?;
    Ok(s.current())
}

/// `P_n(z)/P_n'(z)`, the Newton correction at `z`.
///
/// Runs the recurrence together with its derivative. Returns 0 when
/// `P_n(z) = 0` and infinity when only the derivative vanishes.
pub fn newton_quotient(trunc: &HessenbergTruncation, n: usize, z: Complex64) -> Result<Complex64> {
    if n > trunc.size() {
        return Err(Error::Bounds(format!(
            "degree {n} exceeds N = {}",
            trunc.size()
        )));
    }
    // (value, derivative) pairs, rescaled together.
    let mut p = (ONE, ZERO);
    let rescale = |xs: &mut [&mut (Complex64, Complex64)]| {
        let m = xs
            .iter()
            .fold(0.0f64, |m, x| m.max(x.0.norm()).max(x.1.norm()));
        if m > RESCALE_HIGH || (m < RESCALE_LOW && m > 0.0) {
            for x in xs.iter_mut() {
                x.0 /= m;
                x.1 /= m;
            }
        }
    };
    match &trunc.storage {
        Storage::Ggt { alpha, rho } => {
            let mut t = (-ONE, ZERO);
            for k in 1..=n {
                let a = alpha[k - 1];
                let next = (z * p.0 + a.conj() * t.0, p.0 + z * p.1 + a.conj() * t.1);
                let r2 = rho[k - 1] * rho[k - 1];
                t = (t.0 * r2 + a * next.0, t.1 * r2 + a * next.1);
                p = next;
                rescale(&mut [&mut p, &mut t]);
            }
        }
        Storage::Tridiagonal { a, b } => {
            let mut prev = (ZERO, ZERO);
            for k in 1..=n {
                let off = if k >= 2 { a[k - 2] * a[k - 2] } else { 0.0 };
                let w = z - b[k - 1];
                let next = (w * p.0 - prev.0 * off, p.0 + w * p.1 - prev.1 * off);
                prev = p;
                p = next;
                rescale(&mut [&mut p, &mut prev]);
            }
        }
        Storage::Dense { .. } => {
            let mut hist = vec![p];
            for k in 1..=n {
                let last = hist[k - 1];
                let w = z - trunc.at(k, k);
                let mut next = (w * last.0, last.0 + w * last.1);
                let mut chain = ONE;
                for i in (1..k).rev() {
                    chain *= trunc.at(i + 1, i);
                    let c = trunc.at(i, k) * chain;
                    next.0 -= c * hist[i - 1].0;
                    next.1 -= c * hist[i - 1].1;
                }
                hist.push(next);
                let m = hist
                    .iter()
                    .fold(0.0f64, |m, x| m.max(x.0.norm()).max(x.1.norm()));
                if m > RESCALE_HIGH || (m < RESCALE_LOW && m > 0.0) {
                    hist.iter_mut().for_each(|x| {
                        x.0 /= m;
                        x.1 /= m;
                    });
                }
            }
            p = hist[n];
        }
    }
    if p.0 == ZERO {
        return Ok(ZERO);
    }
    if p.1 == ZERO {
        return Ok(Complex64::new(f64::INFINITY, 0.0));
    }
    Ok(p.0 / p.1)
}

/// Coefficients `c_0..c_n` of `P_n(z) = Σ c_k z^k` (so `c_n = 1`).
///
/// Runs the general Hessenberg recurrence on coefficient vectors; cost is
/// `O(n³)`, meant for small `n`.
pub fn monic_coefficients(trunc: &HessenbergTruncation, n: usize) -> Result<Vec<Complex64>> {
    if n > trunc.size() {
        return Err(Error::Bounds(format!(
            "degree {n} exceeds N = {}",
            trunc.size()
        )));
    }
    let mut polys: Vec<Vec<Complex64>> = vec![vec![ONE]];
    for k in 1..=n {
        let last = &polys[k - 1];
        let diag = trunc.at(k, k);
        let mut next = vec![ZERO; k + 1];
        for (d, c) in last.iter().enumerate() {
            next[d + 1] += c;
            next[d] -= diag * c;
        }
        let mut chain = ONE;
        for i in (1..k).rev() {
            chain *= trunc.at(i + 1, i);
            let w = trunc.at(i, k) * chain;
            if w != ZERO {
                for (d, c) in polys[i - 1].iter().enumerate() {
                    next[d] -= w * c;
                }
            }
        }
        polys.push(next);
    }
    Ok(polys.pop().unwrap())
}

fn positive_subdiagonals(trunc: &HessenbergTruncation, n: usize) -> Result<Vec<f64>> {
    if n + 1 > trunc.size() {
        return Err(Error::Bounds(format!(
            "κ_{n} needs N ≥ {}, have N = {}",
            n + 1,
            trunc.size()
        )));
    }
    (2..=n + 1)
        .map(|k| {
            let s = trunc.at(k, k - 1);
            if s.im != 0.0 || !(s.re > 0.0) {
                Err(Error::Model(format!(
                    "subdiagonal entry M_{{{k},{}}} = {} is not a positive real",
                    k - 1,
                    fmt_complex(s)
                )))
            } else {
                Ok(s.re)
            }
        })
        .collect()
}

/// `κ_n = 1/∏_{k=2}^{n+1} M_{k,k−1}`; needs `n+1 ≤ N`.
pub fn kappa(trunc: &HessenbergTruncation, n: usize) -> Result<f64> {
    Ok(1.0 / positive_subdiagonals(trunc, n)?.iter().product::<f64>())
}

/// `ln κ_n`, usable where `κ_n` itself over- or underflows.
pub fn log_kappa(trunc: &HessenbergTruncation, n: usize) -> Result<f64> {
    Ok(-positive_subdiagonals(trunc, n)?
        .iter()
        .map(|s| s.ln())
        .sum::<f64>())
}

/// `P_{n−1}(z)/P_n(z)`, or `p_{n−1}(z)/p_n(z)` when `normalized`.
///
/// The normalized form needs `n+1 ≤ N` for the factor `κ_{n−1}/κ_n`.
pub fn ratio(
    trunc: &HessenbergTruncation,
    n: usize,
    z: Complex64,
    normalized: bool,
) -> Result<Complex64> {
    if n == 0 {
        return Err(Error::Bounds("ratio needs n ≥ 1".into()));
    }
    let mut s = MonicStepper::new(trunc, z);
    s.advance_to(n)?;
    if normalized {
        s.normalized_ratio()
    } else {
        s.monic_ratio()
    }
}

/// Ratios for `n = 1..=n_max` in a single pass.
pub fn ratio_profile(
    trunc: &HessenbergTruncation,
    z: Complex64,
    n_max: usize,
    normalized: bool,
) -> Result<Vec<Complex64>> {
    let mut s = MonicStepper::new(trunc, z);
    let mut out = Vec::with_capacity(n_max);
    for _ in 0..n_max {
        s.step()?;
        out.push(if normalized {
            s.normalized_ratio()?
        } else {
            s.monic_ratio()?
        });
    }
    Ok(out)
}

/// `G` equally spaced points `r e^{2πik/G}` on the circle of radius `r`.
pub fn circle_grid(radius: f64, points: usize) -> Vec<Complex64> {
    (0..points)
        .map(|k| Complex64::from_polar(radius, TAU * k as f64 / points as f64))
        .collect()
}

/// `P_n`, `p_n` and `κ_n` at one point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolynomialEvaluation {
    pub degree: usize,
    pub z: Complex64,
    pub monic: Complex64,
    pub orthonormal: Complex64,
    pub kappa: f64,
}

/// Evaluates `P_n`, `p_n = κ_n P_n` and `κ_n`; needs `n+1 ≤ N`.
pub fn evaluate(
    trunc: &HessenbergTruncation,
    n: usize,
    z: Complex64,
) -> Result<PolynomialEvaluation> {
    let k = kappa(trunc, n)?;
    let monic = eval_monic(trunc, n, z)?;
    Ok(PolynomialEvaluation {
        degree: n,
        z,
        monic,
        orthonormal: monic * k,
        kappa: k,
    })
}

/// Points at which a batch is evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PointGrid {
    Circle { radius: f64, points: usize },
    Points { values: Vec<Complex64> },
}

impl PointGrid {
    pub fn points(&self) -> Result<Vec<Complex64>> {
        match self {
            PointGrid::Circle { radius, points } => {
                if *points == 0 || !(*radius > 0.0) {
                    return Err(invalid(
                        "circle grid needs a positive radius and point count",
                    ));
                }
                Ok(circle_grid(*radius, *points))
            }
            PointGrid::Points { values } => {
                if values.is_empty() {
                    return Err(invalid("point list is empty"));
                }
                Ok(values.clone())
            }
        }
    }
}

/// What a batch evaluates at each `(n, z)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BatchQuantity {
    Monic,
    Orthonormal,
    #[default]
    Ratio,
    NormalizedRatio,
}

/// A rectangular `n × z` evaluation request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatchRequest {
    pub n_min: usize,
    pub n_max: usize,
    pub grid: PointGrid,
    #[serde(default)]
    pub quantity: BatchQuantity,
}

/// One output row: `(n, z, value)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchRow {
    pub n: usize,
    pub z: Complex64,
    pub value: Complex64,
}

/// Evaluates a batch, ordered by `n` then grid position.
pub fn evaluate_batch(trunc: &HessenbergTruncation, req: &BatchRequest) -> Result<Vec<BatchRow>> {
    if req.n_min > req.n_max {
        return Err(invalid(format!(
            "empty degree range {}..={}",
            req.n_min, req.n_max
        )));
    }
    let zs = req.grid.points()?;
    let mut columns: Vec<Vec<Complex64>> = Vec::with_capacity(zs.len());
    let log_kappas = match req.quantity {
        BatchQuantity::Orthonormal => Some(
            (req.n_min..=req.n_max)
                .map(|n| log_kappa(trunc, n))
                .collect::<Result<Vec<_>>>()?,
        ),
        _ => None,
    };
    for &z in &zs {
        let mut s = MonicStepper::new(trunc, z);
        let mut col = Vec::with_capacity(req.n_max + 1 - req.n_min);
        for n in req.n_min..=req.n_max {
            s.advance_to(n)?;
            col.push(match req.quantity {
                BatchQuantity::Monic => s.current(),
                BatchQuantity::Orthonormal => {
                    let lk = log_kappas.as_ref().unwrap()[n - req.n_min];
                    s.scaled_current() * (s.log_scale() + lk).exp()
                }
                BatchQuantity::Ratio => s.monic_ratio()?,
                BatchQuantity::NormalizedRatio => s.normalized_ratio()?,
            });
        }
        columns.push(col);
    }
    let mut rows = Vec::with_capacity(columns.len() * (req.n_max + 1 - req.n_min));
    for (offset, n) in (req.n_min..=req.n_max).enumerate() {
        for (col, z) in columns.iter().zip(&zs) {
            rows.push(BatchRow {
                n,
                z: *z,
                value: col[offset],
            });
        }
    }
    Ok(rows)
}

/// CSV with header `n,z_re,z_im,re,im`.
pub fn write_batch_csv<W: std::io::Write>(out: W, rows: &[BatchRow]) -> Result<()> {
    write_csv(
        out,
        &["n", "z_re", "z_im", "re", "im"],
        rows.iter().map(|r| {
            [
                r.n.to_string(),
                fmt_f64(r.z.re),
                fmt_f64(r.z.im),
                fmt_f64(r.value.re),
                fmt_f64(r.value.im),
            ]
        }),
    )
}
