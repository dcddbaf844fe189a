//! Coefficient sequences that define measures.
//!
//! A measure on the unit circle is encoded by its Verblunsky coefficients
//! `α_0, α_1, …` (all strictly inside the unit disk), a measure on the real
//! line by its Jacobi parameters `a_n > 0`, `b_n ∈ ℝ` indexed from 1. Both are
//! generator-backed: values are produced on demand by a pure function of the
//! index and memoized up to whatever horizon a caller materializes.

mod measure;
mod model;
mod random;
mod universal;

pub use measure::DiscretePlanarMeasure;
pub use model::{parse_complex, ComplexValue, Model, ModelFamily, ModelSpec};
pub use random::{sample_jacobi, sample_verblunsky, DistributionSpec, Domain};
pub use universal::{universal_circle_sequence, universal_jacobi_pair};

use std::fmt;
use std::io::Write;
use std::sync::{Arc, RwLock};

use num_complex::Complex64;

use crate::error::{invalid, io_error, Error, Result};
use crate::report::fmt_f64;

/// Tolerance on `|λ| = 1` for the Alexandrov twist.
pub const UNIT_MODULUS_TOL: f64 = 1e-12;

type GenFn<T> = dyn Fn(usize) -> T + Send + Sync;

/// Pure index → value function with a shared memo of the materialized prefix.
#[derive(Clone)]
struct Generator<T: Copy> {
    f: Arc<GenFn<T>>,
    memo: Arc<RwLock<Vec<T>>>,
}

impl<T: Copy + Send + Sync + 'static> Generator<T> {
    fn new(f: impl Fn(usize) -> T + Send + Sync + 'static) -> Self {
        Self {
            f: Arc::new(f),
            memo: Arc::new(RwLock::new(Vec::new())),
        }
    }

    fn value(&self, index: usize) -> T {
        {
            let memo = self.memo.read().expect("memo lock poisoned");
            if let Some(v) = memo.get(index) {
                return *v;
            }
        }
        (self.f)(index)
    }

    /// Extends the memo so that indices `0..horizon` are cached.
    fn extend_to(&self, horizon: usize) {
        let mut memo = self.memo.write().expect("memo lock poisoned");
        while memo.len() < horizon {
            let next = (self.f)(memo.len());
            memo.push(next);
        }
    }

    fn map<U: Copy + Send + Sync + 'static>(
        &self,
        g: impl Fn(usize, T) -> U + Send + Sync + 'static,
    ) -> Generator<U> {
        let src = self.clone();
        Generator::new(move |n| g(n, src.value(n)))
    }

    fn shifted(&self, k: usize) -> Generator<T> {
        let src = self.clone();
        Generator::new(move |n| src.value(n + k))
    }
}

/// Verblunsky coefficients `α_n`, `n ≥ 0`, of a probability measure on the unit circle.
#[derive(Clone)]
pub struct VerblunskySequence {
    gen: Generator<Complex64>,
    len: Option<usize>,
}

impl fmt::Debug for VerblunskySequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let preview: Vec<Complex64> = (0..self.len.unwrap_or(4).min(4))
            .map(|n| self.gen.value(n))
            .collect();
        f.debug_struct("VerblunskySequence")
            .field("len", &self.len)
            .field("head", &preview)
            .finish()
    }
}

impl VerblunskySequence {
    /// Unbounded sequence `n ↦ f(n)`. Values are checked when read.
    pub fn from_fn(f: impl Fn(usize) -> Complex64 + Send + Sync + 'static) -> Self {
        Self {
            gen: Generator::new(f),
            len: None,
        }
    }

    /// Finite sequence of the given values; every value must lie in the open disk.
    pub fn from_values(values: Vec<Complex64>) -> Result<Self> {
        if values.is_empty() {
            return Err(invalid("Verblunsky sequence must be non-empty"));
        }
        for (index, a) in values.iter().enumerate() {
            check_in_disk(index, *a)?;
        }
        let len = values.len();
        let values: Arc<[Complex64]> = values.into();
        Ok(Self {
            gen: Generator::new(move |n| values[n]),
            len: Some(len),
        })
    }

    pub fn constant(value: Complex64) -> Result<Self> {
        check_in_disk(0, value)?;
        Ok(Self::from_fn(move |_| value))
    }

    /// The Lebesgue (free) case `α ≡ 0`.
    pub fn zero() -> Self {
        Self::from_fn(|_| Complex64::new(0.0, 0.0))
    }

    /// `α_n = numerator / (n + offset)`.
    pub fn reciprocal(numerator: f64, offset: f64) -> Result<Self> {
        if offset <= 0.0 || numerator.abs() >= offset {
            return Err(invalid(format!(
                "reciprocal sequence {numerator}/(n+{offset}) leaves the unit disk at n = 0"
            )));
        }
        Ok(Self::from_fn(move |n| {
            Complex64::new(numerator / (n as f64 + offset), 0.0)
        }))
    }

    /// Repeats `period` forever.
    pub fn periodic(period: Vec<Complex64>) -> Result<Self> {
        if period.is_empty() {
            return Err(invalid("periodic sequence needs a non-empty period"));
        }
        for (index, a) in period.iter().enumerate() {
            check_in_disk(index, *a)?;
        }
        let period: Arc<[Complex64]> = period.into();
        Ok(Self::from_fn(move |n| period[n % period.len()]))
    }

    pub(crate) fn with_len(mut self, len: Option<usize>) -> Self {
        self.len = len;
        self
    }

    /// `None` for unbounded sequences.
    pub fn len(&self) -> Option<usize> {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == Some(0)
    }

    /// `α_n`, failing when `n` is past the end or the value is not in the open disk.
    pub fn get(&self, n: usize) -> Result<Complex64> {
        if let Some(len) = self.len {
            if n >= len {
                return Err(Error::Bounds(format!(
                    "Verblunsky index {n} past the end of a sequence of length {len}"
                )));
            }
        }
        let a = self.gen.value(n);
        check_in_disk(n, a)?;
        Ok(a)
    }

    /// `α_0, …, α_{horizon-1}`, memoizing them.
    pub fn materialize(&self, horizon: usize) -> Result<Vec<Complex64>> {
        if let Some(len) = self.len {
            if horizon > len {
                return Err(Error::Bounds(format!(
                    "cannot materialize {horizon} values of a sequence of length {len}"
                )));
            }
        }
        self.gen.extend_to(horizon);
        (0..horizon).map(|n| self.get(n)).collect()
    }

    /// Writes `n,re,im` rows for `0 ≤ n < horizon`.
    pub fn write_csv<W: Write>(&self, out: W, horizon: usize) -> Result<()> {
        let values = self.materialize(horizon)?;
        let mut w = csv::Writer::from_writer(out);
        let io = io_error;
        w.write_record(["n", "re", "im"]).map_err(io)?;
        for (n, a) in values.iter().enumerate() {
            w.write_record([n.to_string(), fmt_f64(a.re), fmt_f64(a.im)])
                .map_err(io)?;
        }
        w.flush().map_err(io_error)?;
        Ok(())
    }
}

fn check_in_disk(index: usize, a: Complex64) -> Result<()> {
    let modulus = a.norm();
    if !(modulus < 1.0) {
        return Err(Error::InvalidCoefficient {
            index,
            reason: format!("|α_{index}| = {modulus} is not < 1"),
        });
    }
    Ok(())
}

/// The Alexandrov twist `α_n ↦ λ α_n` for `|λ| = 1`.
pub fn alexandrov(seq: &VerblunskySequence, lambda: Complex64) -> Result<VerblunskySequence> {
    if (lambda.norm() - 1.0).abs() > UNIT_MODULUS_TOL {
        return Err(invalid(format!(
            "Alexandrov parameter must have unit modulus, got |λ| = {}",
            lambda.norm()
        )));
    }
    Ok(VerblunskySequence {
        gen: seq.gen.map(move |_, a| lambda * a),
        len: seq.len,
    })
}

/// Coefficient stripping: drops the first `k` coefficients.
pub fn strip(seq: &VerblunskySequence, k: usize) -> Result<VerblunskySequence> {
    let len = match seq.len {
        Some(len) if len <= k => {
            return Err(invalid(format!(
                "stripping {k} coefficients from a sequence of length {len} leaves nothing"
            )))
        }
        Some(len) => Some(len - k),
        None => None,
    };
    Ok(VerblunskySequence {
        gen: seq.gen.shifted(k),
        len,
    })
}

/// The pair `α_n(μ) = 1 − 1/(n+2)` and `α_n(ν) = (1 − 1/(n+2)) e^{in}`.
///
/// Both have `|α_n| → 1`, so `κ_n/κ_{n+1} → 0` and the normalized ratios of
/// both measures tend to 0, while the diagonals of their matrices differ by a
/// factor `e^{-i}` in the limit.
pub fn degenerate_pair(length: usize) -> Result<(VerblunskySequence, VerblunskySequence)> {
    if length == 0 {
        return Err(invalid("degenerate pair needs length >= 1"));
    }
    let mu = VerblunskySequence::from_fn(|n| Complex64::new(1.0 - 1.0 / (n as f64 + 2.0), 0.0))
        .with_len(Some(length));
    let nu = VerblunskySequence::from_fn(|n| {
        let r = 1.0 - 1.0 / (n as f64 + 2.0);
        Complex64::from_polar(r, n as f64)
    })
    .with_len(Some(length));
    Ok((mu, nu))
}

/// Jacobi parameters `a_n > 0`, `b_n`, indexed from `n = 1`, bounded by `bound`.
#[derive(Clone)]
pub struct JacobiSequence {
    a: Generator<f64>,
    b: Generator<f64>,
    len: Option<usize>,
    bound: f64,
}

impl fmt::Debug for JacobiSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("JacobiSequence")
            .field("len", &self.len)
            .field("bound", &self.bound)
            .finish()
    }
}

impl JacobiSequence {
    /// Unbounded sequence with `a_n = a(n)`, `b_n = b(n)` for `n ≥ 1`.
    pub fn from_fns(
        a: impl Fn(usize) -> f64 + Send + Sync + 'static,
        b: impl Fn(usize) -> f64 + Send + Sync + 'static,
        bound: f64,
    ) -> Result<Self> {
        if !(bound.is_finite() && bound > 0.0) {
            return Err(invalid(format!(
                "Jacobi bound must be positive, got {bound}"
            )));
        }
        Ok(Self {
            a: Generator::new(move |i| a(i + 1)),
            b: Generator::new(move |i| b(i + 1)),
            len: None,
            bound,
        })
    }

    /// Finite sequence; `a[0]` is `a_1`. Both slices must have the same length.
    pub fn from_values(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.is_empty() || a.len() != b.len() {
            return Err(invalid(format!(
                "Jacobi value lists must be non-empty and of equal length (got {} and {})",
                a.len(),
                b.len()
            )));
        }
        let bound = a.iter().chain(b.iter()).fold(0.0f64, |m, x| m.max(x.abs()));
        let len = a.len();
        let a: Arc<[f64]> = a.into();
        let b: Arc<[f64]> = b.into();
        let seq = Self {
            a: Generator::new(move |i| a[i]),
            b: Generator::new(move |i| b[i]),
            len: Some(len),
            bound: bound.max(f64::MIN_POSITIVE),
        };
        for n in 1..=len {
            seq.a(n)?;
        }
        Ok(seq)
    }

    pub fn constant(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0) {
            return Err(Error::InvalidCoefficient {
                index: 1,
                reason: format!("a_n = {a} is not positive"),
            });
        }
        Self::from_fns(move |_| a, move |_| b, a.max(b.abs()))
    }

    /// Periodic parameters: `a_n = a[(n-1) mod p]`, `b_n = b[(n-1) mod q]`.
    pub fn periodic(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.is_empty() || b.is_empty() {
            return Err(invalid("periodic Jacobi parameters need non-empty periods"));
        }
        if let Some(i) = a.iter().position(|x| !(*x > 0.0)) {
            return Err(Error::InvalidCoefficient {
                index: i + 1,
                reason: format!("a_{} = {} is not positive", i + 1, a[i]),
            });
        }
        let bound = a.iter().chain(b.iter()).fold(0.0f64, |m, x| m.max(x.abs()));
        Self::from_fns(
            move |n| a[(n - 1) % a.len()],
            move |n| b[(n - 1) % b.len()],
            bound.max(f64::MIN_POSITIVE),
        )
    }

    /// `a_n = a + a_decay/(n+1)`, `b_n = b + b_decay/(n+1)`.
    pub fn decaying(a: f64, a_decay: f64, b: f64, b_decay: f64) -> Result<Self> {
        let bound = (a.abs() + a_decay.abs() / 2.0).max(b.abs() + b_decay.abs() / 2.0);
        let seq = Self::from_fns(
            move |n| a + a_decay / (n as f64 + 1.0),
            move |n| b + b_decay / (n as f64 + 1.0),
            bound,
        )?;
        // a_n is monotone in n, so positivity at n = 1 and in the limit covers every index.
        seq.a(1)?;
        if !(a > 0.0) {
            return Err(invalid(format!("limit a = {a} must be positive")));
        }
        Ok(seq)
    }

    pub(crate) fn with_len(mut self, len: Option<usize>) -> Self {
        self.len = len;
        self
    }

    pub fn len(&self) -> Option<usize> {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == Some(0)
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    fn check_index(&self, n: usize) -> Result<()> {
        if n == 0 {
            return Err(Error::Bounds("Jacobi parameters are indexed from 1".into()));
        }
        if let Some(len) = self.len {
            if n > len {
                return Err(Error::Bounds(format!(
                    "Jacobi index {n} past the end of a sequence of length {len}"
                )));
            }
        }
        Ok(())
    }

    /// Off-diagonal parameter `a_n`, `n ≥ 1`.
    pub fn a(&self, n: usize) -> Result<f64> {
        self.check_index(n)?;
        let a = self.a.value(n - 1);
        if !(a > 0.0) {
            return Err(Error::InvalidCoefficient {
                index: n,
                reason: format!("a_{n} = {a} is not positive"),
            });
        }
        if a > self.bound {
            return Err(Error::InvalidCoefficient {
                index: n,
                reason: format!("a_{n} = {a} exceeds the declared bound {}", self.bound),
            });
        }
        Ok(a)
    }

    /// Diagonal parameter `b_n`, `n ≥ 1`.
    pub fn b(&self, n: usize) -> Result<f64> {
        self.check_index(n)?;
        let b = self.b.value(n - 1);
        if !(b.abs() <= self.bound) {
            return Err(Error::InvalidCoefficient {
                index: n,
                reason: format!(
                    "|b_{n}| = {} exceeds the declared bound {}",
                    b.abs(),
                    self.bound
                ),
            });
        }
        Ok(b)
    }

    /// `(a_1..a_horizon, b_1..b_horizon)`.
    pub fn materialize(&self, horizon: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        if let Some(len) = self.len {
            if horizon > len {
                return Err(Error::Bounds(format!(
                    "cannot materialize {horizon} values of a sequence of length {len}"
                )));
            }
        }
        self.a.extend_to(horizon);
        self.b.extend_to(horizon);
        let a = (1..=horizon)
            .map(|n| self.a(n))
            .collect::<Result<Vec<_>>>()?;
        let b = (1..=horizon)
            .map(|n| self.b(n))
            .collect::<Result<Vec<_>>>()?;
        Ok((a, b))
    }

    /// Drops the first `k` parameter pairs.
    pub fn strip(&self, k: usize) -> Result<Self> {
        let len = match self.len {
            Some(len) if len <= k => {
                return Err(invalid(format!(
                    "stripping {k} parameters from a sequence of length {len} leaves nothing"
                )))
            }
            Some(len) => Some(len - k),
            None => None,
        };
        Ok(Self {
            a: self.a.shifted(k),
            b: self.b.shifted(k),
            len,
            bound: self.bound,
        })
    }

    /// Writes `n,a,b` rows for `1 ≤ n ≤ horizon`.
    pub fn write_csv<W: Write>(&self, out: W, horizon: usize) -> Result<()> {
        let (a, b) = self.materialize(horizon)?;
        let mut w = csv::Writer::from_writer(out);
        let io = io_error;
        w.write_record(["n", "a", "b"]).map_err(io)?;
        for (i, (a, b)) in a.iter().zip(&b).enumerate() {
            w.write_record([(i + 1).to_string(), fmt_f64(*a), fmt_f64(*b)])
                .map_err(io)?;
        }
        w.flush().map_err(io_error)?;
        Ok(())
    }
}
