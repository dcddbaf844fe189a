//! I.i.d. coefficient sampling.
//!
//! Draws are counter-based: the value at index `n` of stream `s` under seed
//! `seed` comes from a ChaCha8 keystream positioned at a fixed word offset, so
//! reading any index is reproducible without replaying earlier draws and the
//! Jacobi `a`/`b` streams are independent.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{JacobiSequence, VerblunskySequence};
use crate::error::{invalid, Result};

const VERBLUNSKY_STREAM: u64 = 0;
const JACOBI_A_STREAM: u64 = 1;
const JACOBI_B_STREAM: u64 = 2;
/// 32-bit keystream words reserved per draw (two `f64` uniforms use four).
const WORDS_PER_DRAW: u128 = 8;

/// Where a distribution is supposed to live.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    /// Strictly inside the unit disk (Verblunsky coefficients).
    Circle,
    /// On the real line (Jacobi parameters).
    Line,
}

/// A compactly supported law for one coefficient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DistributionSpec {
    /// Finitely many atoms with positive probabilities summing to 1.
    Atomic {
        atoms: Vec<Complex64>,
        probabilities: Vec<f64>,
    },
    /// Uniform on the disk `|z| ≤ radius`.
    UniformDisk { radius: f64 },
    /// Uniform on the real interval `[low, high]`.
    UniformInterval { low: f64, high: f64 },
}

impl DistributionSpec {
    /// Atoms with equal probabilities.
    pub fn uniform_atoms(atoms: Vec<Complex64>) -> Self {
        let p = 1.0 / atoms.len().max(1) as f64;
        let probabilities = vec![p; atoms.len()];
        DistributionSpec::Atomic {
            atoms,
            probabilities,
        }
    }

    /// Checks internal consistency and that the support lies in `domain`.
    pub fn validate(&self, domain: Domain) -> Result<()> {
        match self {
            DistributionSpec::Atomic {
                atoms,
                probabilities,
            } => {
                if atoms.is_empty() || atoms.len() != probabilities.len() {
                    return Err(invalid(
                        "atomic distribution needs one probability per atom and at least one atom",
                    ));
                }
                if probabilities.iter().any(|p| !(*p > 0.0)) {
                    return Err(invalid("atomic probabilities must be positive"));
                }
                let total: f64 = probabilities.iter().sum();
                if (total - 1.0).abs() > 1e-12 {
                    return Err(invalid(format!(
                        "atomic probabilities sum to {total}, not 1"
                    )));
                }
                for a in atoms {
                    match domain {
                        Domain::Circle if !(a.norm() < 1.0) => {
                            return Err(invalid(format!(
                                "atom {a} is not strictly inside the unit disk"
                            )))
                        }
                        Domain::Line if a.im != 0.0 || !a.re.is_finite() => {
                            return Err(invalid(format!("atom {a} is not real")))
                        }
                        _ => {}
                    }
                }
            }
            DistributionSpec::UniformDisk { radius } => {
                if domain == Domain::Line {
                    return Err(invalid("a disk distribution is not line-valued"));
                }
                if !(*radius >= 0.0 && *radius < 1.0) {
                    return Err(invalid(format!(
                        "disk radius {radius} must lie in [0, 1) so the support avoids the unit circle"
                    )));
                }
            }
            DistributionSpec::UniformInterval { low, high } => {
                if !(low.is_finite() && high.is_finite() && low <= high) {
                    return Err(invalid(format!("bad interval [{low}, {high}]")));
                }
                if domain == Domain::Circle && !(low.abs() < 1.0 && high.abs() < 1.0) {
                    return Err(invalid(format!(
                        "interval [{low}, {high}] touches or leaves the unit disk"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Largest modulus of a point in the support.
    pub fn support_radius(&self) -> f64 {
        match self {
            DistributionSpec::Atomic { atoms, .. } => {
                atoms.iter().fold(0.0, |m, a| m.max(a.norm()))
            }
            DistributionSpec::UniformDisk { radius } => *radius,
            DistributionSpec::UniformInterval { low, high } => low.abs().max(high.abs()),
        }
    }

    fn min_real(&self) -> f64 {
        match self {
            DistributionSpec::Atomic { atoms, .. } => {
                atoms.iter().fold(f64::INFINITY, |m, a| m.min(a.re))
            }
            DistributionSpec::UniformDisk { radius } => -radius,
            DistributionSpec::UniformInterval { low, .. } => *low,
        }
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> Complex64 {
        match self {
            DistributionSpec::Atomic {
                atoms,
                probabilities,
            } => {
                let u: f64 = rng.random();
                let mut cumulative = 0.0;
                for (a, p) in atoms.iter().zip(probabilities) {
                    cumulative += p;
                    if u < cumulative {
                        return *a;
                    }
                }
                *atoms.last().expect("validated non-empty")
            }
            DistributionSpec::UniformDisk { radius } => {
                let u: f64 = rng.random();
                let v: f64 = rng.random();
                Complex64::from_polar(radius * u.sqrt(), TAU * v)
            }
            DistributionSpec::UniformInterval { low, high } => {
                let u: f64 = rng.random();
                Complex64::new(low + (high - low) * u, 0.0)
            }
        }
    }

    /// The draw at position `index` of stream `stream` under `seed`.
    pub fn draw_at(&self, seed: u64, stream: u64, index: usize) -> Complex64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        rng.set_word_pos(index as u128 * WORDS_PER_DRAW);
        self.draw(&mut rng)
    }
}

/// `length` i.i.d. Verblunsky coefficients from `dist` (`None` for an unbounded stream).
pub fn sample_verblunsky(
    dist: &DistributionSpec,
    length: Option<usize>,
    seed: u64,
) -> Result<VerblunskySequence> {
    dist.validate(Domain::Circle)?;
    if length == Some(0) {
        return Err(invalid("sample length must be positive"));
    }
    let dist = dist.clone();
    Ok(
        VerblunskySequence::from_fn(move |n| dist.draw_at(seed, VERBLUNSKY_STREAM, n))
            .with_len(length),
    )
}

/// I.i.d. Jacobi parameters: `a_n ~ dist_a`, `b_n ~ dist_b`, on independent streams.
pub fn sample_jacobi(
    dist_a: &DistributionSpec,
    dist_b: &DistributionSpec,
    length: Option<usize>,
    seed: u64,
) -> Result<JacobiSequence> {
    dist_a.validate(Domain::Line)?;
    dist_b.validate(Domain::Line)?;
    if !(dist_a.min_real() > 0.0) {
        return Err(invalid(
            "the off-diagonal distribution must be supported in (0, ∞)",
        ));
    }
    if length == Some(0) {
        return Err(invalid("sample length must be positive"));
    }
    let bound = dist_a.support_radius().max(dist_b.support_radius());
    let (da, db) = (dist_a.clone(), dist_b.clone());
    let seq = JacobiSequence::from_fns(
        move |n| da.draw_at(seed, JACOBI_A_STREAM, n - 1).re,
        move |n| db.draw_at(seed, JACOBI_B_STREAM, n - 1).re,
        bound.max(f64::MIN_POSITIVE),
    )?;
    Ok(seq.with_len(length))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn degenerate_law_is_constant() {
        let dist = DistributionSpec::uniform_atoms(vec![c(0.3)]);
        let seq = sample_verblunsky(&dist, Some(5), 11).unwrap();
        assert_eq!(seq.materialize(5).unwrap(), vec![c(0.3); 5]);
    }

    #[test]
    fn two_point_frequency() {
        // four standard deviations of a fair coin at n = 10^4 is 0.02
        let dist = DistributionSpec::uniform_atoms(vec![c(0.3), c(-0.3)]);
        let n = 10_000;
        let seq = sample_verblunsky(&dist, Some(n), 20240611).unwrap();
        let hits = seq
            .materialize(n)
            .unwrap()
            .iter()
            .filter(|a| a.re > 0.0)
            .count();
        let freq = hits as f64 / n as f64;
        assert!((freq - 0.5).abs() <= 0.02, "frequency {freq}");
    }

    #[test]
    fn same_seed_same_stream() {
        let dist = DistributionSpec::UniformDisk { radius: 0.8 };
        let a = sample_verblunsky(&dist, Some(200), 7)
            .unwrap()
            .materialize(200)
            .unwrap();
        let b = sample_verblunsky(&dist, Some(200), 7)
            .unwrap()
            .materialize(200)
            .unwrap();
        assert_eq!(a, b);
        let other = sample_verblunsky(&dist, Some(200), 8)
            .unwrap()
            .materialize(200)
            .unwrap();
        assert_ne!(a, other);
        assert!(a.iter().all(|x| x.norm() <= 0.8));
    }

    #[test]
    fn random_access_matches_sequential() {
        let dist = DistributionSpec::UniformInterval {
            low: -0.5,
            high: 0.5,
        };
        let seq = sample_verblunsky(&dist, None, 3).unwrap();
        let forward = seq.materialize(64).unwrap();
        let fresh = sample_verblunsky(&dist, None, 3).unwrap();
        for n in (0..64).rev() {
            assert_eq!(fresh.get(n).unwrap(), forward[n]);
        }
    }

    #[test]
    fn circle_support_must_avoid_unit_circle() {
        let on_circle = DistributionSpec::uniform_atoms(vec![c(1.0)]);
        assert!(sample_verblunsky(&on_circle, Some(3), 0).is_err());
        assert!(
            sample_verblunsky(&DistributionSpec::UniformDisk { radius: 1.0 }, Some(3), 0).is_err()
        );
    }

    #[test]
    fn jacobi_streams_are_independent_and_valid() {
        let da = DistributionSpec::UniformInterval {
            low: 0.5,
            high: 1.5,
        };
        let db = DistributionSpec::UniformInterval {
            low: 0.5,
            high: 1.5,
        };
        let seq = sample_jacobi(&da, &db, Some(100), 5).unwrap();
        let (a, b) = seq.materialize(100).unwrap();
        assert_ne!(a, b);
        assert!(a.iter().all(|x| *x >= 0.5 && *x <= 1.5));
        let bad = DistributionSpec::UniformInterval {
            low: -0.1,
            high: 1.0,
        };
        assert!(sample_jacobi(&bad, &db, Some(3), 0).is_err());
    }

    #[test]
    fn serde_shape() {
        let dist = DistributionSpec::uniform_atoms(vec![c(0.3), c(-0.3)]);
        let json = serde_json::to_string(&dist).unwrap();
        assert_eq!(
            json,
            r#"{"kind":"atomic","atoms":[[0.3,0.0],[-0.3,0.0]],"probabilities":[0.5,0.5]}"#
        );
        let back: DistributionSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, dist);
    }
}
