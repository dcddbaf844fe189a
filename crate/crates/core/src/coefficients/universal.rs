//! Sequences that contain every finite arrangement of a base set.
//!
//! Stage `t` of the circle sequence lists every permutation of the first `t`
//! base points in lexicographic order; once the base is used up the final
//! stage repeats. The Jacobi pair is built the same way, with the `a`-stream
//! repeating each permutation `t!` times in place and the `b`-stream repeating
//! the whole permutation list `t!` times, so every pair of permutations sits
//! aligned somewhere in stage `t`.

use std::sync::Arc;

use num_complex::Complex64;

use super::{JacobiSequence, VerblunskySequence};
use crate::error::{invalid, Error, Result};

/// Largest base usable by the circle construction (`20!` still fits in `u64`).
pub const MAX_CIRCLE_BASE: usize = 20;
/// Largest base usable by the Jacobi construction (`12!·12!·12` fits in `u64`).
pub const MAX_JACOBI_BASE: usize = 12;

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// The `rank`-th permutation of `0..t` in lexicographic order.
fn unrank(mut rank: u64, t: usize) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..t).collect();
    let mut out = Vec::with_capacity(t);
    for k in (0..t).rev() {
        let f = factorial(k);
        let i = (rank / f) as usize;
        rank %= f;
        out.push(pool.remove(i));
    }
    out
}

/// Locates global position `pos` as `(stage, offset within stage)`, where
/// stages `1..cap` have lengths `stage_len(t)` and stage `cap` repeats forever.
fn locate(pos: u64, cap: usize, stage_len: impl Fn(usize) -> u64) -> (usize, u64) {
    let mut rest = pos;
    for t in 1..cap {
        let len = stage_len(t);
        if rest < len {
            return (t, rest);
        }
        rest -= len;
    }
    (cap, rest % stage_len(cap))
}

fn circle_entry(pos: u64, k: usize) -> usize {
    let (t, off) = locate(pos, k, |t| factorial(t) * t as u64);
    let perm = unrank(off / t as u64, t);
    perm[(off % t as u64) as usize]
}

/// Indices into the two bases for stream position `pos`.
fn jacobi_entry(pos: u64, k: usize) -> (usize, usize) {
    let (t, off) = locate(pos, k, |t| factorial(t) * factorial(t) * t as u64);
    let f = factorial(t);
    let block = off / t as u64;
    let slot = (off % t as u64) as usize;
    let a_perm = unrank(block / f, t);
    let b_perm = unrank(block % f, t);
    (a_perm[slot], b_perm[slot])
}

/// The universal Verblunsky sequence over `base`, truncated to `length`.
pub fn universal_circle_sequence(base: &[Complex64], length: usize) -> Result<VerblunskySequence> {
    if base.is_empty() || base.len() > MAX_CIRCLE_BASE {
        return Err(invalid(format!(
            "circle base must have between 1 and {MAX_CIRCLE_BASE} points"
        )));
    }
    if length == 0 {
        return Err(invalid("length must be positive"));
    }
    for (i, s) in base.iter().enumerate() {
        if !(s.norm() < 1.0) {
            return Err(invalid(format!(
                "base point s_{} = {s} is not strictly inside the unit disk",
                i + 1
            )));
        }
    }
    let base: Arc<[Complex64]> = base.into();
    let k = base.len();
    Ok(
        VerblunskySequence::from_fn(move |n| base[circle_entry(n as u64, k)])
            .with_len(Some(length)),
    )
}

/// The universal Jacobi parameters over `base_a` (off-diagonal) and `base_b` (diagonal).
pub fn universal_jacobi_pair(
    base_a: &[f64],
    base_b: &[f64],
    length: usize,
) -> Result<JacobiSequence> {
    if base_a.is_empty() || base_a.len() > MAX_JACOBI_BASE {
        return Err(invalid(format!(
            "Jacobi bases must have between 1 and {MAX_JACOBI_BASE} points"
        )));
    }
    if base_a.len() != base_b.len() {
        return Err(invalid(format!(
            "the a- and b-bases must have equal length (got {} and {})",
            base_a.len(),
            base_b.len()
        )));
    }
    if length == 0 {
        return Err(invalid("length must be positive"));
    }
    if let Some(i) = base_a.iter().position(|s| !(*s > 0.0)) {
        return Err(Error::InvalidParameter(format!(
            "base point s_{} = {} is not positive",
            i + 1,
            base_a[i]
        )));
    }
    let bound = base_a
        .iter()
        .chain(base_b)
        .fold(0.0f64, |m, x| m.max(x.abs()));
    let k = base_a.len();
    let a: Arc<[f64]> = base_a.into();
    let b: Arc<[f64]> = base_b.into();
    let seq = JacobiSequence::from_fns(
        move |n| a[jacobi_entry(n as u64 - 1, k).0],
        move |n| b[jacobi_entry(n as u64 - 1, k).1],
        bound,
    )?;
    Ok(seq.with_len(Some(length)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn labels(seq: &VerblunskySequence, len: usize) -> Vec<usize> {
        // base points are encoded as s_i = i/10
        seq.materialize(len)
            .unwrap()
            .iter()
            .map(|z| (z.re * 10.0).round() as usize)
            .collect()
    }

    fn base(k: usize) -> Vec<Complex64> {
        (1..=k)
            .map(|i| Complex64::new(i as f64 / 10.0, 0.0))
            .collect()
    }

    #[test]
    fn lexicographic_unranking() {
        let all: Vec<Vec<usize>> = (0..6).map(|r| unrank(r, 3)).collect();
        assert_eq!(
            all,
            vec![
                vec![0, 1, 2],
                vec![0, 2, 1],
                vec![1, 0, 2],
                vec![1, 2, 0],
                vec![2, 0, 1],
                vec![2, 1, 0]
            ]
        );
    }

    #[test]
    fn circle_prefix() {
        let seq = universal_circle_sequence(&base(3), 8).unwrap();
        assert_eq!(labels(&seq, 8), vec![1, 1, 2, 2, 1, 1, 2, 3]);
    }

    #[test]
    fn single_point_base_is_constant() {
        let seq = universal_circle_sequence(&base(1), 50).unwrap();
        assert!(labels(&seq, 50).iter().all(|&l| l == 1));
    }

    #[test]
    fn every_ordered_pair_is_adjacent() {
        let seq = universal_circle_sequence(&base(2), 20).unwrap();
        let l = labels(&seq, 20);
        let pairs: HashSet<(usize, usize)> = l.windows(2).map(|w| (w[0], w[1])).collect();
        for i in 1..=2 {
            for j in 1..=2 {
                assert!(pairs.contains(&(i, j)), "missing ({i},{j})");
            }
        }
    }

    #[test]
    fn rejects_points_on_the_circle() {
        let bad = vec![Complex64::new(0.5, 0.0), Complex64::new(0.0, 1.0)];
        assert!(universal_circle_sequence(&bad, 4).is_err());
    }

    #[test]
    fn jacobi_stage_two_prefix() {
        let seq = universal_jacobi_pair(&[1.0, 2.0], &[10.0, 20.0], 9).unwrap();
        let (a, b) = seq.materialize(9).unwrap();
        assert_eq!(a, vec![1.0, 1.0, 2.0, 1.0, 2.0, 2.0, 1.0, 2.0, 1.0]);
        assert_eq!(
            b,
            vec![10.0, 10.0, 20.0, 20.0, 10.0, 10.0, 20.0, 20.0, 10.0]
        );
    }

    #[test]
    fn jacobi_rejects_nonpositive_a() {
        assert!(universal_jacobi_pair(&[1.0, 0.0], &[0.0, 0.0], 4).is_err());
        assert!(universal_jacobi_pair(&[1.0], &[0.0, 0.0], 4).is_err());
    }
}
