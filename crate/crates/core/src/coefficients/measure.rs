use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{invalid, Result};

/// Finitely many weighted points in the plane, normalized to total mass 1.
///
/// Points are stored sorted by real part, then imaginary part, so everything
/// derived from the measure is independent of the input order.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretePlanarMeasure {
    points: Vec<Complex64>,
    weights: Vec<f64>,
}

impl DiscretePlanarMeasure {
    /// Builds the measure, rescaling `weights` to sum to 1.
    pub fn new(points: Vec<Complex64>, weights: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(invalid(
                "a discrete measure needs at least two support points",
            ));
        }
        if points.len() != weights.len() {
            return Err(invalid(format!(
                "{} points but {} weights",
                points.len(),
                weights.len()
            )));
        }
        if weights.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
            return Err(invalid("weights must be positive and finite"));
        }
        if points
            .iter()
            .any(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(invalid("support points must be finite"));
        }
        let total: f64 = weights.iter().sum();
        let mut pairs: Vec<(Complex64, f64)> = points
            .into_iter()
            .zip(weights.into_iter().map(|w| w / total))
            .collect();
        pairs.sort_by(|(a, _), (b, _)| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(invalid("support points must be pairwise distinct"));
        }
        let (points, weights) = pairs.into_iter().unzip();
        Ok(Self { points, weights })
    }

    /// Equal weights on the given points.
    pub fn uniform(points: Vec<Complex64>) -> Result<Self> {
        let weights = vec![1.0; points.len()];
        Self::new(points, weights)
    }

    /// Equal weights on the `count`-th roots of unity.
    pub fn roots_of_unity(count: usize) -> Result<Self> {
        let points = (0..count)
            .map(|k| Complex64::from_polar(1.0, TAU * k as f64 / count as f64))
            .collect();
        Self::uniform(points)
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn count(&self) -> usize {
        self.points.len()
    }

    /// `Σ w_k z_k^j`.
    pub fn moment(&self, j: u32) -> Complex64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(z, w)| z.powu(j) * *w)
            .sum()
    }

    /// `max |z_k|`.
    pub fn support_radius(&self) -> f64 {
        self.points.iter().fold(0.0, |m, z| m.max(z.norm()))
    }
}
