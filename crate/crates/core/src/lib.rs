//! Bergman shift (Hessenberg) matrices of compactly supported measures.
//!
//! A measure is given by Verblunsky coefficients (unit circle), Jacobi
//! parameters (real line) or finitely many weighted points in the plane. The
//! crate builds finite truncations of the matrix of multiplication by `z` in
//! the orthonormal polynomial basis and evaluates ratio asymptotics, Laurent
//! coefficients of the ratio, weak and Cesàro moments, zeros and windowed
//! right-limit diagnostics.
//!
//! Indices follow the matrix convention: rows and columns are numbered from 1,
//! polynomial degrees and Verblunsky indices from 0.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod coefficients;
pub mod error;
pub mod hessenberg;
pub mod linalg;
pub mod polynomials;
pub mod report;
pub mod rightlimits;
pub mod zeros;

pub use coefficients::{
    alexandrov, degenerate_pair, strip, DiscretePlanarMeasure, DistributionSpec, JacobiSequence,
    Model, ModelSpec, VerblunskySequence,
};
pub use error::{Error, Result};
pub use hessenberg::{HessenbergTruncation, MatrixWindow, PowerMode, Source};
pub use num_complex::Complex64;

/// Crate version, recorded in experiment manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
