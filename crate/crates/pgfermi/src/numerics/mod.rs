//! Minimal dense complex linear algebra for (n+1)-dimensional operator spaces.
//!
//! Everything in this crate works on small square complex matrices (dimension
//! at most ~17), so the kernel favors robustness and determinism over
//! performance: Jacobi sweeps for Hermitian eigenproblems, shifted QR for
//! general spectra, Gauss-Jordan with partial pivoting for inverses.

pub(crate) mod dd;
mod eig;
mod matrix;
mod solve;

pub use eig::{eigenvalues, hermitian_eigen, singular_values};
pub use matrix::{Matrix, Vector};
pub use solve::{approx_equal, invert, invert_with_bound, nullspace_1d, DEFAULT_CONDITION_BOUND};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Complex double-precision scalar used for every stored value.
pub type Scalar = num_complex::Complex64;

/// Shorthand for constructing a scalar from real and imaginary parts.
pub fn c(re: f64, im: f64) -> Scalar {
    Scalar::new(re, im)
}

#[derive(Debug, Error, PartialEq)]
pub enum NumericsError {
    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: String, found: String },
    #[error("matrix data length {len} does not match {rows}x{cols}")]
    LengthMismatch { rows: usize, cols: usize, len: usize },
    #[error("non-finite entry at index {0}")]
    NonFinite(usize),
    #[error("matrix is singular or too ill-conditioned (condition estimate {cond:.3e} > bound {bound:.3e})")]
    Singular { cond: f64, bound: f64 },
    #[error("no numerical nullspace: smallest singular value {sigma_min:.3e} exceeds threshold {threshold:.3e}")]
    NoNullspace { sigma_min: f64, threshold: f64 },
    #[error("degenerate nullspace: singular values {sigma_min:.3e}, {sigma_next:.3e} do not isolate a unique direction")]
    DegenerateNullspace { sigma_min: f64, sigma_next: f64 },
    #[error("invalid tolerance: abs and rel must be finite, non-negative, and not both zero")]
    InvalidTolerance,
}

/// Absolute/relative tolerance pair used by every verification routine.
///
/// A residual `r` at scale `s` passes when `r <= abs + rel * s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub const DEFAULT_ABS: f64 = 1e-10;
    pub const DEFAULT_REL: f64 = 1e-10;

    pub fn new(abs: f64, rel: f64) -> Result<Self, NumericsError> {
        let ok = abs.is_finite() && rel.is_finite() && abs >= 0.0 && rel >= 0.0;
        if !ok || (abs == 0.0 && rel == 0.0) {
            return Err(NumericsError::InvalidTolerance);
        }
        Ok(Tolerance { abs, rel })
    }

    /// Pass/fail threshold for a residual measured at the given scale.
    pub fn threshold(&self, scale: f64) -> f64 {
        self.abs + self.rel * scale
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs: Self::DEFAULT_ABS,
            rel: Self::DEFAULT_REL,
        }
    }
}
