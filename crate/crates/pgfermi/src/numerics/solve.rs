//! Inverses, nullspaces, and tolerance-aware comparison.

use super::eig::hermitian_eigen;
use super::{Matrix, NumericsError, Scalar, Tolerance, Vector};

/// Condition-number bound above which `invert` refuses to return a result.
pub const DEFAULT_CONDITION_BOUND: f64 = 1e12;

/// Ratio by which the second-smallest singular value must dominate the
/// smallest before a one-dimensional nullspace is accepted as unique.
const NULLSPACE_GAP_RATIO: f64 = 1e6;

/// Inverse of a square matrix by Gauss-Jordan elimination with partial
/// pivoting, rejected when the condition estimate `|M|_F |M^-1|_F` exceeds
/// `DEFAULT_CONDITION_BOUND`.
pub fn invert(m: &Matrix) -> Result<Matrix, NumericsError> {
    invert_with_bound(m, DEFAULT_CONDITION_BOUND)
}

pub fn invert_with_bound(m: &Matrix, bound: f64) -> Result<Matrix, NumericsError> {
    assert!(m.is_square(), "invert requires a square matrix");
    let dim = m.rows();
    let mut a = m.clone();
    let mut inv = Matrix::identity(dim);

    for col in 0..dim {
        let (pivot_row, pivot_mag) = (col..dim)
            .map(|r| (r, a[(r, col)].norm()))
            .max_by(|x, y| x.1.partial_cmp(&y.1).unwrap())
            .unwrap();
        if pivot_mag <= f64::MIN_POSITIVE {
            return Err(NumericsError::Singular {
                cond: f64::INFINITY,
                bound,
            });
        }
        if pivot_row != col {
            for j in 0..dim {
                let (x, y) = (a[(col, j)], a[(pivot_row, j)]);
                a[(col, j)] = y;
                a[(pivot_row, j)] = x;
                let (x, y) = (inv[(col, j)], inv[(pivot_row, j)]);
                inv[(col, j)] = y;
                inv[(pivot_row, j)] = x;
            }
        }
        let pivot = a[(col, col)];
        for j in 0..dim {
            a[(col, j)] /= pivot;
            inv[(col, j)] /= pivot;
        }
        for r in 0..dim {
            if r == col {
                continue;
            }
            let factor = a[(r, col)];
            if factor == Scalar::ZERO {
                continue;
            }
            for j in 0..dim {
                let acj = a[(col, j)];
                let icj = inv[(col, j)];
                a[(r, j)] -= factor * acj;
                inv[(r, j)] -= factor * icj;
            }
        }
    }

    let cond = m.fro_norm() * inv.fro_norm();
    if !cond.is_finite() || cond > bound {
        return Err(NumericsError::Singular { cond, bound });
    }
    Ok(inv)
}

/// Unit-norm vector spanning the one-dimensional numerical nullspace of `M`.
///
/// The singular spectrum of `M` is computed from the Hermitian eigenproblem
/// of `M^H M`; the smallest singular value must fall below the tolerance
/// threshold while the next one stays above it by `NULLSPACE_GAP_RATIO`,
/// otherwise the nullspace is reported as absent or degenerate. The returned
/// vector's largest-modulus entry is made real and positive, so repeated
/// calls are reproducible.
pub fn nullspace_1d(m: &Matrix, tol: Tolerance) -> Result<Vector, NumericsError> {
    assert!(m.is_square(), "nullspace_1d requires a square matrix");
    let gram = &m.adjoint() * m;
    let (vals, vecs) = hermitian_eigen(&gram);
    let sigma: Vec<f64> = vals.iter().map(|&x| x.max(0.0).sqrt()).collect();
    let dim = sigma.len();
    let sigma_max = sigma[dim - 1];
    let threshold = tol.threshold(sigma_max);

    // The Gram route squares the condition of small singular values: the
    // Jacobi eigenvector carries an error of order u * cond, and the
    // smallest singular value loses half its digits. The candidate vector
    // is therefore polished by a bordered inverse-iteration step in
    // double-double, and the smallest singular value is measured directly
    // as |M v| on the polished vector.
    let coarse = vecs.column(0);
    let v = canonical_phase(&super::dd::refine_nullspace(m, &coarse).unwrap_or(coarse));
    let sigma_min = m.matvec(&v).norm();
    if sigma_min > threshold {
        return Err(NumericsError::NoNullspace {
            sigma_min,
            threshold,
        });
    }
    if dim > 1 {
        let sigma_next = sigma[1];
        if sigma_next <= threshold || sigma_next < NULLSPACE_GAP_RATIO * sigma_min {
            return Err(NumericsError::DegenerateNullspace {
                sigma_min,
                sigma_next,
            });
        }
    }
    Ok(v)
}

/// Scale a unit vector so its largest-modulus component is real positive.
pub(crate) fn canonical_phase(v: &Vector) -> Vector {
    let mut best = 0usize;
    let mut best_mag = 0.0f64;
    for i in 0..v.dim() {
        let mag = v[i].norm();
        if mag > best_mag {
            best_mag = mag;
            best = i;
        }
    }
    if best_mag <= f64::MIN_POSITIVE {
        return v.clone();
    }
    v.scale(v[best].conj() / Scalar::new(best_mag, 0.0))
}

/// True when the largest entrywise deviation is within
/// `abs + rel * max(|A|, |B|)` (max-entry norms).
pub fn approx_equal(a: &Matrix, b: &Matrix, tol: Tolerance) -> Result<bool, NumericsError> {
    if (a.rows(), a.cols()) != (b.rows(), b.cols()) {
        return Err(NumericsError::ShapeMismatch {
            expected: format!("{}x{}", a.rows(), a.cols()),
            found: format!("{}x{}", b.rows(), b.cols()),
        });
    }
    let deviation = (a - b).max_norm();
    Ok(deviation <= tol.threshold(a.max_norm().max(b.max_norm())))
}
