//! Small dense eigensolvers: cyclic Jacobi for Hermitian matrices and a
//! single-shift complex QR iteration for general spectra.

use super::{Matrix, Scalar};

const JACOBI_MAX_SWEEPS: usize = 100;
const QR_MAX_ITERS_PER_EIGENVALUE: usize = 60;

/// Eigendecomposition of a Hermitian matrix via cyclic complex Jacobi sweeps.
///
/// Returns eigenvalues in ascending order with matching unit eigenvector
/// columns. The input is symmetrized as `(M + M^H)/2` first, so callers may
/// pass matrices that are Hermitian only up to rounding.
pub fn hermitian_eigen(m: &Matrix) -> (Vec<f64>, Matrix) {
    assert!(m.is_square(), "hermitian_eigen requires a square matrix");
    let dim = m.rows();
    let mh = m.adjoint();
    let mut a = Matrix::from_fn(dim, dim, |i, j| (m[(i, j)] + mh[(i, j)]) * 0.5);
    let mut v = Matrix::identity(dim);

    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0f64;
        for p in 0..dim {
            for q in (p + 1)..dim {
                off += a[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= 1e-15 * (1.0 + a.fro_norm()) {
            break;
        }
        for p in 0..dim {
            for q in (p + 1)..dim {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= f64::MIN_POSITIVE {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let phase = apq / mag;
                // Rotation angle from the real 2x2 problem [[app, |apq|], [|apq|, aqq]].
                let diff = app - aqq;
                let t = if diff == 0.0 {
                    1.0
                } else {
                    let cot2 = diff / (2.0 * mag);
                    cot2.signum() / (cot2.abs() + (1.0 + cot2 * cot2).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                // Unitary plane rotation: col_p' = c*col_p + s*conj(phase)*col_q,
                // col_q' = -s*phase*col_p + c*col_q, applied as A <- G^H A G, V <- V G.
                let gp = Scalar::new(c, 0.0);
                let gq = phase * s;
                for i in 0..dim {
                    let aip = a[(i, p)];
                    let aiq = a[(i, q)];
                    a[(i, p)] = aip * gp + aiq * gq.conj();
                    a[(i, q)] = aiq * gp - aip * gq;
                }
                for j in 0..dim {
                    let apj = a[(p, j)];
                    let aqj = a[(q, j)];
                    a[(p, j)] = apj * gp + aqj * gq;
                    a[(q, j)] = aqj * gp - apj * gq.conj();
                }
                for i in 0..dim {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = vip * gp + viq * gq.conj();
                    v[(i, q)] = viq * gp - vip * gq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = Matrix::from_fn(dim, dim, |i, j| v[(i, order[j])]);
    (values, vectors)
}

/// Singular values of a (square) matrix in ascending order, computed from the
/// Hermitian eigenvalues of `M^H M`.
pub fn singular_values(m: &Matrix) -> Vec<f64> {
    let gram = &m.adjoint() * m;
    let (vals, _) = hermitian_eigen(&gram);
    vals.iter().map(|&x| x.max(0.0).sqrt()).collect()
}

/// Eigenvalues of a general complex square matrix, unordered.
///
/// Householder reduction to Hessenberg form followed by explicit
/// Wilkinson-shifted QR with deflation.
pub fn eigenvalues(m: &Matrix) -> Vec<Scalar> {
    assert!(m.is_square(), "eigenvalues requires a square matrix");
    let dim = m.rows();
    if dim == 0 {
        return Vec::new();
    }
    let mut h = hessenberg(m);
    let mut eigs = Vec::with_capacity(dim);
    let mut hi = dim; // Active block is h[lo..hi, lo..hi].

    let mut iters = 0usize;
    let max_iters = QR_MAX_ITERS_PER_EIGENVALUE * dim.max(1);
    while hi > 0 {
        // Deflate converged trailing entries.
        let lo = active_block_start(&h, hi);
        if hi - lo == 1 {
            eigs.push(h[(hi - 1, hi - 1)]);
            hi -= 1;
            continue;
        }
        if hi - lo == 2 {
            let (l1, l2) = eig2(
                h[(hi - 2, hi - 2)],
                h[(hi - 2, hi - 1)],
                h[(hi - 1, hi - 2)],
                h[(hi - 1, hi - 1)],
            );
            eigs.push(l1);
            eigs.push(l2);
            hi -= 2;
            continue;
        }

        iters += 1;
        assert!(iters <= max_iters, "QR iteration failed to converge");
        let shift = if iters % 12 == 0 {
            // Exceptional shift to break rare limit cycles.
            Scalar::new(h[(hi - 1, hi - 2)].norm() + h[(hi - 2, hi - 3)].norm(), 0.0)
        } else {
            wilkinson_shift(&h, hi)
        };
        qr_step(&mut h, lo, hi, shift);
    }
    eigs
}

fn hessenberg(m: &Matrix) -> Matrix {
    let dim = m.rows();
    let mut h = m.clone();
    for k in 0..dim.saturating_sub(2) {
        // Householder vector for column k below the subdiagonal.
        let mut x = vec![Scalar::ZERO; dim - k - 1];
        for i in (k + 1)..dim {
            x[i - k - 1] = h[(i, k)];
        }
        let norm_x = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm_x <= f64::MIN_POSITIVE {
            continue;
        }
        let alpha = if x[0].norm() > 0.0 {
            -(x[0] / x[0].norm()) * norm_x
        } else {
            Scalar::new(-norm_x, 0.0)
        };
        let mut v = x.clone();
        v[0] -= alpha;
        let vnorm2 = v.iter().map(|z| z.norm_sqr()).sum::<f64>();
        if vnorm2 <= f64::MIN_POSITIVE {
            continue;
        }

        // H <- P H P with P = I - 2 v v^H / (v^H v) acting on rows/cols k+1..
        for j in 0..dim {
            let mut dot = Scalar::ZERO;
            for i in (k + 1)..dim {
                dot += v[i - k - 1].conj() * h[(i, j)];
            }
            let f = dot * (2.0 / vnorm2);
            for i in (k + 1)..dim {
                let vi = v[i - k - 1];
                let val = h[(i, j)] - vi * f;
                h[(i, j)] = val;
            }
        }
        for i in 0..dim {
            let mut dot = Scalar::ZERO;
            for j in (k + 1)..dim {
                dot += h[(i, j)] * v[j - k - 1];
            }
            let f = dot * (2.0 / vnorm2);
            for j in (k + 1)..dim {
                let vj = v[j - k - 1];
                h[(i, j)] -= f * vj.conj();
            }
        }
        for i in (k + 2)..dim {
            h[(i, k)] = Scalar::ZERO;
        }
    }
    h
}

fn active_block_start(h: &Matrix, hi: usize) -> usize {
    for i in (1..hi).rev() {
        let sub = h[(i, i - 1)].norm();
        let scale = h[(i, i)].norm() + h[(i - 1, i - 1)].norm();
        if sub <= 1e-15 * (scale + f64::MIN_POSITIVE) {
            return i;
        }
    }
    0
}

fn eig2(a: Scalar, b: Scalar, c: Scalar, d: Scalar) -> (Scalar, Scalar) {
    let mean = (a + d) * 0.5;
    let disc = ((a - d) * (a - d) * 0.25 + b * c).sqrt();
    (mean + disc, mean - disc)
}

fn wilkinson_shift(h: &Matrix, hi: usize) -> Scalar {
    let a = h[(hi - 2, hi - 2)];
    let b = h[(hi - 2, hi - 1)];
    let c = h[(hi - 1, hi - 2)];
    let d = h[(hi - 1, hi - 1)];
    let (l1, l2) = eig2(a, b, c, d);
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// One explicit shifted QR step on the active Hessenberg block.
fn qr_step(h: &mut Matrix, lo: usize, hi: usize, shift: Scalar) {
    for i in lo..hi {
        h[(i, i)] -= shift;
    }
    // Forward pass: Givens rotations zeroing the subdiagonal.
    let mut rotations = Vec::with_capacity(hi - lo - 1);
    for i in lo..(hi - 1) {
        let a = h[(i, i)];
        let b = h[(i + 1, i)];
        let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
        let (ca, sb) = if r <= f64::MIN_POSITIVE {
            (Scalar::ONE, Scalar::ZERO)
        } else {
            (a.conj() / r, b.conj() / r)
        };
        rotations.push((ca, sb));
        // Row update: (row_i, row_{i+1}) <- (ca*row_i + sb*row_{i+1}, -conj(sb)*row_i + conj(ca)*row_{i+1}).
        for j in i..hi {
            let x = h[(i, j)];
            let y = h[(i + 1, j)];
            h[(i, j)] = ca * x + sb * y;
            h[(i + 1, j)] = -sb.conj() * x + ca.conj() * y;
        }
    }
    // Backward pass: multiply by the adjoint rotations on the right (RQ).
    for (idx, &(ca, sb)) in rotations.iter().enumerate() {
        let i = lo + idx;
        for r in lo..(i + 2).min(hi) {
            let x = h[(r, i)];
            let y = h[(r, i + 1)];
            h[(r, i)] = x * ca.conj() + y * sb.conj();
            h[(r, i + 1)] = -x * sb + y * ca;
        }
    }
    for i in lo..hi {
        h[(i, i)] += shift;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::c;

    fn sort_eigenvalues(mut eigs: Vec<Scalar>) -> Vec<Scalar> {
        eigs.sort_by(|a, b| {
            a.re.partial_cmp(&b.re)
                .unwrap()
                .then(a.im.partial_cmp(&b.im).unwrap())
        });
        eigs
    }

    #[test]
    fn jacobi_diagonalizes_pauli_x() {
        let m = Matrix::new(2, 2, vec![Scalar::ZERO, Scalar::ONE, Scalar::ONE, Scalar::ZERO]).unwrap();
        let (vals, vecs) = hermitian_eigen(&m);
        assert!((vals[0] + 1.0).abs() < 1e-14);
        assert!((vals[1] - 1.0).abs() < 1e-14);
        // Residual check M v = lambda v.
        for j in 0..2 {
            let v = vecs.column(j);
            let mv = m.matvec(&v);
            let res = mv.sub(&v.scale(c(vals[j], 0.0)));
            assert!(res.norm() < 1e-14);
        }
    }

    #[test]
    fn jacobi_handles_complex_hermitian() {
        // Pauli-Y-like with an extra level.
        let m = Matrix::new(
            3,
            3,
            vec![
                c(2.0, 0.0), c(0.0, -1.0), c(0.5, 0.5),
                c(0.0, 1.0), c(1.0, 0.0), c(0.0, 0.0),
                c(0.5, -0.5), c(0.0, 0.0), c(-1.0, 0.0),
            ],
        )
        .unwrap();
        let (vals, vecs) = hermitian_eigen(&m);
        for j in 0..3 {
            let v = vecs.column(j);
            let res = m.matvec(&v).sub(&v.scale(c(vals[j], 0.0)));
            assert!(res.norm() < 1e-13, "residual {}", res.norm());
        }
        // Trace is preserved.
        let sum: f64 = vals.iter().sum();
        assert!((sum - 2.0).abs() < 1e-13);
    }

    #[test]
    fn qr_finds_shift_matrix_spectrum() {
        // Nilpotent: all eigenvalues zero.
        let m = Matrix::new(
            3,
            3,
            vec![
                Scalar::ZERO, Scalar::ONE, Scalar::ZERO,
                Scalar::ZERO, Scalar::ZERO, Scalar::ONE,
                Scalar::ZERO, Scalar::ZERO, Scalar::ZERO,
            ],
        )
        .unwrap();
        for e in eigenvalues(&m) {
            assert!(e.norm() < 1e-10);
        }
    }

    #[test]
    fn qr_recovers_similarity_spectrum() {
        // A = S D S^{-1} with D = diag(1, 2+i, -3).
        let d = Matrix::diag(&[c(1.0, 0.0), c(2.0, 1.0), c(-3.0, 0.0)]);
        let s = Matrix::new(
            3,
            3,
            vec![
                c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0),
                c(0.0, 0.5), c(1.0, 0.0), c(1.0, 0.0),
                c(0.0, 0.0), c(-1.0, 0.25), c(1.0, 0.0),
            ],
        )
        .unwrap();
        let s_inv = crate::numerics::invert(&s).unwrap();
        let a = &(&s * &d) * &s_inv;
        let eigs = sort_eigenvalues(eigenvalues(&a));
        let expected = sort_eigenvalues(vec![c(1.0, 0.0), c(2.0, 1.0), c(-3.0, 0.0)]);
        for (e, x) in eigs.iter().zip(&expected) {
            assert!((e - x).norm() < 1e-10, "eig {e} vs {x}");
        }
    }

    #[test]
    fn singular_values_of_diag() {
        let m = Matrix::diag(&[c(-3.0, 0.0), c(0.0, 2.0), Scalar::ZERO]);
        let sv = singular_values(&m);
        assert!((sv[0] - 0.0).abs() < 1e-12);
        assert!((sv[1] - 2.0).abs() < 1e-12);
        assert!((sv[2] - 3.0).abs() < 1e-12);
    }
}
