//! Compensated (double-double) complex arithmetic for the few verification
//! paths where plain f64 products would bury a true residual under their own
//! roundoff: ladder construction, metric assembly, and the residuals of the
//! defining identities. Inputs and outputs stay f64; only the intermediate
//! accumulation carries the extra limb.

use super::{Matrix, Scalar, Vector};

/// Double-double real number: value is `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Dd {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    #[inline]
    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn add(self, other: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, other.hi);
        let e = e + self.lo + other.lo;
        let (hi, lo) = quick_two_sum(s, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn sub(self, other: Dd) -> Dd {
        self.add(other.neg())
    }

    #[inline]
    pub fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    #[inline]
    pub fn mul(self, other: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, other.hi);
        let e = e + self.hi * other.lo + self.lo * other.hi;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn mul_f64(self, other: f64) -> Dd {
        let (p, e) = two_prod(self.hi, other);
        let e = e + self.lo * other;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    /// Long division: three correction terms give full double-double accuracy.
    #[inline]
    pub fn div(self, other: Dd) -> Dd {
        let q1 = self.hi / other.hi;
        let r1 = self.sub(other.mul_f64(q1));
        let q2 = r1.hi / other.hi;
        let r2 = r1.sub(other.mul_f64(q2));
        let q3 = r2.hi / other.hi;
        let (s, e) = quick_two_sum(q1, q2);
        Dd { hi: s, lo: e }.add(Dd::from_f64(q3))
    }
}

/// Complex double-double.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Cdd {
    pub re: Dd,
    pub im: Dd,
}

impl Cdd {
    pub const ZERO: Cdd = Cdd {
        re: Dd::ZERO,
        im: Dd::ZERO,
    };

    #[inline]
    pub fn from_scalar(z: Scalar) -> Cdd {
        Cdd {
            re: Dd::from_f64(z.re),
            im: Dd::from_f64(z.im),
        }
    }

    #[inline]
    pub fn value(self) -> Scalar {
        Scalar::new(self.re.value(), self.im.value())
    }

    #[inline]
    pub fn add(self, other: Cdd) -> Cdd {
        Cdd {
            re: self.re.add(other.re),
            im: self.im.add(other.im),
        }
    }

    #[inline]
    pub fn sub(self, other: Cdd) -> Cdd {
        Cdd {
            re: self.re.sub(other.re),
            im: self.im.sub(other.im),
        }
    }

    #[inline]
    pub fn mul(self, other: Cdd) -> Cdd {
        Cdd {
            re: self.re.mul(other.re).sub(self.im.mul(other.im)),
            im: self.re.mul(other.im).add(self.im.mul(other.re)),
        }
    }

    #[inline]
    pub fn conj(self) -> Cdd {
        Cdd {
            re: self.re,
            im: self.im.neg(),
        }
    }

    #[inline]
    pub fn div(self, other: Cdd) -> Cdd {
        let denom = other.re.mul(other.re).add(other.im.mul(other.im));
        let num = self.mul(other.conj());
        Cdd {
            re: num.re.div(denom),
            im: num.im.div(denom),
        }
    }

    /// Cheap magnitude estimate for pivoting.
    #[inline]
    fn mag_est(self) -> f64 {
        self.re.hi.abs() + self.im.hi.abs()
    }
}

/// Dense complex double-double matrix for short product chains.
#[derive(Debug, Clone)]
pub(crate) struct DdMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Cdd>,
}

impl DdMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DdMatrix {
            rows,
            cols,
            data: vec![Cdd::ZERO; rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m.data[i * dim + i] = Cdd::from_scalar(Scalar::ONE);
        }
        m
    }

    pub fn from_matrix(m: &Matrix) -> Self {
        DdMatrix {
            rows: m.rows(),
            cols: m.cols(),
            data: m.data().iter().map(|&z| Cdd::from_scalar(z)).collect(),
        }
    }

    pub fn to_matrix(&self) -> Matrix {
        Matrix::new(
            self.rows,
            self.cols,
            self.data.iter().map(|c| c.value()).collect(),
        )
        .expect("double-double results stay finite")
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> Cdd {
        self.data[i * self.cols + j]
    }

    #[inline]
    fn at_mut(&mut self, i: usize, j: usize) -> &mut Cdd {
        &mut self.data[i * self.cols + j]
    }

    pub fn adjoint_of(m: &Matrix) -> Self {
        DdMatrix::from_matrix(&m.adjoint())
    }

    pub fn mul(&self, other: &DdMatrix) -> DdMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = DdMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                for j in 0..other.cols {
                    let acc = out.at(i, j).add(a.mul(other.at(k, j)));
                    *out.at_mut(i, j) = acc;
                }
            }
        }
        out
    }

    pub fn add(&self, other: &DdMatrix) -> DdMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        DdMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.add(*b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &DdMatrix) -> DdMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        DdMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.sub(*b))
                .collect(),
        }
    }

    pub fn max_norm(&self) -> f64 {
        self.data
            .iter()
            .map(|c| c.value().norm())
            .fold(0.0, f64::max)
    }

    /// k-th matrix power of an f64 matrix, accumulated in double-double.
    pub fn power_of(m: &Matrix, k: usize) -> DdMatrix {
        let base = DdMatrix::from_matrix(m);
        let mut acc = DdMatrix::identity(m.rows());
        for _ in 0..k {
            acc = acc.mul(&base);
        }
        acc
    }
}

/// Compensated matrix-vector product of an f64 matrix with a dd vector.
pub(crate) fn dd_matvec(m: &Matrix, v: &[Cdd]) -> Vec<Cdd> {
    assert_eq!(m.cols(), v.len());
    (0..m.rows())
        .map(|i| {
            let mut acc = Cdd::ZERO;
            for (j, &vj) in v.iter().enumerate() {
                acc = acc.add(Cdd::from_scalar(m[(i, j)]).mul(vj));
            }
            acc
        })
        .collect()
}

pub(crate) fn dd_vector(v: &Vector) -> Vec<Cdd> {
    v.data().iter().map(|&z| Cdd::from_scalar(z)).collect()
}

pub(crate) fn dd_vector_to_f64(v: &[Cdd]) -> Vector {
    Vector::new(v.iter().map(|c| c.value()).collect())
}

/// Solve a dense double-double linear system by Gauss elimination with
/// partial pivoting. Sizes here never exceed ~18.
fn dd_solve(mut a: DdMatrix, mut rhs: Vec<Cdd>) -> Option<Vec<Cdd>> {
    let dim = a.rows;
    assert_eq!(a.cols, dim);
    assert_eq!(rhs.len(), dim);
    for col in 0..dim {
        let (pivot_row, pivot_mag) = (col..dim)
            .map(|r| (r, a.at(r, col).mag_est()))
            .max_by(|x, y| x.1.partial_cmp(&y.1).unwrap())?;
        if pivot_mag <= f64::MIN_POSITIVE {
            return None;
        }
        if pivot_row != col {
            for j in 0..dim {
                let tmp = a.at(col, j);
                *a.at_mut(col, j) = a.at(pivot_row, j);
                *a.at_mut(pivot_row, j) = tmp;
            }
            rhs.swap(col, pivot_row);
        }
        let pivot = a.at(col, col);
        for r in (col + 1)..dim {
            let factor = a.at(r, col).div(pivot);
            if factor.mag_est() == 0.0 {
                continue;
            }
            for j in col..dim {
                let val = a.at(r, j).sub(factor.mul(a.at(col, j)));
                *a.at_mut(r, j) = val;
            }
            rhs[r] = rhs[r].sub(factor.mul(rhs[col]));
        }
    }
    let mut x = vec![Cdd::ZERO; dim];
    for row in (0..dim).rev() {
        let mut acc = rhs[row];
        for j in (row + 1)..dim {
            acc = acc.sub(a.at(row, j).mul(x[j]));
        }
        x[row] = acc.div(a.at(row, row));
    }
    Some(x)
}

/// One bordered inverse-iteration step refining an approximate nullspace
/// vector of `m` to double-double accuracy: solve
/// `[[m^H m, v], [v^H, 0]] [x; s] = [0; 1]` and renormalize `x`.
///
/// The f64 eigenvector from the Gram eigenproblem carries an error of order
/// `u * cond`; laddering amplifies it further, so the vacuum is polished
/// here before anything is built on it.
pub(crate) fn refine_nullspace(m: &Matrix, v: &Vector) -> Option<Vector> {
    let dim = v.dim();
    let gram = DdMatrix::adjoint_of(m).mul(&DdMatrix::from_matrix(m));
    let mut bordered = DdMatrix::zeros(dim + 1, dim + 1);
    for i in 0..dim {
        for j in 0..dim {
            *bordered.at_mut(i, j) = gram.at(i, j);
        }
        *bordered.at_mut(i, dim) = Cdd::from_scalar(v[i]);
        *bordered.at_mut(dim, i) = Cdd::from_scalar(v[i].conj());
    }
    let mut rhs = vec![Cdd::ZERO; dim + 1];
    rhs[dim] = Cdd::from_scalar(Scalar::ONE);
    let solution = dd_solve(bordered, rhs)?;
    let x = Vector::new(solution[..dim].iter().map(|c| c.value()).collect());
    let norm = x.norm();
    if !norm.is_finite() || norm <= f64::MIN_POSITIVE {
        return None;
    }
    Some(x.scale(Scalar::new(1.0 / norm, 0.0)))
}

/// Compensated Hermitian inner product `<a|b>` of f64 vectors.
pub(crate) fn dd_dot(a: &Vector, b: &Vector) -> Scalar {
    assert_eq!(a.dim(), b.dim());
    let mut acc = Cdd::ZERO;
    for i in 0..a.dim() {
        acc = acc.add(
            Cdd::from_scalar(a[i]).conj().mul(Cdd::from_scalar(b[i])),
        );
    }
    acc.value()
}

/// Compensated rank-one accumulation `out += |u><v|` on dd storage.
pub(crate) fn dd_outer_acc(out: &mut DdMatrix, u: &[Cdd], v: &[Cdd], sign: f64) {
    let s = Cdd::from_scalar(Scalar::new(sign, 0.0));
    for i in 0..u.len() {
        for j in 0..v.len() {
            let term = s.mul(u[i].mul(v[j].conj()));
            let acc = out.at(i, j).add(term);
            *out.at_mut(i, j) = acc;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::c;

    #[test]
    fn dd_add_recovers_cancelled_bits() {
        // (1e16 + 1) - 1e16 = 1 exactly in dd, 0 or 2 in f64.
        let big = Dd::from_f64(1e16);
        let one = Dd::from_f64(1.0);
        let r = big.add(one).sub(big);
        assert_eq!(r.value(), 1.0);
    }

    #[test]
    fn dd_mul_keeps_product_error() {
        let a = Dd::from_f64(1.0 + 2f64.powi(-30));
        let sq = a.mul(a);
        let exact = 1.0 + 2f64.powi(-29) + 2f64.powi(-60);
        assert!((sq.value() - exact).abs() < 1e-25);
    }

    #[test]
    fn dd_matmul_matches_f64_for_small_entries() {
        let m = Matrix::new(2, 2, vec![c(1.0, 2.0), c(-0.5, 0.0), c(0.0, 1.0), c(3.0, -1.0)]).unwrap();
        let p_dd = DdMatrix::from_matrix(&m).mul(&DdMatrix::from_matrix(&m)).to_matrix();
        let p = &m * &m;
        assert!((&p_dd - &p).max_norm() < 1e-14);
    }

    #[test]
    fn dd_dot_beats_naive_cancellation() {
        // Catastrophic cancellation: [1e8, 1] . [1e8, -1e16 + 1] style.
        let a = Vector::new(vec![c(1e8, 0.0), c(1.0, 0.0)]);
        let b = Vector::new(vec![c(1e8, 0.0), c(-1e16, 0.0)]);
        // <a|b> = 1e16 - 1e16 = 0 exactly.
        assert_eq!(dd_dot(&a, &b), Scalar::ZERO);
    }
}
