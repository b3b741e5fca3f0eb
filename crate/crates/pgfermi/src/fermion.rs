//! Hermitian nonlinear n-fermion algebra: ladder matrices obeying
//! `A A^+ + (A^+)^n A^n = 1`, their Fock basis, and the number operator.
//!
//! The annihilation operator is realized as the (n+1)-dimensional shift
//! matrix with ones on the superdiagonal and vacuum `|0> = e_1`, which makes
//! every identity in this module exact in integer arithmetic.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{Matrix, Scalar, Tolerance, Vector};
use crate::report::{Check, VerificationReport};

/// Largest supported degree of nonlinearity.
pub const MAX_DEGREE: usize = 16;

#[derive(Debug, Error, PartialEq)]
pub enum FermionError {
    #[error("degree out of range: n = {0} not in 1..={MAX_DEGREE}")]
    DegreeOutOfRange(usize),
}

/// The n-fermion algebra at a fixed degree: annihilation matrix, Fock basis,
/// and number operator.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FermionAlgebra {
    pub n: usize,
    #[serde(rename = "A")]
    pub a: Matrix,
    pub fock: Vec<Vector>,
    #[serde(rename = "N")]
    pub number: Matrix,
}

impl FermionAlgebra {
    pub fn dim(&self) -> usize {
        self.n + 1
    }

    /// Creation operator `A^+`.
    pub fn raising(&self) -> Matrix {
        self.a.adjoint()
    }
}

/// Build the degree-n fermion algebra in its shift-matrix realization.
pub fn build_fermion(n: usize) -> Result<FermionAlgebra, FermionError> {
    if n < 1 || n > MAX_DEGREE {
        return Err(FermionError::DegreeOutOfRange(n));
    }
    let dim = n + 1;
    let mut a = Matrix::zeros(dim, dim);
    for k in 0..n {
        a[(k, k + 1)] = Scalar::ONE;
    }
    let raise = a.adjoint();
    let mut fock = Vec::with_capacity(dim);
    fock.push(Vector::basis(dim, 0));
    for k in 0..n {
        let next = raise.matvec(&fock[k]);
        fock.push(next);
    }
    let number = number_operator_of(&a, n);
    Ok(FermionAlgebra { n, a, fock, number })
}

/// Number operator `N = sum_{k=1}^{n} (A^+)^k A^k`; diagonal with eigenvalues
/// 0..n in the Fock basis.
pub fn fermion_number_operator(alg: &FermionAlgebra) -> Matrix {
    number_operator_of(&alg.a, alg.n)
}

fn number_operator_of(a: &Matrix, n: usize) -> Matrix {
    let raise = a.adjoint();
    let mut acc = Matrix::zeros(a.rows(), a.cols());
    for k in 1..=n {
        acc = &acc + &(&raise.pow(k) * &a.pow(k));
    }
    acc
}

fn commutator(x: &Matrix, y: &Matrix) -> Matrix {
    &(x * y) - &(y * x)
}

/// Residual checks for every defining identity of the algebra.
pub fn verify_fermion(alg: &FermionAlgebra, tol: Tolerance) -> VerificationReport {
    let dim = alg.dim();
    let a = &alg.a;
    let raise = a.adjoint();
    let identity = Matrix::identity(dim);
    let scale = a.max_norm().max(1.0);
    let mut report = VerificationReport::empty();

    let anticomm = &(&(a * &raise) + &(&raise.pow(alg.n) * &a.pow(alg.n))) - &identity;
    report.push(Check::new(
        "anticommutation",
        "A A^+ + (A^+)^n A^n = 1",
        anticomm.max_norm(),
        tol.threshold(scale.powi(2 * alg.n as i32)),
    ));

    report.push(Check::new(
        "nilpotency",
        "A^{n+1} = 0",
        a.pow(alg.n + 1).max_norm(),
        tol.threshold(scale.powi(alg.n as i32 + 1)),
    ));

    let mut ladder = 0.0f64;
    for k in 0..dim {
        // A |k> = |k-1> (with |{-1}> = 0) and A^+ |k> = |k+1> (with |n+1> = 0).
        let lowered = a.matvec(&alg.fock[k]);
        let expect_low = if k == 0 { Vector::zeros(dim) } else { alg.fock[k - 1].clone() };
        ladder = ladder.max(lowered.sub(&expect_low).max_norm());
        let raised = raise.matvec(&alg.fock[k]);
        let expect_high = if k == alg.n { Vector::zeros(dim) } else { alg.fock[k + 1].clone() };
        ladder = ladder.max(raised.sub(&expect_high).max_norm());
    }
    report.push(Check::new(
        "ladder_action",
        "A|k> = |k-1>, A^+|k> = |k+1>",
        ladder,
        tol.threshold(scale),
    ));

    let number = &alg.number;
    let nscale = number.max_norm().max(1.0);
    report.push(Check::new(
        "commutator_lower",
        "[A, N] = A",
        (&commutator(a, number) - a).max_norm(),
        tol.threshold(scale * nscale),
    ));
    report.push(Check::new(
        "commutator_raise",
        "[A^+, N] = -A^+",
        (&commutator(&raise, number) + &raise).max_norm(),
        tol.threshold(scale * nscale),
    ));

    let mut number_action = 0.0f64;
    for k in 0..dim {
        let nv = number.matvec(&alg.fock[k]);
        let expect = alg.fock[k].scale(Scalar::new(k as f64, 0.0));
        number_action = number_action.max(nv.sub(&expect).max_norm());
    }
    report.push(Check::new(
        "number_action",
        "N|k> = k|k>",
        number_action,
        tol.threshold(nscale),
    ));

    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::approx_equal;

    #[test]
    fn degree_bounds_enforced() {
        assert_eq!(build_fermion(0).unwrap_err(), FermionError::DegreeOutOfRange(0));
        assert_eq!(build_fermion(17).unwrap_err(), FermionError::DegreeOutOfRange(17));
        assert!(build_fermion(16).is_ok());
    }

    #[test]
    fn n1_is_the_standard_fermion() {
        let alg = build_fermion(1).unwrap();
        let expected = Matrix::new(
            2,
            2,
            vec![Scalar::ZERO, Scalar::ONE, Scalar::ZERO, Scalar::ZERO],
        )
        .unwrap();
        assert_eq!(alg.a, expected);
        // Linear limit: A A^+ + A^+ A = 1.
        let raise = alg.raising();
        let sum = &(&alg.a * &raise) + &(&raise * &alg.a);
        assert_eq!(sum, Matrix::identity(2));
    }

    #[test]
    fn n2_matrix_and_fock_basis() {
        let alg = build_fermion(2).unwrap();
        let mut expected = Matrix::zeros(3, 3);
        expected[(0, 1)] = Scalar::ONE;
        expected[(1, 2)] = Scalar::ONE;
        assert_eq!(alg.a, expected);
        for k in 0..3 {
            assert_eq!(alg.fock[k], Vector::basis(3, k));
        }
    }

    #[test]
    fn number_operator_small_degrees() {
        // Oracle: direct matrix arithmetic of (A^+)^k A^k sums gives diag(0..n).
        for n in 1..=3usize {
            let alg = build_fermion(n).unwrap();
            let num = fermion_number_operator(&alg);
            let expected = Matrix::diag_real(&(0..=n).map(|k| k as f64).collect::<Vec<_>>());
            assert_eq!(num, expected, "n = {n}");
        }
    }

    #[test]
    fn verify_passes_exactly_for_all_degrees() {
        for n in 1..=8usize {
            let alg = build_fermion(n).unwrap();
            let report = verify_fermion(&alg, Tolerance::default());
            assert!(report.overall, "n = {n}: {:?}", report);
            // Shift-matrix realization is integer arithmetic: residuals are exact zeros.
            assert_eq!(report.worst_residual(), 0.0, "n = {n}");
        }
    }

    #[test]
    fn verify_flags_scaled_annihilator() {
        let mut alg = build_fermion(2).unwrap();
        alg.a = alg.a.scale(Scalar::new(2.0, 0.0));
        let report = verify_fermion(&alg, Tolerance::default());
        assert!(!report.overall);
        let check = report.check("anticommutation").unwrap();
        assert!(!check.pass);
        // 4 A A^+ + 16 (A^+)^2 A^2 - 1 has max entry 15 at the top Fock level.
        assert!((check.residual - 15.0).abs() < 1e-12);
    }

    #[test]
    fn lowering_returns_to_vacuum_exactly() {
        for n in 1..=8usize {
            let alg = build_fermion(n).unwrap();
            for k in 0..=n {
                let dropped = alg.a.pow(k).matvec(&alg.fock[k]);
                assert_eq!(dropped, alg.fock[0], "n = {n}, k = {k}");
            }
            assert_eq!(alg.a.pow(n + 1), Matrix::zeros(n + 1, n + 1));
        }
    }

    #[test]
    fn serializes_with_named_fields() {
        let alg = build_fermion(1).unwrap();
        let json = serde_json::to_string(&alg).unwrap();
        assert!(json.contains("\"A\""));
        assert!(json.contains("\"fock\""));
        let back: FermionAlgebra = serde_json::from_str(&json).unwrap();
        assert_eq!(back.a, alg.a);
        assert!(approx_equal(&back.number, &alg.number, Tolerance::default()).unwrap());
    }
}
