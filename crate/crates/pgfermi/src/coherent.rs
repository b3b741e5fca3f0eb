//! Ladder-operator coherent states with para-Grassmann eigenvalues, for both
//! Hermitian and pseudo-fermion systems.
//!
//! Four families exist per system: 'right'/'left' sign sequences, each either
//! psi-based (eigenstates of `a`, eigenvalue on the right/left) or phi-based
//! ("primed", eigenstates of `b^+`). Raw states are exact eigenstates; after
//! normalization by `sqrt(1 - z* z)` the right families remain eigenstates
//! while the left ones do not (the generator no longer commutes through the
//! even normalization factor once `z^2 z*` survives).
//!
//! Unprimed families live in the context graded by the system parity `P`;
//! primed families and all bras live in the dual context graded by `P^H`.
//! Bi-overcompleteness is checked entirely inside the symbolic engine: form
//! the kernel `|z>' <z|`, canonicalize, integrate, compare with the identity.

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::numerics::{invert, Matrix, NumericsError, Scalar, Vector};
use crate::paragrassmann::{Coeff, Kind, PGContext, PGElement, PGError};
use crate::pseudofermion::{PfError, PseudoFermionSystem};

#[derive(Debug, Error)]
pub enum CoherentError {
    #[error(transparent)]
    Pg(#[from] PGError),
    #[error(transparent)]
    Pf(#[from] PfError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Right,
    Left,
}

/// One coherent-state family: raw and normalized states plus the data needed
/// to re-check its eigenvalue equation.
#[derive(Debug, Clone, Serialize)]
pub struct CoherentFamily {
    pub n: usize,
    pub side: Side,
    pub primed: bool,
    pub raw: PGElement,
    pub normalized: PGElement,
    pub norm_factor: PGElement,
    /// The operator this family diagonalizes: `a` for unprimed, `b^+` for primed.
    pub ladder_op: Matrix,
}

/// Sign in front of `z^k`: `(-1)^k` for right states,
/// `(-1)^{floor((k+1)/2)}` for left states.
fn sign(side: Side, k: usize) -> f64 {
    let exponent = match side {
        Side::Right => k,
        Side::Left => (k + 1) / 2,
    };
    if exponent % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Context for the psi-side (unprimed) representation of a system.
pub fn system_context(sys: &PseudoFermionSystem) -> Result<Arc<PGContext>, CoherentError> {
    Ok(Arc::new(PGContext::new(sys.n(), sys.parity.clone())?))
}

/// Construct one of the four coherent-state families.
pub fn ladder_cs(
    sys: &PseudoFermionSystem,
    side: Side,
    primed: bool,
) -> Result<CoherentFamily, CoherentError> {
    let base = system_context(sys)?;
    let (ctx, vectors, ladder_op) = if primed {
        // phi-side objects are graded by the dual parity.
        (
            Arc::new(base.dual()),
            &sys.phi,
            sys.pair.b.adjoint(),
        )
    } else {
        (base, &sys.psi, sys.pair.a.clone())
    };

    let n = sys.n();
    let mut raw = PGElement::zero(&ctx, Kind::Vector);
    for (k, v) in vectors.iter().enumerate() {
        let coeff = Coeff::Vector(v.scale(Scalar::new(sign(side, k), 0.0)));
        raw = raw.add(&PGElement::from_term(&ctx, k, 0, coeff));
    }

    // 1 - z* z canonicalizes to 1 + z z*.
    let one = PGElement::one(&ctx);
    let zs_z = PGElement::zeta_star(&ctx).mul(&PGElement::zeta(&ctx))?;
    let norm_factor = one.sub(&zs_z).sqrt_even()?;
    let normalized = norm_factor.mul(&raw)?;

    Ok(CoherentFamily {
        n,
        side,
        primed,
        raw,
        normalized,
        norm_factor,
        ladder_op,
    })
}

/// Residual of the family's eigenvalue equation as a PG vector:
/// `X|state> - |state> z` for right states, `X|state> - z|state>` for left,
/// with `X = a` (unprimed) or `X = b^+` (primed).
pub fn eigen_residual(fam: &CoherentFamily, use_normalized: bool) -> Result<PGElement, CoherentError> {
    let state = if use_normalized { &fam.normalized } else { &fam.raw };
    let ctx = state.ctx().clone();
    let op = PGElement::from_operator(&ctx, fam.ladder_op.clone());
    let zeta = PGElement::zeta(&ctx);
    let applied = op.mul(state)?;
    let shifted = match fam.side {
        Side::Right => state.mul(&zeta)?,
        Side::Left => zeta.mul(state)?,
    };
    Ok(applied.sub(&shifted))
}

/// Kernel of the bi-overcompleteness relation before integration:
/// `|z; primed>_side <z; unprimed|_side` with both states normalized.
pub fn resolution_kernel(
    sys: &PseudoFermionSystem,
    side: Side,
) -> Result<PGElement, CoherentError> {
    let ket = ladder_cs(sys, side, true)?;
    let bra = ladder_cs(sys, side, false)?.normalized.adjoint();
    Ok(ket.normalized.mul(&bra)?)
}

/// Defect matrix of the resolution of identity
/// `integral dz* dz |z>'_side <z|_side - 1`; vanishes for valid systems.
pub fn resolution_defect(sys: &PseudoFermionSystem, side: Side) -> Result<Matrix, CoherentError> {
    let kernel = resolution_kernel(sys, side)?;
    let integrated = match kernel.integrate() {
        Coeff::Operator(m) => m,
        _ => unreachable!("kernel is operator-kind"),
    };
    Ok(&integrated - &Matrix::identity(sys.dim()))
}

/// Per-bidegree deviation of the normalized bi-pairing from 1.
#[derive(Debug, Clone, Serialize)]
pub struct BidegreeDeviation {
    pub k: usize,
    pub deviation: [f64; 2],
}

/// The normalized bi-pairing `<z; unprimed| z; primed>'` as a PG scalar,
/// with the total normalization `(1 - z* z)` collected as a left prefactor
/// of the raw pairing — the convention under which the claim "the pairing
/// equals one" can be examined bidegree by bidegree.
#[derive(Debug, Clone, Serialize)]
pub struct NormalizationReport {
    pub side: Side,
    pub pairing: PGElement,
    pub defect_by_bidegree: Vec<BidegreeDeviation>,
}

pub fn binormalization_report(
    sys: &PseudoFermionSystem,
    side: Side,
) -> Result<NormalizationReport, CoherentError> {
    let primed = ladder_cs(sys, side, true)?;
    let unprimed = ladder_cs(sys, side, false)?;
    let raw_pairing = unprimed.raw.adjoint().mul(&primed.raw)?;
    let total_norm = primed.norm_factor.mul(&primed.norm_factor)?;
    let pairing = total_norm.mul(&raw_pairing)?;

    let mut defects = Vec::with_capacity(sys.n() + 1);
    for k in 0..=sys.n() {
        let value = match pairing.coeff_or_zero(k, k) {
            Coeff::Scalar(s) => s,
            _ => unreachable!("pairing is scalar-kind"),
        };
        let expected = if k == 0 { Scalar::ONE } else { Scalar::ZERO };
        let deviation = value - expected;
        defects.push(BidegreeDeviation {
            k,
            deviation: [deviation.re, deviation.im],
        });
    }
    Ok(NormalizationReport {
        side,
        pairing,
        defect_by_bidegree: defects,
    })
}

/// Independently derive the integration weights by demanding that the
/// Hermitian right-family kernel resolve the identity: collect the diagonal
/// bidegree coefficients `D_k` of the kernel and solve
/// `sum_k w_k D_k = 1` as a linear system. The solution is unique whenever
/// the coefficient matrix is invertible, and must reproduce `g_k(n)`.
pub fn derive_weights_from_completeness(n: usize) -> Result<Vec<f64>, CoherentError> {
    let pair = crate::pseudofermion::hermitian_pair(n)?;
    let sys = crate::pseudofermion::build_system(&pair, crate::numerics::Tolerance::default())?;
    let kernel = resolution_kernel(&sys, Side::Right)?;

    let dim = n + 1;
    // Row j of the system: sum_k D_k[j][j] w_k = 1. Off-diagonal entries of
    // the D_k vanish for the Hermitian family; invertibility of the
    // coefficient matrix is what makes the solution unique.
    let mut coeffs = Matrix::zeros(dim, dim);
    for k in 0..dim {
        if let Coeff::Operator(d) = kernel.coeff_or_zero(k, k) {
            for j in 0..dim {
                coeffs[(j, k)] = d[(j, j)];
            }
        }
    }
    let inv = invert(&coeffs)?;
    let rhs = Vector::new(vec![Scalar::ONE; dim]);
    let solution = inv.matvec(&rhs);
    Ok((0..dim).map(|k| solution[k].re).collect())
}
