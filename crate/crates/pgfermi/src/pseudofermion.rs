//! Nonlinear n-pseudo-fermion systems: non-Hermitian pairs `(a, b)` with
//! `a b + b^n a^n = 1`, built into bi-orthonormal Fock systems.
//!
//! Given a candidate pair, the construction finds the `a`-vacuum and the
//! `b^+`-vacuum, ladders them into the bases `psi_k = b^k psi_0` and
//! `phi_k = (a^+)^k phi_0`, normalizes the vacuum pairing to one (the rest
//! of the diagonal pairings then telescope to one automatically), and
//! assembles the metric `eta = sum |phi_k><phi_k|`, its inverse
//! `sum |psi_k><psi_k|`, the number operator `N = sum_k b^k a^k`, and the
//! parity `P = sum_k (-1)^k |psi_k><phi_k|`.

use rand::Rng;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize};
use thiserror::Error;

use crate::fermion::build_fermion;
use crate::numerics::dd::{
    dd_dot, dd_matvec, dd_outer_acc, dd_vector, dd_vector_to_f64, DdMatrix,
};
use crate::numerics::{nullspace_1d, Matrix, NumericsError, Scalar, Tolerance, Vector};
use crate::report::{Check, VerificationReport};

pub const MAX_DEGREE: usize = 16;

#[derive(Debug, Error)]
pub enum PfError {
    #[error("invalid example parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("vacuum pairing <phi_0|psi_0> is singular (magnitude {magnitude:.3e})")]
    PairingSingular { magnitude: f64 },
    #[error("ladder fails to terminate: |b^(n+1) psi_0| = {residual:.3e}")]
    TerminationFailure { residual: f64 },
    #[error("bi-orthonormality defect {defect:.3e} exceeds tolerance")]
    BiorthogonalityFailure { defect: f64 },
}

/// A candidate annihilation/creation pair before verification.
#[derive(Debug, Clone, Serialize)]
pub struct CandidatePair {
    pub n: usize,
    pub a: Matrix,
    pub b: Matrix,
}

impl CandidatePair {
    pub fn new(a: Matrix, b: Matrix) -> Result<Self, PfError> {
        if !a.is_square() || !b.is_square() || a.rows() != b.rows() {
            return Err(PfError::InvalidParams(format!(
                "operators must be square with equal dimension, got {}x{} and {}x{}",
                a.rows(),
                a.cols(),
                b.rows(),
                b.cols()
            )));
        }
        let dim = a.rows();
        if dim < 2 || dim > MAX_DEGREE + 1 {
            return Err(PfError::InvalidParams(format!(
                "dimension {dim} outside 2..={}",
                MAX_DEGREE + 1
            )));
        }
        Ok(CandidatePair { n: dim - 1, a, b })
    }

    pub fn dim(&self) -> usize {
        self.n + 1
    }
}

impl<'de> Deserialize<'de> for CandidatePair {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            n: usize,
            a: Matrix,
            b: Matrix,
        }
        let raw = Raw::deserialize(deserializer)?;
        let pair = CandidatePair::new(raw.a, raw.b).map_err(D::Error::custom)?;
        if pair.n != raw.n {
            return Err(D::Error::custom(format!(
                "declared degree {} does not match operator dimension {}",
                raw.n,
                pair.dim()
            )));
        }
        Ok(pair)
    }
}

/// A fully built bi-orthonormal pseudo-fermion system.
#[derive(Debug, Clone)]
pub struct PseudoFermionSystem {
    pub pair: CandidatePair,
    pub psi: Vec<Vector>,
    pub phi: Vec<Vector>,
    pub eta: Matrix,
    pub eta_inv: Matrix,
    pub number: Matrix,
    pub parity: Matrix,
}

impl PseudoFermionSystem {
    pub fn n(&self) -> usize {
        self.pair.n
    }

    pub fn dim(&self) -> usize {
        self.pair.dim()
    }
}

impl Serialize for PseudoFermionSystem {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("PseudoFermionSystem", 6)?;
        st.serialize_field("n", &self.pair.n)?;
        st.serialize_field("a", &self.pair.a)?;
        st.serialize_field("b", &self.pair.b)?;
        st.serialize_field("psi", &self.psi)?;
        st.serialize_field("phi", &self.phi)?;
        st.serialize_field("eta", &self.eta)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for PseudoFermionSystem {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            n: usize,
            a: Matrix,
            b: Matrix,
            psi: Vec<Vector>,
            phi: Vec<Vector>,
            eta: Matrix,
        }
        let raw = Raw::deserialize(deserializer)?;
        let pair = CandidatePair::new(raw.a, raw.b).map_err(D::Error::custom)?;
        let dim = pair.dim();
        if raw.n != pair.n {
            return Err(D::Error::custom("degree does not match operator dimension"));
        }
        if raw.psi.len() != dim || raw.phi.len() != dim {
            return Err(D::Error::custom("basis must contain n+1 vectors"));
        }
        if raw.psi.iter().chain(raw.phi.iter()).any(|v| v.dim() != dim || !v.is_finite()) {
            return Err(D::Error::custom("basis vector dimension mismatch"));
        }
        if !raw.eta.is_square() || raw.eta.rows() != dim {
            return Err(D::Error::custom("metric dimension mismatch"));
        }
        let eta_inv = sum_of_dyads(&raw.psi, &raw.psi);
        let number = pf_number_operator(&pair);
        let parity = graded_dyads(&raw.psi, &raw.phi);
        Ok(PseudoFermionSystem {
            pair,
            psi: raw.psi,
            phi: raw.phi,
            eta: raw.eta,
            eta_inv,
            number,
            parity,
        })
    }
}

fn sum_of_dyads(left: &[Vector], right: &[Vector]) -> Matrix {
    let dim = left[0].dim();
    let mut acc = DdMatrix::zeros(dim, dim);
    for (u, v) in left.iter().zip(right) {
        dd_outer_acc(&mut acc, &dd_vector(u), &dd_vector(v), 1.0);
    }
    acc.to_matrix()
}

fn graded_dyads(psi: &[Vector], phi: &[Vector]) -> Matrix {
    let dim = psi[0].dim();
    let mut acc = DdMatrix::zeros(dim, dim);
    for (k, (u, v)) in psi.iter().zip(phi).enumerate() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        dd_outer_acc(&mut acc, &dd_vector(u), &dd_vector(v), sign);
    }
    acc.to_matrix()
}

/// Residuals for the defining relation `a b + b^n a^n = 1` and nilpotency of
/// both operators.
///
/// The product chains are accumulated in double-double so the reported
/// residual is the true residual of the given matrices, not an artifact of
/// the chain's own roundoff.
pub fn verify_pf_relation(pair: &CandidatePair, tol: Tolerance) -> VerificationReport {
    let n = pair.n;
    let dim = pair.dim();
    let ab = DdMatrix::from_matrix(&pair.a).mul(&DdMatrix::from_matrix(&pair.b));
    let bnan = DdMatrix::power_of(&pair.b, n).mul(&DdMatrix::power_of(&pair.a, n));
    let relation = ab.add(&bnan).sub(&DdMatrix::identity(dim));
    let scale = ab.max_norm().max(bnan.max_norm()).max(1.0);

    let mut report = VerificationReport::empty();
    report.push(Check::new(
        "relation",
        "a b + b^n a^n = 1",
        relation.max_norm(),
        tol.threshold(scale),
    ));
    report.push(Check::new(
        "nilpotency_a",
        "a^{n+1} = 0",
        DdMatrix::power_of(&pair.a, n + 1).max_norm(),
        tol.threshold(pair.a.max_norm().powi(n as i32 + 1).max(1.0)),
    ));
    report.push(Check::new(
        "nilpotency_b",
        "b^{n+1} = 0",
        DdMatrix::power_of(&pair.b, n + 1).max_norm(),
        tol.threshold(pair.b.max_norm().powi(n as i32 + 1).max(1.0)),
    ));
    report
}

/// Whether the pair degenerates to the Hermitian case `b = a^+`.
pub fn is_hermitian_pair(pair: &CandidatePair, tol: Tolerance) -> bool {
    let defect = (&pair.b - &pair.a.adjoint()).max_norm();
    defect <= tol.threshold(pair.a.max_norm().max(1.0))
}

/// The `a`-vacuum and `b^+`-vacuum, scaled so `|psi_0| = 1` and
/// `<phi_0|psi_0> = 1`.
pub fn find_vacua(pair: &CandidatePair, tol: Tolerance) -> Result<(Vector, Vector), PfError> {
    let psi0 = nullspace_1d(&pair.a, tol)?;
    let phi0_raw = nullspace_1d(&pair.b.adjoint(), tol)?;
    let pairing = phi0_raw.dot(&psi0);
    if pairing.norm() <= tol.threshold(1.0) {
        return Err(PfError::PairingSingular {
            magnitude: pairing.norm(),
        });
    }
    let phi0 = phi0_raw.scale(Scalar::ONE / pairing.conj());
    Ok((psi0, phi0))
}

/// Build the full bi-orthonormal system from a candidate pair.
pub fn build_system(pair: &CandidatePair, tol: Tolerance) -> Result<PseudoFermionSystem, PfError> {
    let (psi0, phi0) = find_vacua(pair, tol)?;
    build_system_from_vacua(pair, psi0, phi0, tol)
}

/// Build the system from caller-supplied vacua (which must satisfy
/// `a psi_0 = 0`, `b^+ phi_0 = 0`, `<phi_0|psi_0> = 1`).
pub fn build_system_from_vacua(
    pair: &CandidatePair,
    psi0: Vector,
    phi0: Vector,
    tol: Tolerance,
) -> Result<PseudoFermionSystem, PfError> {
    let n = pair.n;
    let dim = pair.dim();

    // Ladder in double-double: repeated application of b (and a^H) loses
    // digits to cancellation for badly scaled pairs, and those lost digits
    // would otherwise surface as spurious bi-orthogonality defects.
    let a_dag = pair.a.adjoint();
    let mut psi_dd = vec![dd_vector(&psi0)];
    let mut phi_dd = vec![dd_vector(&phi0)];
    for k in 0..n {
        let next_psi = dd_matvec(&pair.b, &psi_dd[k]);
        let next_phi = dd_matvec(&a_dag, &phi_dd[k]);
        psi_dd.push(next_psi);
        phi_dd.push(next_phi);
    }
    let psi: Vec<Vector> = psi_dd.iter().map(|v| dd_vector_to_f64(v)).collect();
    let phi: Vec<Vector> = phi_dd.iter().map(|v| dd_vector_to_f64(v)).collect();
    debug_assert_eq!(psi.len(), dim);

    // b^{n+1} psi_0 = 0 is forced by the relation; a violation means the
    // caller's pair never satisfied it.
    let overflow = dd_vector_to_f64(&dd_matvec(&pair.b, &psi_dd[n]));
    let b_scale = pair.b.max_norm().max(1.0).powi(n as i32 + 1);
    if overflow.norm() > tol.threshold(b_scale) {
        return Err(PfError::TerminationFailure {
            residual: overflow.norm(),
        });
    }

    // The pairing <phi_j|psi_k> cancels terms as large as |phi_j||psi_k|,
    // so that product is the scale roundoff is measured against.
    let mut defect = 0.0f64;
    let mut scale = 1.0f64;
    for (j, ph) in phi.iter().enumerate() {
        for (k, ps) in psi.iter().enumerate() {
            let pairing = dd_dot(ph, ps);
            scale = scale.max(ph.norm() * ps.norm());
            let expected = if j == k { Scalar::ONE } else { Scalar::ZERO };
            defect = defect.max((pairing - expected).norm());
        }
    }
    if defect > tol.threshold(scale) {
        return Err(PfError::BiorthogonalityFailure { defect });
    }

    let eta = sum_of_dyads(&phi, &phi);
    let eta_inv = sum_of_dyads(&psi, &psi);
    let number = pf_number_operator(pair);
    let parity = graded_dyads(&psi, &phi);

    Ok(PseudoFermionSystem {
        pair: pair.clone(),
        psi,
        phi,
        eta,
        eta_inv,
        number,
        parity,
    })
}

/// Non-Hermitian number operator `N = sum_{k=1}^{n} b^k a^k`.
pub fn pf_number_operator(pair: &CandidatePair) -> Matrix {
    let dim = pair.dim();
    let mut acc = Matrix::zeros(dim, dim);
    for k in 1..=pair.n {
        acc = &acc + &(&pair.b.pow(k) * &pair.a.pow(k));
    }
    acc
}

/// Max-entry norm of `sum_k |psi_k><phi_k| - 1`.
pub fn completeness_defect(sys: &PseudoFermionSystem) -> f64 {
    let dim = sys.dim();
    let mut acc = DdMatrix::zeros(dim, dim);
    for (u, v) in sys.psi.iter().zip(&sys.phi) {
        dd_outer_acc(&mut acc, &dd_vector(u), &dd_vector(v), 1.0);
    }
    acc.sub(&DdMatrix::identity(dim)).max_norm()
}

/// Max-entry norm of `b - eta^{-1} a^+ eta`.
pub fn pseudo_adjoint_defect(sys: &PseudoFermionSystem) -> f64 {
    pseudo_adjoint_defect_parts(&sys.pair.a, &sys.pair.b, &sys.eta, &sys.eta_inv)
}

/// Same defect from explicit parts, usable as a control on mismatched pairs.
/// The triple product is accumulated in double-double; its intermediate
/// entries reach |eta||a||eta^{-1}| before cancelling back to |b|.
pub fn pseudo_adjoint_defect_parts(a: &Matrix, b: &Matrix, eta: &Matrix, eta_inv: &Matrix) -> f64 {
    let pseudo = DdMatrix::from_matrix(eta_inv)
        .mul(&DdMatrix::adjoint_of(a))
        .mul(&DdMatrix::from_matrix(eta));
    DdMatrix::from_matrix(b).sub(&pseudo).max_norm()
}

// ── Example families ────────────────────────────────────────────────

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExampleKind {
    Ex1,
    Ex2,
    Ex3,
}

/// Parameters for the three example families. `p` rescales the vacuum in
/// the source construction; the built system fixes that gauge by
/// normalizing the vacuum pairing, so `p` never enters the operators.
#[derive(Debug, Clone, Serialize)]
pub struct ExampleParams {
    pub kind: ExampleKind,
    pub alpha: Scalar,
    pub beta: Scalar,
    pub gamma: Scalar,
    pub delta: Scalar,
    pub alphas: Vec<Scalar>,
    pub p: Scalar,
}

impl ExampleParams {
    pub fn ex1(alpha: Scalar, beta: Scalar) -> Self {
        ExampleParams {
            kind: ExampleKind::Ex1,
            alpha,
            beta,
            ..Self::unit(ExampleKind::Ex1)
        }
    }

    pub fn ex2(alpha: Scalar, beta: Scalar, gamma: Scalar, delta: Scalar) -> Self {
        ExampleParams {
            kind: ExampleKind::Ex2,
            alpha,
            beta,
            gamma,
            delta,
            ..Self::unit(ExampleKind::Ex2)
        }
    }

    pub fn ex3(alphas: Vec<Scalar>) -> Self {
        ExampleParams {
            alphas,
            ..Self::unit(ExampleKind::Ex3)
        }
    }

    /// All parameters set to one.
    pub fn unit(kind: ExampleKind) -> Self {
        ExampleParams {
            kind,
            alpha: Scalar::ONE,
            beta: Scalar::ONE,
            gamma: Scalar::ONE,
            delta: Scalar::ONE,
            alphas: vec![Scalar::ONE; 2],
            p: Scalar::ONE,
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Num {
    Real(f64),
    Pair([f64; 2]),
}

impl Num {
    fn to_scalar(&self) -> Result<Scalar, PfError> {
        let z = match *self {
            Num::Real(re) => Scalar::new(re, 0.0),
            Num::Pair([re, im]) => Scalar::new(re, im),
        };
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(PfError::InvalidParams("non-finite parameter".into()));
        }
        Ok(z)
    }
}

/// A partial parameter object: only the given fields are overridden when the
/// patch is applied. Scalars accept a plain number or an `[re, im]` pair.
#[derive(Default)]
pub struct ParamsPatch {
    pub kind: Option<ExampleKind>,
    pub alpha: Option<Scalar>,
    pub beta: Option<Scalar>,
    pub gamma: Option<Scalar>,
    pub delta: Option<Scalar>,
    pub alphas: Option<Vec<Scalar>>,
    pub p: Option<Scalar>,
}

impl ParamsPatch {
    pub fn parse(json: &str) -> Result<Self, PfError> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            kind: Option<ExampleKind>,
            alpha: Option<Num>,
            beta: Option<Num>,
            gamma: Option<Num>,
            delta: Option<Num>,
            alphas: Option<Vec<Num>>,
            p: Option<Num>,
        }
        let raw: Raw =
            serde_json::from_str(json).map_err(|e| PfError::InvalidParams(e.to_string()))?;
        let convert = |v: Option<Num>| v.map(|n| n.to_scalar()).transpose();
        Ok(ParamsPatch {
            kind: raw.kind,
            alpha: convert(raw.alpha)?,
            beta: convert(raw.beta)?,
            gamma: convert(raw.gamma)?,
            delta: convert(raw.delta)?,
            alphas: raw
                .alphas
                .map(|list| list.iter().map(Num::to_scalar).collect::<Result<_, _>>())
                .transpose()?,
            p: convert(raw.p)?,
        })
    }

    pub fn apply(&self, params: &mut ExampleParams) {
        if let Some(v) = self.alpha {
            params.alpha = v;
        }
        if let Some(v) = self.beta {
            params.beta = v;
        }
        if let Some(v) = self.gamma {
            params.gamma = v;
        }
        if let Some(v) = self.delta {
            params.delta = v;
        }
        if let Some(v) = self.p {
            params.p = v;
        }
        if let Some(list) = &self.alphas {
            params.alphas = list.clone();
        }
    }
}

/// Parse a partial parameter object (`{"alpha": 1, "beta": [0, 2], ...}`),
/// filling unspecified fields with ones. `n` sizes the default `alphas`
/// for ex3.
pub fn parse_params_json(json: &str, kind: ExampleKind, n: usize) -> Result<ExampleParams, PfError> {
    let patch = ParamsPatch::parse(json)?;
    if let Some(declared) = patch.kind {
        if declared != kind {
            return Err(PfError::InvalidParams(format!(
                "params declare kind {declared:?} but {kind:?} was requested"
            )));
        }
    }
    let mut params = ExampleParams::unit(kind);
    params.alphas = vec![Scalar::ONE; n.max(2)];
    patch.apply(&mut params);
    Ok(params)
}

fn require_nonzero(name: &str, z: Scalar) -> Result<(), PfError> {
    if z.norm() == 0.0 {
        return Err(PfError::InvalidParams(format!("{name} must be nonzero")));
    }
    Ok(())
}

/// Construct a candidate pair from one of the example families.
///
/// ex1 (n = 2): `a = alpha A^+ + beta (A^+)^2 A`,
/// `b = A/(alpha+beta) + beta A^2 A^+ / (alpha (alpha+beta))`.
/// ex2 (n = 3): the explicit 4x4 pair. ex3 (any n >= 2): superdiagonal
/// `alpha_i` against subdiagonal `1/alpha_i`.
pub fn example_family(params: &ExampleParams) -> Result<CandidatePair, PfError> {
    require_nonzero("p", params.p)?;
    match params.kind {
        ExampleKind::Ex1 => {
            require_nonzero("alpha", params.alpha)?;
            require_nonzero("beta", params.beta)?;
            let total = params.alpha + params.beta;
            if total.norm() == 0.0 {
                return Err(PfError::InvalidParams("alpha + beta must be nonzero".into()));
            }
            let alg = build_fermion(2).expect("degree 2 in range");
            let upper = alg.a.clone();
            let raise = alg.raising();
            let a = &raise.scale(params.alpha) + &(&raise.pow(2) * &upper).scale(params.beta);
            let b = &upper.scale(Scalar::ONE / total)
                + &(&upper.pow(2) * &raise).scale(params.beta / (params.alpha * total));
            CandidatePair::new(a, b)
        }
        ExampleKind::Ex2 => {
            let (al, be, ga, de) = (params.alpha, params.beta, params.gamma, params.delta);
            for (name, z) in [("alpha", al), ("beta", be), ("gamma", ga), ("delta", de)] {
                require_nonzero(name, z)?;
            }
            let zero = Scalar::ZERO;
            let a = Matrix::new(
                4,
                4,
                vec![
                    zero, al, zero, zero,
                    zero, zero, zero, zero,
                    de * ga, zero, be / de, -be / (de * de),
                    zero, zero, be, -be / de,
                ],
            )
            .map_err(PfError::from)?;
            let b = Matrix::new(
                4,
                4,
                vec![
                    zero, zero, Scalar::ONE / (ga * de), -Scalar::ONE / (ga * de * de),
                    Scalar::ONE / al, zero, zero, zero,
                    zero, zero, zero, Scalar::ONE / be,
                    zero, zero, zero, zero,
                ],
            )
            .map_err(PfError::from)?;
            CandidatePair::new(a, b)
        }
        ExampleKind::Ex3 => {
            let n = params.alphas.len();
            if n < 2 {
                return Err(PfError::InvalidParams(
                    "ex3 needs at least two superdiagonal entries".into(),
                ));
            }
            if n > MAX_DEGREE {
                return Err(PfError::InvalidParams(format!("ex3 degree {n} exceeds {MAX_DEGREE}")));
            }
            for (i, &z) in params.alphas.iter().enumerate() {
                require_nonzero(&format!("alphas[{i}]"), z)?;
            }
            let dim = n + 1;
            let mut a = Matrix::zeros(dim, dim);
            let mut b = Matrix::zeros(dim, dim);
            for (i, &alpha_i) in params.alphas.iter().enumerate() {
                a[(i, i + 1)] = alpha_i;
                b[(i + 1, i)] = Scalar::ONE / alpha_i;
            }
            CandidatePair::new(a, b)
        }
    }
}

/// The Hermitian degenerate pair `(A, A^+)` at degree n.
pub fn hermitian_pair(n: usize) -> Result<CandidatePair, PfError> {
    let alg = build_fermion(n).map_err(|e| PfError::InvalidParams(e.to_string()))?;
    CandidatePair::new(alg.a.clone(), alg.raising())
}

/// Largest operator entry magnitude a sampled pair may have. Entries beyond
/// this make the rounded matrices themselves violate the defining relation
/// by more than the sweep tolerances, independent of any computation.
pub const SAMPLE_ENTRY_CAP: f64 = 200.0;

/// Random parameters with magnitudes in [0.1, 10] and uniform phases,
/// redrawn until the resulting pair is numerically well-posed: for ex1
/// `|alpha + beta| >= 0.5` (the `1/(alpha(alpha+beta))` entries), and for
/// every family operator entries at most `SAMPLE_ENTRY_CAP`. The guards
/// exclude the near-singular corners from sweeps, not from the API.
pub fn sample_params(kind: ExampleKind, n: usize, rng: &mut impl Rng) -> ExampleParams {
    let draw = |rng: &mut dyn rand::RngCore| -> Scalar {
        let magnitude = rng.gen_range(0.1..=10.0);
        let phase = rng.gen_range(0.0..std::f64::consts::TAU);
        Scalar::from_polar(magnitude, phase)
    };
    loop {
        let params = match kind {
            ExampleKind::Ex1 => {
                let params = ExampleParams::ex1(draw(rng), draw(rng));
                if (params.alpha + params.beta).norm() < 0.5 {
                    continue;
                }
                params
            }
            ExampleKind::Ex2 => ExampleParams::ex2(draw(rng), draw(rng), draw(rng), draw(rng)),
            ExampleKind::Ex3 => ExampleParams::ex3((0..n.max(2)).map(|_| draw(rng)).collect()),
        };
        let pair = example_family(&params).expect("guarded draws are valid");
        if pair.a.max_norm().max(pair.b.max_norm()) <= SAMPLE_ENTRY_CAP {
            return params;
        }
    }
}

/// Eigenvalues of the number operator sorted by real part; `{0, 1, ..., n}`
/// for every valid system.
pub fn number_spectrum(sys: &PseudoFermionSystem) -> Vec<Scalar> {
    let mut eigs = crate::numerics::eigenvalues(&sys.number);
    eigs.sort_by(|x, y| x.re.partial_cmp(&y.re).unwrap());
    eigs
}
