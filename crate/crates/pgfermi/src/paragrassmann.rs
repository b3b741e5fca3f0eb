//! Graded symbolic engine for a single pair of order-(n+1) nilpotent
//! generators `z`, `z*` (written zeta in the math) with
//! `z z* + z* z = 0` and `z^{n+1} = z*^{n+1} = 0`.
//!
//! Elements are kept in canonical form `sum_{i,k} z^i z*^k . C_{ik}` with all
//! generators to the left of the coefficient and all `z` powers to the left
//! of `z*` powers. Moving one generator past a coefficient conjugates the
//! coefficient by the context's parity operator; reordering `z*^a z^b` into
//! `z^b z*^a` contributes `(-1)^{ab}`. Those two rules plus nilpotency are
//! the entire multiplication law.
//!
//! The integration functional maps `z^i z*^k . C` to `delta_{ik} g_k(n) C`,
//! with integer weights `g_k(n)` that reduce to the Berezin rule `(0, 1)`
//! at n = 1.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::de::Error as _;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::numerics::{Matrix, Scalar, Vector};

/// Largest supported degree, matching the fermion module.
pub const MAX_DEGREE: usize = 16;

#[derive(Debug, Error, PartialEq)]
pub enum PGError {
    #[error("degree out of range: n = {0} not in 1..={MAX_DEGREE}")]
    DegreeOutOfRange(usize),
    #[error("kind mismatch: cannot multiply {left:?} by {right:?}")]
    KindMismatch { left: Kind, right: Kind },
    #[error("context mismatch: operands live in different para-Grassmann contexts")]
    ContextMismatch,
    #[error("parity operator does not square to the identity (residual {0:.3e})")]
    InvalidParity(f64),
    #[error("square root requires a unit leading term at bidegree (0,0)")]
    NotUnitLeading,
    #[error("coefficient shape does not match context dimension {expected}")]
    CoefficientShape { expected: usize },
}

/// Integration weights `g_k(n) = 1 + sum_{i=1}^{n-k} (-1)^{k i + i(i+1)/2}`.
pub fn g_coefficients(n: usize) -> Result<Vec<i64>, PGError> {
    if n < 1 || n > MAX_DEGREE {
        return Err(PGError::DegreeOutOfRange(n));
    }
    Ok((0..=n)
        .map(|k| {
            let mut g = 1i64;
            for i in 1..=(n - k) {
                let exponent = k * i + i * (i + 1) / 2;
                g += if exponent % 2 == 0 { 1 } else { -1 };
            }
            g
        })
        .collect())
}

/// Shared context: degree, parity (grading) operator of the representation
/// the coefficients live in, and the integration weights.
#[derive(Debug, Clone)]
pub struct PGContext {
    n: usize,
    parity: Matrix,
    g: Vec<i64>,
}

impl PGContext {
    /// Context over an arbitrary representation with the given grading
    /// operator; `parity * parity` must be the identity.
    pub fn new(n: usize, parity: Matrix) -> Result<Self, PGError> {
        let g = g_coefficients(n)?;
        let dim = n + 1;
        if !parity.is_square() || parity.rows() != dim {
            return Err(PGError::CoefficientShape { expected: dim });
        }
        let sq = &parity * &parity;
        let residual = (&sq - &Matrix::identity(dim)).max_norm();
        let scale = 1.0 + parity.max_norm() * parity.max_norm();
        if residual > 1e-8 * scale {
            return Err(PGError::InvalidParity(residual));
        }
        Ok(PGContext { n, parity, g })
    }

    /// Standard Fock-space context with `P = diag(+1, -1, +1, ...)`.
    pub fn hermitian(n: usize) -> Result<Self, PGError> {
        let parity = Matrix::diag_real(
            &(0..=n).map(|k| if k % 2 == 0 { 1.0 } else { -1.0 }).collect::<Vec<_>>(),
        );
        Self::new(n, parity)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.n + 1
    }

    pub fn parity(&self) -> &Matrix {
        &self.parity
    }

    pub fn weights(&self) -> &[i64] {
        &self.g
    }

    /// Context for adjoint-side coefficients: same degree, parity `P^H`.
    ///
    /// Kets built on one side of a bi-orthogonal system are graded by `P`;
    /// their adjoints (and any operator made of adjoint-side ladder
    /// operators) are graded by `P^H`. Taking the dual twice returns the
    /// original context.
    pub fn dual(&self) -> PGContext {
        PGContext {
            n: self.n,
            parity: self.parity.adjoint(),
            g: self.g.clone(),
        }
    }

    /// The transformation a coefficient undergoes when one generator moves
    /// past it: scalars are untouched, vectors map to `P v`, covectors to
    /// `w P`, operators to `P M P`.
    pub fn parity_conjugate(&self, coeff: &Coeff) -> Coeff {
        match coeff {
            Coeff::Scalar(s) => Coeff::Scalar(*s),
            Coeff::Vector(v) => Coeff::Vector(self.parity.matvec(v)),
            Coeff::Covector(w) => Coeff::Covector(w.row_times(&self.parity)),
            Coeff::Operator(m) => Coeff::Operator(&(&self.parity * m) * &self.parity),
        }
    }
}

impl PartialEq for PGContext {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.parity == other.parity
    }
}

/// What a coefficient is: plain number, ket, bra, or operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Scalar,
    Vector,
    Covector,
    Operator,
}

/// Coefficient standing to the right of a monomial `z^i z*^k`.
///
/// Covectors store the literal row entries (already conjugated when the bra
/// came from a ket), so covector-vector contraction is a plain sum of
/// products.
#[derive(Debug, Clone, PartialEq)]
pub enum Coeff {
    Scalar(Scalar),
    Vector(Vector),
    Covector(Vector),
    Operator(Matrix),
}

impl Coeff {
    pub fn kind(&self) -> Kind {
        match self {
            Coeff::Scalar(_) => Kind::Scalar,
            Coeff::Vector(_) => Kind::Vector,
            Coeff::Covector(_) => Kind::Covector,
            Coeff::Operator(_) => Kind::Operator,
        }
    }

    pub fn zero(kind: Kind, dim: usize) -> Coeff {
        match kind {
            Kind::Scalar => Coeff::Scalar(Scalar::ZERO),
            Kind::Vector => Coeff::Vector(Vector::zeros(dim)),
            Kind::Covector => Coeff::Covector(Vector::zeros(dim)),
            Kind::Operator => Coeff::Operator(Matrix::zeros(dim, dim)),
        }
    }

    pub fn max_norm(&self) -> f64 {
        match self {
            Coeff::Scalar(s) => s.norm(),
            Coeff::Vector(v) | Coeff::Covector(v) => v.max_norm(),
            Coeff::Operator(m) => m.max_norm(),
        }
    }

    pub fn scale(&self, z: Scalar) -> Coeff {
        match self {
            Coeff::Scalar(s) => Coeff::Scalar(s * z),
            Coeff::Vector(v) => Coeff::Vector(v.scale(z)),
            Coeff::Covector(w) => Coeff::Covector(w.scale(z)),
            Coeff::Operator(m) => Coeff::Operator(m.scale(z)),
        }
    }

    fn add(&self, other: &Coeff) -> Coeff {
        match (self, other) {
            (Coeff::Scalar(a), Coeff::Scalar(b)) => Coeff::Scalar(a + b),
            (Coeff::Vector(a), Coeff::Vector(b)) => Coeff::Vector(a.add(b)),
            (Coeff::Covector(a), Coeff::Covector(b)) => Coeff::Covector(a.add(b)),
            (Coeff::Operator(a), Coeff::Operator(b)) => Coeff::Operator(a + b),
            _ => panic!("coefficient kind mismatch in add"),
        }
    }

    fn adjoint(&self) -> Coeff {
        match self {
            Coeff::Scalar(s) => Coeff::Scalar(s.conj()),
            Coeff::Vector(v) => Coeff::Covector(v.conj()),
            Coeff::Covector(w) => Coeff::Vector(w.conj()),
            Coeff::Operator(m) => Coeff::Operator(m.adjoint()),
        }
    }

    fn dims_match(&self, dim: usize) -> bool {
        match self {
            Coeff::Scalar(_) => true,
            Coeff::Vector(v) | Coeff::Covector(v) => v.dim() == dim,
            Coeff::Operator(m) => m.rows() == dim && m.cols() == dim,
        }
    }
}

fn kind_mul(left: Kind, right: Kind) -> Option<Kind> {
    use Kind::*;
    match (left, right) {
        (Scalar, k) | (k, Scalar) => Some(k),
        (Operator, Operator) => Some(Operator),
        (Operator, Vector) => Some(Vector),
        (Covector, Operator) => Some(Covector),
        (Covector, Vector) => Some(Scalar),
        (Vector, Covector) => Some(Operator),
        _ => None,
    }
}

fn coeff_mul(left: &Coeff, right: &Coeff) -> Coeff {
    match (left, right) {
        (Coeff::Scalar(s), r) => r.scale(*s),
        (l, Coeff::Scalar(s)) => l.scale(*s),
        (Coeff::Operator(m), Coeff::Vector(v)) => Coeff::Vector(m.matvec(v)),
        (Coeff::Covector(w), Coeff::Operator(m)) => Coeff::Covector(w.row_times(m)),
        (Coeff::Covector(w), Coeff::Vector(v)) => {
            let mut acc = Scalar::ZERO;
            for i in 0..w.dim() {
                acc += w[i] * v[i];
            }
            Coeff::Scalar(acc)
        }
        (Coeff::Vector(u), Coeff::Covector(w)) => {
            Coeff::Operator(Matrix::from_fn(u.dim(), w.dim(), |i, j| u[i] * w[j]))
        }
        (Coeff::Operator(a), Coeff::Operator(b)) => Coeff::Operator(a * b),
        _ => panic!("coefficient kinds not multiplicable (checked by kind_mul)"),
    }
}

/// Para-Grassmann-valued object in canonical form.
#[derive(Debug, Clone, PartialEq)]
pub struct PGElement {
    ctx: Arc<PGContext>,
    kind: Kind,
    terms: BTreeMap<(usize, usize), Coeff>,
}

impl PGElement {
    pub fn zero(ctx: &Arc<PGContext>, kind: Kind) -> Self {
        PGElement {
            ctx: ctx.clone(),
            kind,
            terms: BTreeMap::new(),
        }
    }

    /// The scalar unit 1.
    pub fn one(ctx: &Arc<PGContext>) -> Self {
        Self::from_term(ctx, 0, 0, Coeff::Scalar(Scalar::ONE))
    }

    /// The generator `z` as a scalar-kind element.
    pub fn zeta(ctx: &Arc<PGContext>) -> Self {
        Self::from_term(ctx, 1, 0, Coeff::Scalar(Scalar::ONE))
    }

    /// The conjugate generator `z*`.
    pub fn zeta_star(ctx: &Arc<PGContext>) -> Self {
        Self::from_term(ctx, 0, 1, Coeff::Scalar(Scalar::ONE))
    }

    pub fn from_term(ctx: &Arc<PGContext>, i: usize, k: usize, coeff: Coeff) -> Self {
        assert!(i <= ctx.n && k <= ctx.n, "bidegree exceeds degree n");
        assert!(coeff.dims_match(ctx.dim()), "coefficient dimension mismatch");
        let mut terms = BTreeMap::new();
        if coeff.max_norm() != 0.0 {
            terms.insert((i, k), coeff.clone());
        }
        let kind = coeff.kind();
        PGElement {
            ctx: ctx.clone(),
            kind,
            terms,
        }
    }

    pub fn from_scalar(ctx: &Arc<PGContext>, z: Scalar) -> Self {
        Self::from_term(ctx, 0, 0, Coeff::Scalar(z))
    }

    pub fn from_vector(ctx: &Arc<PGContext>, v: Vector) -> Self {
        Self::from_term(ctx, 0, 0, Coeff::Vector(v))
    }

    pub fn from_operator(ctx: &Arc<PGContext>, m: Matrix) -> Self {
        Self::from_term(ctx, 0, 0, Coeff::Operator(m))
    }

    pub fn ctx(&self) -> &Arc<PGContext> {
        &self.ctx
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn coeff(&self, i: usize, k: usize) -> Option<&Coeff> {
        self.terms.get(&(i, k))
    }

    /// Coefficient at a bidegree, materializing an explicit zero if absent.
    pub fn coeff_or_zero(&self, i: usize, k: usize) -> Coeff {
        self.terms
            .get(&(i, k))
            .cloned()
            .unwrap_or_else(|| Coeff::zero(self.kind, self.ctx.dim()))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(usize, usize), &Coeff)> {
        self.terms.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest coefficient norm across all bidegrees.
    pub fn max_norm(&self) -> f64 {
        self.terms.values().map(Coeff::max_norm).fold(0.0, f64::max)
    }

    fn insert_acc(&mut self, key: (usize, usize), coeff: Coeff) {
        let merged = match self.terms.remove(&key) {
            Some(existing) => existing.add(&coeff),
            None => coeff,
        };
        if merged.max_norm() != 0.0 {
            self.terms.insert(key, merged);
        }
    }

    pub fn add(&self, other: &PGElement) -> PGElement {
        assert_eq!(self.kind, other.kind, "kind mismatch in add");
        assert!(*self.ctx == *other.ctx, "context mismatch in add");
        let mut out = self.clone();
        for (&key, coeff) in &other.terms {
            out.insert_acc(key, coeff.clone());
        }
        out
    }

    pub fn neg(&self) -> PGElement {
        self.scale(-Scalar::ONE)
    }

    pub fn sub(&self, other: &PGElement) -> PGElement {
        self.add(&other.neg())
    }

    pub fn scale(&self, z: Scalar) -> PGElement {
        let mut out = PGElement::zero(&self.ctx, self.kind);
        for (&key, coeff) in &self.terms {
            out.insert_acc(key, coeff.scale(z));
        }
        out
    }

    /// Canonical-form product.
    ///
    /// Per term pair: move the left coefficient past the right monomial's
    /// generators (one parity conjugation per generator), reorder
    /// `z*^{k1} z^{i2}` with sign `(-1)^{k1 i2}`, and drop anything whose
    /// power exceeds n.
    pub fn mul(&self, other: &PGElement) -> Result<PGElement, PGError> {
        if *self.ctx != *other.ctx {
            return Err(PGError::ContextMismatch);
        }
        let kind = kind_mul(self.kind, other.kind).ok_or(PGError::KindMismatch {
            left: self.kind,
            right: other.kind,
        })?;
        let n = self.ctx.n;
        let mut out = PGElement::zero(&self.ctx, kind);
        for (&(i1, k1), c1) in &self.terms {
            for (&(i2, k2), c2) in &other.terms {
                if i1 + i2 > n || k1 + k2 > n {
                    continue;
                }
                let moved = if (i2 + k2) % 2 == 1 {
                    self.ctx.parity_conjugate(c1)
                } else {
                    c1.clone()
                };
                let sign = if (k1 * i2) % 2 == 1 { -Scalar::ONE } else { Scalar::ONE };
                let product = coeff_mul(&moved, c2).scale(sign);
                out.insert_acc((i1 + i2, k1 + k2), product);
            }
        }
        Ok(out)
    }

    /// Adjoint: `(z^i z*^k C)^+ = C^+ z^k z*^i`, re-canonicalized in the dual
    /// context. Involutive; kets and bras trade places.
    pub fn adjoint(&self) -> PGElement {
        let dual = Arc::new(self.ctx.dual());
        let kind = match self.kind {
            Kind::Scalar => Kind::Scalar,
            Kind::Vector => Kind::Covector,
            Kind::Covector => Kind::Vector,
            Kind::Operator => Kind::Operator,
        };
        let mut out = PGElement::zero(&dual, kind);
        for (&(i, k), coeff) in &self.terms {
            let mut adj = coeff.adjoint();
            if (i + k) % 2 == 1 {
                adj = dual.parity_conjugate(&adj);
            }
            out.insert_acc((k, i), adj);
        }
        out
    }

    /// Weighted Berezin integral: `sum_k g_k(n) . coeff[(k, k)]`.
    pub fn integrate(&self) -> Coeff {
        let mut acc = Coeff::zero(self.kind, self.ctx.dim());
        for k in 0..=self.ctx.n {
            if let Some(coeff) = self.terms.get(&(k, k)) {
                let weight = Scalar::new(self.ctx.g[k] as f64, 0.0);
                acc = acc.add(&coeff.scale(weight));
            }
        }
        acc
    }

    /// Square root of an even scalar element `1 + u` (every term at equal
    /// bidegree), via the binomial series; nilpotency terminates it exactly.
    pub fn sqrt_even(&self) -> Result<PGElement, PGError> {
        if self.kind != Kind::Scalar {
            return Err(PGError::KindMismatch {
                left: self.kind,
                right: Kind::Scalar,
            });
        }
        for (&(i, k), _) in &self.terms {
            if i != k {
                return Err(PGError::NotUnitLeading);
            }
        }
        let leading = match self.coeff_or_zero(0, 0) {
            Coeff::Scalar(s) => s,
            _ => unreachable!(),
        };
        if (leading - Scalar::ONE).norm() > 1e-12 {
            return Err(PGError::NotUnitLeading);
        }

        let one = PGElement::one(&self.ctx);
        let u = self.sub(&one);
        let mut result = one;
        let mut power = PGElement::one(&self.ctx);
        let mut binom = 1.0f64; // binomial(1/2, m), updated per step
        for m in 1..=self.ctx.n {
            power = power.mul(&u).expect("scalar product");
            if power.is_empty() {
                break;
            }
            binom *= (0.5 - (m as f64 - 1.0)) / m as f64;
            result = result.add(&power.scale(Scalar::new(binom, 0.0)));
        }
        Ok(result)
    }
}

// ── JSON encoding ───────────────────────────────────────────────────
//
// {"n": n, "kind": "...", "terms": [{"i": i, "k": k, "coeff": ...}]}
// with the coefficient encoding chosen by kind. Decoding attaches the
// standard (Hermitian) context for the element's degree.

impl Serialize for PGElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Term<'a> {
            i: usize,
            k: usize,
            coeff: CoeffRepr<'a>,
        }
        #[derive(Serialize)]
        #[serde(untagged)]
        enum CoeffRepr<'a> {
            Scalar([f64; 2]),
            Entries(Vec<[f64; 2]>),
            Operator(&'a Matrix),
        }
        let terms: Vec<Term> = self
            .terms
            .iter()
            .map(|(&(i, k), coeff)| Term {
                i,
                k,
                coeff: match coeff {
                    Coeff::Scalar(s) => CoeffRepr::Scalar([s.re, s.im]),
                    Coeff::Vector(v) | Coeff::Covector(v) => {
                        CoeffRepr::Entries(v.data().iter().map(|z| [z.re, z.im]).collect())
                    }
                    Coeff::Operator(m) => CoeffRepr::Operator(m),
                },
            })
            .collect();
        let mut st = serializer.serialize_struct("PGElement", 3)?;
        st.serialize_field("n", &self.ctx.n)?;
        st.serialize_field("kind", &self.kind)?;
        st.serialize_field("terms", &terms)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for PGElement {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct RawTerm {
            i: usize,
            k: usize,
            coeff: serde_json::Value,
        }
        #[derive(Deserialize)]
        struct Raw {
            n: usize,
            kind: Kind,
            terms: Vec<RawTerm>,
        }
        let raw = Raw::deserialize(deserializer)?;
        let ctx = Arc::new(PGContext::hermitian(raw.n).map_err(D::Error::custom)?);
        let dim = raw.n + 1;
        let mut out = PGElement::zero(&ctx, raw.kind);
        for term in raw.terms {
            if term.i > raw.n || term.k > raw.n {
                return Err(D::Error::custom(format!(
                    "bidegree ({}, {}) exceeds degree {}",
                    term.i, term.k, raw.n
                )));
            }
            if out.terms.contains_key(&(term.i, term.k)) {
                return Err(D::Error::custom(format!(
                    "duplicate bidegree ({}, {})",
                    term.i, term.k
                )));
            }
            let coeff = match raw.kind {
                Kind::Scalar => {
                    let [re, im]: [f64; 2] =
                        serde_json::from_value(term.coeff).map_err(D::Error::custom)?;
                    if !re.is_finite() || !im.is_finite() {
                        return Err(D::Error::custom("non-finite scalar coefficient"));
                    }
                    Coeff::Scalar(Scalar::new(re, im))
                }
                Kind::Vector | Kind::Covector => {
                    let v: Vector = serde_json::from_value(term.coeff).map_err(D::Error::custom)?;
                    if v.dim() != dim {
                        return Err(D::Error::custom(PGError::CoefficientShape { expected: dim }));
                    }
                    if raw.kind == Kind::Vector {
                        Coeff::Vector(v)
                    } else {
                        Coeff::Covector(v)
                    }
                }
                Kind::Operator => {
                    let m: Matrix = serde_json::from_value(term.coeff).map_err(D::Error::custom)?;
                    if m.rows() != dim || m.cols() != dim {
                        return Err(D::Error::custom(PGError::CoefficientShape { expected: dim }));
                    }
                    Coeff::Operator(m)
                }
            };
            out.insert_acc((term.i, term.k), coeff);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fermion::build_fermion;
    use crate::numerics::c;

    fn hermitian_ctx(n: usize) -> Arc<PGContext> {
        Arc::new(PGContext::hermitian(n).unwrap())
    }

    #[test]
    fn weights_match_closed_form_anchors() {
        assert_eq!(g_coefficients(1).unwrap(), vec![0, 1]);
        assert_eq!(g_coefficients(2).unwrap(), vec![-1, 2, 1]);
        assert_eq!(g_coefficients(3).unwrap(), vec![0, 1, 0, 1]);
        for n in 4..=16usize {
            let g = g_coefficients(n).unwrap();
            let sign = |e: i64| if e % 2 == 0 { 1 } else { -1 };
            assert_eq!(g[n], 1, "g_n, n = {n}");
            assert_eq!(g[n - 1], 1 + sign(n as i64), "g_(n-1), n = {n}");
            assert_eq!(g[n - 2], sign(n as i64 - 1), "g_(n-2), n = {n}");
            assert_eq!(g[n - 3], 0, "g_(n-3), n = {n}");
        }
        assert_eq!(g_coefficients(0).unwrap_err(), PGError::DegreeOutOfRange(0));
        assert_eq!(g_coefficients(17).unwrap_err(), PGError::DegreeOutOfRange(17));
    }

    #[test]
    fn parity_conjugation_on_fermion_objects() {
        let ctx = hermitian_ctx(2);
        let alg = build_fermion(2).unwrap();
        // z |1> = -|1> z: the Fock state at level 1 flips sign.
        let v = Coeff::Vector(alg.fock[1].clone());
        match ctx.parity_conjugate(&v) {
            Coeff::Vector(w) => assert_eq!(w, alg.fock[1].scale(-Scalar::ONE)),
            _ => panic!("kind changed"),
        }
        // P A P = -A for the shift matrix.
        match ctx.parity_conjugate(&Coeff::Operator(alg.a.clone())) {
            Coeff::Operator(m) => assert_eq!(m, alg.a.scale(-Scalar::ONE)),
            _ => panic!("kind changed"),
        }
        // Scalars are untouched.
        match ctx.parity_conjugate(&Coeff::Scalar(c(5.0, 0.0))) {
            Coeff::Scalar(s) => assert_eq!(s, c(5.0, 0.0)),
            _ => panic!("kind changed"),
        }
    }

    #[test]
    fn generators_anticommute() {
        let ctx = hermitian_ctx(3);
        let z = PGElement::zeta(&ctx);
        let zs = PGElement::zeta_star(&ctx);
        // z* z = -z z*.
        let left = zs.mul(&z).unwrap();
        assert_eq!(left.coeff_or_zero(1, 1), Coeff::Scalar(-Scalar::ONE));
        let anti = zs.mul(&z).unwrap().add(&z.mul(&zs).unwrap());
        assert!(anti.is_empty());
    }

    #[test]
    fn zeta_zetastar_squares_with_a_sign() {
        let ctx = hermitian_ctx(3);
        let z = PGElement::zeta(&ctx);
        let zs = PGElement::zeta_star(&ctx);
        let zz = z.mul(&zs).unwrap();
        let sq = zz.mul(&zz).unwrap();
        // (z z*)^2 = -z^2 z*^2.
        assert_eq!(sq.coeff_or_zero(2, 2), Coeff::Scalar(-Scalar::ONE));
        assert_eq!(sq.terms().count(), 1);
    }

    #[test]
    fn nilpotency_kills_high_powers() {
        for n in 1..=4usize {
            let ctx = hermitian_ctx(n);
            let z = PGElement::zeta(&ctx);
            let mut power = PGElement::one(&ctx);
            for _ in 0..n {
                power = power.mul(&z).unwrap();
            }
            assert!(!power.is_empty());
            assert!(power.mul(&z).unwrap().is_empty(), "z^{} should vanish", n + 1);
        }
    }

    #[test]
    fn adjoint_of_generator_ket() {
        let ctx = hermitian_ctx(2);
        let alg = build_fermion(2).unwrap();
        let term = PGElement::from_term(&ctx, 1, 0, Coeff::Vector(alg.fock[1].clone()));
        let adj = term.adjoint();
        // (z |1>)^+ = <1| z* = z* . (-<1|): one parity move on the bra.
        assert_eq!(adj.kind(), Kind::Covector);
        assert_eq!(
            adj.coeff_or_zero(0, 1),
            Coeff::Covector(alg.fock[1].scale(-Scalar::ONE))
        );
    }

    #[test]
    fn adjoint_fixes_even_real_scalars() {
        // 1 + z z* is self-adjoint; the Hermitian context is self-dual, so
        // the comparison includes the context.
        let ctx = hermitian_ctx(2);
        let z = PGElement::zeta(&ctx);
        let zs = PGElement::zeta_star(&ctx);
        let s = PGElement::one(&ctx).add(&z.mul(&zs).unwrap());
        assert_eq!(s.adjoint(), s);
    }

    #[test]
    fn adjoint_of_plain_operator() {
        let ctx = hermitian_ctx(1);
        let m = Matrix::new(2, 2, vec![c(1.0, 2.0), Scalar::ZERO, c(0.0, 1.0), c(3.0, 0.0)]).unwrap();
        let el = PGElement::from_operator(&ctx, m.clone());
        let adj = el.adjoint();
        assert_eq!(adj.coeff_or_zero(0, 0), Coeff::Operator(m.adjoint()));
    }

    #[test]
    fn adjoint_is_involutive() {
        let ctx = hermitian_ctx(3);
        let alg = build_fermion(3).unwrap();
        let mut el = PGElement::from_term(&ctx, 1, 0, Coeff::Vector(alg.fock[1].clone()));
        el = el.add(&PGElement::from_term(&ctx, 2, 1, Coeff::Vector(alg.fock[2].clone())));
        let twice = el.adjoint().adjoint();
        assert_eq!(twice.kind(), el.kind());
        for (&key, coeff) in &el.terms {
            assert_eq!(&twice.coeff_or_zero(key.0, key.1), coeff);
        }
    }

    #[test]
    fn integration_rules() {
        // n = 1: the constant integrates to zero (Berezin limit).
        let ctx1 = hermitian_ctx(1);
        let one = PGElement::one(&ctx1);
        assert_eq!(one.integrate(), Coeff::Scalar(Scalar::ZERO));

        // z^k z*^k . I integrates to g_k(n) I.
        for n in 1..=4usize {
            let ctx = hermitian_ctx(n);
            let g = g_coefficients(n).unwrap();
            for k in 0..=n {
                let el = PGElement::from_term(&ctx, k, k, Coeff::Operator(Matrix::identity(n + 1)));
                let expected = Matrix::identity(n + 1).scale(c(g[k] as f64, 0.0));
                assert_eq!(el.integrate(), Coeff::Operator(expected), "n = {n}, k = {k}");
            }
        }

        // Hand-canonicalized n = 1 coherent-state kernel integrates to I.
        let dim = 2;
        let p00 = Vector::basis(dim, 0).outer(&Vector::basis(dim, 0));
        let p11 = Vector::basis(dim, 1).outer(&Vector::basis(dim, 1));
        let mut kernel = PGElement::from_term(&ctx1, 0, 0, Coeff::Operator(p00.clone()));
        kernel = kernel.add(&PGElement::from_term(
            &ctx1,
            1,
            1,
            Coeff::Operator(&p00 + &p11),
        ));
        assert_eq!(kernel.integrate(), Coeff::Operator(Matrix::identity(dim)));
    }

    #[test]
    fn sqrt_of_one_plus_nilpotent() {
        // n = 1: sqrt(1 + z z*) = 1 + (1/2) z z*.
        let ctx = hermitian_ctx(1);
        let z = PGElement::zeta(&ctx);
        let zs = PGElement::zeta_star(&ctx);
        let s = PGElement::one(&ctx).add(&z.mul(&zs).unwrap());
        let root = s.sqrt_even().unwrap();
        assert_eq!(root.coeff_or_zero(0, 0), Coeff::Scalar(Scalar::ONE));
        assert_eq!(root.coeff_or_zero(1, 1), Coeff::Scalar(c(0.5, 0.0)));

        // n = 2: an extra (1/8) z^2 z*^2 appears because (z z*)^2 = -z^2 z*^2.
        let ctx = hermitian_ctx(2);
        let z = PGElement::zeta(&ctx);
        let zs = PGElement::zeta_star(&ctx);
        let s = PGElement::one(&ctx).add(&z.mul(&zs).unwrap());
        let root = s.sqrt_even().unwrap();
        assert_eq!(root.coeff_or_zero(1, 1), Coeff::Scalar(c(0.5, 0.0)));
        assert_eq!(root.coeff_or_zero(2, 2), Coeff::Scalar(c(0.125, 0.0)));
        let squared = root.mul(&root).unwrap();
        let defect = squared.sub(&s);
        assert!(defect.max_norm() < 1e-15);

        // sqrt(1) = 1.
        let one = PGElement::one(&ctx);
        assert_eq!(one.sqrt_even().unwrap(), one);
    }

    #[test]
    fn sqrt_rejects_non_unit_leading() {
        let ctx = hermitian_ctx(2);
        let two = PGElement::from_scalar(&ctx, c(2.0, 0.0));
        assert_eq!(two.sqrt_even().unwrap_err(), PGError::NotUnitLeading);
        let z = PGElement::zeta(&ctx);
        assert_eq!(z.sqrt_even().unwrap_err(), PGError::NotUnitLeading);
    }

    #[test]
    fn kind_mismatch_is_reported() {
        let ctx = hermitian_ctx(1);
        let v = PGElement::from_vector(&ctx, Vector::basis(2, 0));
        let err = v.mul(&v).unwrap_err();
        assert_eq!(
            err,
            PGError::KindMismatch {
                left: Kind::Vector,
                right: Kind::Vector
            }
        );
    }

    #[test]
    fn context_mismatch_is_reported() {
        let ctx1 = hermitian_ctx(1);
        let ctx2 = hermitian_ctx(2);
        let a = PGElement::one(&ctx1);
        let b = PGElement::one(&ctx2);
        assert_eq!(a.mul(&b).unwrap_err(), PGError::ContextMismatch);
    }

    #[test]
    fn moving_zeta_past_a_ket_applies_parity() {
        // z . (v at (0,0)) = (P v at (0,0)) . z for every basis coefficient.
        for n in 1..=3usize {
            let ctx = hermitian_ctx(n);
            let z = PGElement::zeta(&ctx);
            for k in 0..=n {
                let v = PGElement::from_vector(&ctx, Vector::basis(n + 1, k));
                let flipped = match ctx.parity_conjugate(&Coeff::Vector(Vector::basis(n + 1, k))) {
                    Coeff::Vector(w) => PGElement::from_vector(&ctx, w),
                    _ => unreachable!(),
                };
                let left = z.mul(&v).unwrap();
                let right = flipped.mul(&z).unwrap();
                assert_eq!(left, right, "n = {n}, k = {k}");
            }
        }
    }

    #[test]
    fn element_json_round_trips() {
        let ctx = hermitian_ctx(2);
        let alg = build_fermion(2).unwrap();
        let mut el = PGElement::from_term(&ctx, 1, 0, Coeff::Vector(alg.fock[1].clone()));
        el = el.add(&PGElement::from_term(&ctx, 0, 0, Coeff::Vector(alg.fock[0].clone())));
        let json = serde_json::to_string(&el).unwrap();
        let back: PGElement = serde_json::from_str(&json).unwrap();
        assert_eq!(back, el);
    }

    #[test]
    fn element_json_rejects_out_of_range_bidegree() {
        let s = r#"{"n": 1, "kind": "scalar", "terms": [{"i": 2, "k": 0, "coeff": [1, 0]}]}"#;
        assert!(serde_json::from_str::<PGElement>(s).is_err());
    }

    #[test]
    fn element_json_rejects_wrong_coefficient_shape() {
        let s = r#"{"n": 1, "kind": "vector", "terms": [{"i": 0, "k": 0, "coeff": [[1, 0]]}]}"#;
        assert!(serde_json::from_str::<PGElement>(s).is_err());
    }
}
