//! Finite-level (n+1)-dimensional systems with possibly non-orthogonal
//! eigenbases: general ladder operators between levels, Hamiltonian
//! factorization through them, expansion in the unit-weight pseudo-fermion
//! ladder pair, and pseudo-Hermiticity checks.

use serde::de::Error as _;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::numerics::{invert, Matrix, NumericsError, Scalar, Tolerance, Vector};
use crate::pseudofermion::{pf_number_operator, CandidatePair, PfError};
use crate::report::{Check, VerificationReport};

#[derive(Debug, Error)]
pub enum FiniteLevelError {
    #[error("eigenbasis is singular: {0}")]
    SingularBasis(NumericsError),
    #[error("degenerate spectrum: levels {i} and {j} coincide within tolerance")]
    DegenerateSpectrum { i: usize, j: usize },
    #[error("expected {expected} ladder weights, found {found}")]
    WeightLengthMismatch { expected: usize, found: usize },
    #[error("factorization residual {residual:.3e} exceeds tolerance")]
    FactorizationFailure { residual: f64 },
    #[error("ladder reconstruction residual {residual:.3e} exceeds tolerance")]
    ReconstructionFailure { residual: f64 },
    #[error("invalid system: {0}")]
    Invalid(String),
    #[error(transparent)]
    Pair(#[from] PfError),
}

/// An (n+1)-level system: spectrum, eigenbasis columns, biorthogonal dual
/// columns, and the assembled Hamiltonian `H = sum_k eps_k |psi_k><phi_k|`.
#[derive(Debug, Clone)]
pub struct FiniteLevelSystem {
    pub n: usize,
    pub eps: Vec<Scalar>,
    pub psi: Matrix,
    pub phi: Matrix,
    pub h: Matrix,
}

impl FiniteLevelSystem {
    pub fn dim(&self) -> usize {
        self.n + 1
    }

    pub fn psi_k(&self, k: usize) -> Vector {
        self.psi.column(k)
    }

    pub fn phi_k(&self, k: usize) -> Vector {
        self.phi.column(k)
    }

    /// Metric operator `eta = sum_k |phi_k><phi_k|`.
    pub fn eta(&self) -> Matrix {
        &self.phi * &self.phi.adjoint()
    }

    pub fn is_real_spectrum(&self, tol: Tolerance) -> bool {
        let scale = self.eps.iter().map(|e| e.norm()).fold(1.0, f64::max);
        self.eps.iter().all(|e| e.im.abs() <= tol.threshold(scale))
    }
}

impl Serialize for FiniteLevelSystem {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("FiniteLevelSystem", 4)?;
        st.serialize_field("eps", &self.eps.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>())?;
        st.serialize_field("Psi", &self.psi)?;
        st.serialize_field("Phi", &self.phi)?;
        st.serialize_field("H", &self.h)?;
        st.end()
    }
}

/// Input form: `{"eps": [[re, im], ...], "Psi": Matrix}` with `Psi`
/// optional (identity when absent - the spectrum-only form).
#[derive(Debug, Clone)]
pub struct FiniteLevelInput {
    pub eps: Vec<Scalar>,
    pub psi: Option<Matrix>,
}

impl<'de> Deserialize<'de> for FiniteLevelInput {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            eps: Vec<[f64; 2]>,
            #[serde(rename = "Psi", default)]
            psi: Option<Matrix>,
        }
        let raw = Raw::deserialize(deserializer)?;
        if raw.eps.is_empty() {
            return Err(D::Error::custom("spectrum must be non-empty"));
        }
        for (i, &[re, im]) in raw.eps.iter().enumerate() {
            if !re.is_finite() || !im.is_finite() {
                return Err(D::Error::custom(format!("non-finite level {i}")));
            }
        }
        let eps: Vec<Scalar> = raw.eps.iter().map(|&[re, im]| Scalar::new(re, im)).collect();
        if let Some(psi) = &raw.psi {
            if !psi.is_square() || psi.rows() != eps.len() {
                return Err(D::Error::custom("Psi dimension does not match spectrum length"));
            }
        }
        Ok(FiniteLevelInput { eps, psi: raw.psi })
    }
}

impl FiniteLevelInput {
    pub fn into_system(self, tol: Tolerance) -> Result<FiniteLevelSystem, FiniteLevelError> {
        let dim = self.eps.len();
        let psi = self.psi.unwrap_or_else(|| Matrix::identity(dim));
        from_spectrum(&self.eps, &psi, tol)
    }
}

/// Assemble a system from a spectrum and eigenbasis columns:
/// `Phi = (Psi^{-1})^H`, `H = sum_k eps_k |psi_k><phi_k|`.
pub fn from_spectrum(
    eps: &[Scalar],
    psi: &Matrix,
    tol: Tolerance,
) -> Result<FiniteLevelSystem, FiniteLevelError> {
    let dim = eps.len();
    if dim < 2 {
        return Err(FiniteLevelError::Invalid("need at least two levels".into()));
    }
    if !psi.is_square() || psi.rows() != dim {
        return Err(FiniteLevelError::Invalid(format!(
            "eigenbasis must be {dim}x{dim}"
        )));
    }
    let scale = eps.iter().map(|e| e.norm()).fold(1.0, f64::max);
    for i in 0..dim {
        for j in (i + 1)..dim {
            if (eps[i] - eps[j]).norm() <= tol.threshold(scale) {
                return Err(FiniteLevelError::DegenerateSpectrum { i, j });
            }
        }
    }
    let phi = invert(psi)
        .map_err(FiniteLevelError::SingularBasis)?
        .adjoint();
    let mut h = Matrix::zeros(dim, dim);
    for k in 0..dim {
        h = &h + &psi.column(k).outer(&phi.column(k)).scale(eps[k]);
    }
    Ok(FiniteLevelSystem {
        n: dim - 1,
        eps: eps.to_vec(),
        psi: psi.clone(),
        phi,
        h,
    })
}

/// Ladder weights `rho_k` with their square roots `sigma_k` (principal
/// branch); only `sigma^2 = rho` enters any verified identity, so individual
/// sign choices are observationally irrelevant.
#[derive(Debug, Clone, Serialize)]
pub struct LadderWeights {
    pub rho: Vec<Scalar>,
    pub sigma: Vec<Scalar>,
    pub q: Option<Scalar>,
}

impl LadderWeights {
    pub fn new(rho: Vec<Scalar>) -> Self {
        let sigma = rho.iter().map(|z| z.sqrt()).collect();
        LadderWeights { rho, sigma, q: None }
    }

    pub fn unit(n: usize) -> Self {
        Self::new(vec![Scalar::ONE; n])
    }

    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }
}

/// q-deformed weights `rho_k = sin((k+1) pi / (n+1)) / sin(pi / (n+1))`
/// (the bracket numbers `[[k+1]]` at `q = exp(i pi/(n+1))`); real, positive,
/// and palindromic.
pub fn q_weights(n: usize) -> LadderWeights {
    let denom = (std::f64::consts::PI / (n as f64 + 1.0)).sin();
    let rho = (0..n)
        .map(|k| {
            let num = ((k as f64 + 1.0) * std::f64::consts::PI / (n as f64 + 1.0)).sin();
            Scalar::new(num / denom, 0.0)
        })
        .collect();
    let mut w = LadderWeights::new(rho);
    w.q = Some(Scalar::from_polar(1.0, std::f64::consts::PI / (n as f64 + 1.0)));
    w
}

/// General lowering/raising pair between adjacent levels:
/// `a = sum_k sigma_k |psi_k><phi_{k+1}|`, `b = sum_k sigma_k |psi_{k+1}><phi_k|`.
/// Unit weights give the pseudo-fermion ladder pair of the system.
pub fn general_ladder(
    sys: &FiniteLevelSystem,
    w: &LadderWeights,
) -> Result<CandidatePair, FiniteLevelError> {
    if w.len() != sys.n {
        return Err(FiniteLevelError::WeightLengthMismatch {
            expected: sys.n,
            found: w.len(),
        });
    }
    let dim = sys.dim();
    let mut a = Matrix::zeros(dim, dim);
    let mut b = Matrix::zeros(dim, dim);
    for k in 0..sys.n {
        a = &a + &sys.psi_k(k).outer(&sys.phi_k(k + 1)).scale(w.sigma[k]);
        b = &b + &sys.psi_k(k + 1).outer(&sys.phi_k(k)).scale(w.sigma[k]);
    }
    Ok(CandidatePair::new(a, b)?)
}

/// Result of factorizing a Hamiltonian through its level ladder.
#[derive(Debug, Clone)]
pub struct Factorization {
    pub pair: CandidatePair,
    pub weights: LadderWeights,
    pub shift: Scalar,
    pub residual: f64,
}

/// Factorize `H = b a + eps_0` with weights `rho_k = eps_{k+1} - eps_0`.
///
/// The shifted weights (rather than bare `eps_{k+1}`) are what make
/// `b a |psi_k> = (eps_k - eps_0) |psi_k>` consistent with adding the ground
/// level back as a scalar shift.
pub fn factorize(
    sys: &FiniteLevelSystem,
    tol: Tolerance,
) -> Result<Factorization, FiniteLevelError> {
    let shift = sys.eps[0];
    let rho: Vec<Scalar> = (0..sys.n).map(|k| sys.eps[k + 1] - shift).collect();
    let weights = LadderWeights::new(rho);
    let pair = general_ladder(sys, &weights)?;
    let reconstructed = &(&pair.b * &pair.a) + &Matrix::identity(sys.dim()).scale(shift);
    let residual = (&reconstructed - &sys.h).max_norm();
    if residual > tol.threshold(sys.h.max_norm().max(1.0)) {
        return Err(FiniteLevelError::FactorizationFailure { residual });
    }
    Ok(Factorization {
        pair,
        weights,
        shift,
        residual,
    })
}

/// Expansion coefficients of `a(n; rho)` in the unit-weight pair:
/// `a(n; rho) = c_0 a + c_1 b a^2 + ... + c_{n-1} b^{n-1} a^n` with
/// `c_0 = sigma_0`, `c_m = sigma_m - sigma_{m-1}`, and the mirrored identity
/// for `b(n; rho)`. Both reconstructions are verified.
pub fn expand_ladder_in_pf(
    sys: &FiniteLevelSystem,
    w: &LadderWeights,
    tol: Tolerance,
) -> Result<Vec<Scalar>, FiniteLevelError> {
    let target = general_ladder(sys, w)?;
    let unit = general_ladder(sys, &LadderWeights::unit(sys.n))?;

    let mut coeffs = Vec::with_capacity(sys.n);
    for m in 0..sys.n {
        if m == 0 {
            coeffs.push(w.sigma[0]);
        } else {
            coeffs.push(w.sigma[m] - w.sigma[m - 1]);
        }
    }

    let dim = sys.dim();
    let mut a_rebuilt = Matrix::zeros(dim, dim);
    let mut b_rebuilt = Matrix::zeros(dim, dim);
    for (m, &c) in coeffs.iter().enumerate() {
        let lower = &unit.b.pow(m) * &unit.a.pow(m + 1);
        let raise = &unit.b.pow(m + 1) * &unit.a.pow(m);
        a_rebuilt = &a_rebuilt + &lower.scale(c);
        b_rebuilt = &b_rebuilt + &raise.scale(c);
    }
    let scale = target.a.max_norm().max(target.b.max_norm()).max(1.0);
    let residual = (&a_rebuilt - &target.a)
        .max_norm()
        .max((&b_rebuilt - &target.b).max_norm());
    if residual > tol.threshold(scale) {
        return Err(FiniteLevelError::ReconstructionFailure { residual });
    }
    Ok(coeffs)
}

/// Structural checks tying the Hamiltonian to its pseudo-fermion content:
/// `[H, N] = 0`, pseudo-Hermiticity for real spectra, proportionality to the
/// number operator for equidistant spectra.
pub fn structure_checks(sys: &FiniteLevelSystem, tol: Tolerance) -> VerificationReport {
    let mut report = VerificationReport::empty();
    let unit = general_ladder(sys, &LadderWeights::unit(sys.n))
        .expect("unit weights always match the degree");
    let number = pf_number_operator(&unit);
    let h = &sys.h;
    let h_scale = h.max_norm().max(1.0);

    let comm = &(h * &number) - &(&number * h);
    report.push(Check::new(
        "number_commutes",
        "[H, N] = 0",
        comm.max_norm(),
        tol.threshold(h_scale * number.max_norm().max(1.0)),
    ));

    if sys.is_real_spectrum(tol) {
        let eta = sys.eta();
        let defect = &(&eta * h) - &(&h.adjoint() * &eta);
        report.push(Check::new(
            "pseudo_hermiticity",
            "eta H = H^+ eta",
            defect.max_norm(),
            tol.threshold(h_scale * eta.max_norm().max(1.0)),
        ));
    }

    if sys.n >= 1 {
        let step = sys.eps[1] - sys.eps[0];
        let scale = sys.eps.iter().map(|e| e.norm()).fold(1.0, f64::max);
        let equidistant = (0..=sys.n).all(|k| {
            (sys.eps[k] - (sys.eps[0] + step * k as f64)).norm() <= tol.threshold(scale)
        });
        if equidistant {
            let model = &Matrix::identity(sys.dim()).scale(sys.eps[0]) + &number.scale(step);
            report.push(Check::new(
                "equidistant_proportionality",
                "H = eps_0 + d N",
                (h - &model).max_norm(),
                tol.threshold(h_scale),
            ));
        }
    }

    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{approx_equal, c, eigenvalues};
    use crate::pseudofermion::verify_pf_relation;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn real_spectrum(eps: &[f64]) -> Vec<Scalar> {
        eps.iter().map(|&x| c(x, 0.0)).collect()
    }

    fn shear_basis() -> Matrix {
        Matrix::new(
            3,
            3,
            vec![
                Scalar::ONE, Scalar::ONE, Scalar::ZERO,
                Scalar::ZERO, Scalar::ONE, Scalar::ZERO,
                Scalar::ZERO, Scalar::ZERO, Scalar::ONE,
            ],
        )
        .unwrap()
    }

    #[test]
    fn diagonal_system_from_spectrum() {
        let sys = from_spectrum(&real_spectrum(&[0.0, 1.0, 2.0]), &Matrix::identity(3), tol()).unwrap();
        assert!(approx_equal(&sys.h, &Matrix::diag_real(&[0.0, 1.0, 2.0]), tol()).unwrap());
        assert!(approx_equal(&sys.phi, &Matrix::identity(3), tol()).unwrap());
    }

    #[test]
    fn sheared_system_has_expected_spectrum() {
        let sys = from_spectrum(&real_spectrum(&[0.0, 1.0, 4.0]), &shear_basis(), tol()).unwrap();
        // H is non-Hermitian but its eigenvalues are the requested levels.
        assert!((&sys.h - &sys.h.adjoint()).max_norm() > 0.1);
        let mut eigs = eigenvalues(&sys.h);
        eigs.sort_by(|x, y| x.re.partial_cmp(&y.re).unwrap());
        for (eig, expected) in eigs.iter().zip([0.0, 1.0, 4.0]) {
            assert!((eig - c(expected, 0.0)).norm() < 1e-10);
        }
        // Biorthogonality of the two column sets.
        let gram = &sys.phi.adjoint() * &sys.psi;
        assert!(approx_equal(&gram, &Matrix::identity(3), tol()).unwrap());
    }

    #[test]
    fn conjugate_pair_spectrum_is_accepted() {
        let eps = vec![c(1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0)];
        let sys = from_spectrum(&eps, &shear_basis(), tol()).unwrap();
        assert_eq!(sys.n, 2);
        assert!(!sys.is_real_spectrum(tol()));
    }

    #[test]
    fn degenerate_spectrum_rejected() {
        let err = from_spectrum(&real_spectrum(&[1.0, 1.0, 2.0]), &Matrix::identity(3), tol());
        assert!(matches!(err, Err(FiniteLevelError::DegenerateSpectrum { .. })));
    }

    #[test]
    fn singular_basis_rejected() {
        let mut psi = Matrix::identity(3);
        psi[(1, 1)] = Scalar::ZERO;
        let err = from_spectrum(&real_spectrum(&[0.0, 1.0, 2.0]), &psi, tol());
        assert!(matches!(err, Err(FiniteLevelError::SingularBasis(_))));
    }

    #[test]
    fn unit_weights_recover_the_shift_matrix() {
        let sys = from_spectrum(&real_spectrum(&[0.0, 1.0, 2.0]), &Matrix::identity(3), tol()).unwrap();
        let pair = general_ladder(&sys, &LadderWeights::unit(2)).unwrap();
        let alg = crate::fermion::build_fermion(2).unwrap();
        assert!(approx_equal(&pair.a, &alg.a, tol()).unwrap());
        assert!(approx_equal(&pair.b, &alg.raising(), tol()).unwrap());
    }

    #[test]
    fn explicit_weights_place_sigma_on_the_superdiagonal() {
        let sys = from_spectrum(&real_spectrum(&[0.0, 1.0, 2.0]), &Matrix::identity(3), tol()).unwrap();
        let pair = general_ladder(&sys, &LadderWeights::new(vec![c(1.0, 0.0), c(4.0, 0.0)])).unwrap();
        let mut expected = Matrix::zeros(3, 3);
        expected[(0, 1)] = Scalar::ONE;
        expected[(1, 2)] = c(2.0, 0.0);
        assert!(approx_equal(&pair.a, &expected, tol()).unwrap());
    }

    #[test]
    fn weight_length_mismatch_is_reported() {
        let sys = from_spectrum(&real_spectrum(&[0.0, 1.0, 2.0]), &Matrix::identity(3), tol()).unwrap();
        assert!(matches!(
            general_ladder(&sys, &LadderWeights::unit(3)),
            Err(FiniteLevelError::WeightLengthMismatch { expected: 2, found: 3 })
        ));
    }

    #[test]
    fn q_weights_known_values() {
        let w1 = q_weights(1);
        assert!((w1.rho[0] - Scalar::ONE).norm() < 1e-15);
        let w2 = q_weights(2);
        assert!((w2.rho[0] - Scalar::ONE).norm() < 1e-15);
        assert!((w2.rho[1] - Scalar::ONE).norm() < 1e-15);
        let w3 = q_weights(3);
        assert!((w3.rho[1] - c(2.0f64.sqrt(), 0.0)).norm() < 1e-15);
        assert!((w3.rho[0] - Scalar::ONE).norm() < 1e-15);
        assert!((w3.rho[2] - Scalar::ONE).norm() < 1e-15);
    }

    #[test]
    fn q_weights_real_positive_palindromic() {
        for n in 1..=16usize {
            let w = q_weights(n);
            for k in 0..n {
                assert!(w.rho[k].im == 0.0 && w.rho[k].re > 0.0, "n = {n}, k = {k}");
                let mirror = w.rho[n - 1 - k];
                assert!((w.rho[k] - mirror).norm() < 1e-12, "n = {n}, k = {k}");
            }
        }
    }

    #[test]
    fn q_weights_at_n2_equal_unit_ladder() {
        let sys = from_spectrum(&real_spectrum(&[0.0, 1.0, 2.0]), &Matrix::identity(3), tol()).unwrap();
        let q_pair = general_ladder(&sys, &q_weights(2)).unwrap();
        let unit_pair = general_ladder(&sys, &LadderWeights::unit(2)).unwrap();
        assert!(approx_equal(&q_pair.a, &unit_pair.a, tol()).unwrap());
        assert!(approx_equal(&q_pair.b, &unit_pair.b, tol()).unwrap());
    }

    #[test]
    fn factorization_of_diagonal_spectra() {
        let sys = from_spectrum(&real_spectrum(&[0.0, 1.0, 4.0]), &Matrix::identity(3), tol()).unwrap();
        let fac = factorize(&sys, tol()).unwrap();
        assert_eq!(fac.shift, Scalar::ZERO);
        assert!((fac.weights.rho[0] - Scalar::ONE).norm() < 1e-14);
        assert!((fac.weights.rho[1] - c(4.0, 0.0)).norm() < 1e-14);
        let ba = &fac.pair.b * &fac.pair.a;
        assert!(approx_equal(&ba, &sys.h, tol()).unwrap());

        // Shifted ground level.
        let sys = from_spectrum(&real_spectrum(&[2.0, 3.0, 6.0]), &Matrix::identity(3), tol()).unwrap();
        let fac = factorize(&sys, tol()).unwrap();
        assert_eq!(fac.shift, c(2.0, 0.0));
        assert!((fac.weights.rho[0] - Scalar::ONE).norm() < 1e-14);
        assert!((fac.weights.rho[1] - c(4.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn two_level_factorization_with_random_basis() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let psi = Matrix::from_fn(2, 2, |_, _| {
                c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            if invert(&psi).is_err() {
                continue;
            }
            let sys = from_spectrum(&real_spectrum(&[0.0, 1.0]), &psi, tol()).unwrap();
            let fac = factorize(&sys, tol()).unwrap();
            assert!(fac.residual < 1e-10);
        }
    }

    #[test]
    fn expansion_coefficients() {
        let sys = from_spectrum(&real_spectrum(&[0.0, 1.0, 2.0]), &shear_basis(), tol()).unwrap();
        // Unit weights: coefficients collapse to (1, 0, ..., 0).
        let coeffs = expand_ladder_in_pf(&sys, &LadderWeights::unit(2), tol()).unwrap();
        assert!((coeffs[0] - Scalar::ONE).norm() < 1e-14);
        assert!(coeffs[1].norm() < 1e-14);

        // rho = (1, 4): sigma = (1, 2), coefficients (1, 1).
        let w = LadderWeights::new(vec![Scalar::ONE, c(4.0, 0.0)]);
        let coeffs = expand_ladder_in_pf(&sys, &w, tol()).unwrap();
        assert!((coeffs[0] - Scalar::ONE).norm() < 1e-12);
        assert!((coeffs[1] - Scalar::ONE).norm() < 1e-12);
    }

    #[test]
    fn expansion_for_random_complex_weights() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 2..=5usize {
            let dim = n + 1;
            let psi = &Matrix::identity(dim)
                + &Matrix::from_fn(dim, dim, |_, _| {
                    c(rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3))
                });
            let eps: Vec<Scalar> = (0..dim).map(|k| c(k as f64, 0.0)).collect();
            let sys = from_spectrum(&eps, &psi, tol()).unwrap();
            let rho: Vec<Scalar> = (0..n)
                .map(|_| Scalar::from_polar(rng.gen_range(0.2..3.0), rng.gen_range(0.0..6.28)))
                .collect();
            let w = LadderWeights::new(rho);
            assert!(expand_ladder_in_pf(&sys, &w, tol()).is_ok(), "n = {n}");
        }
    }

    #[test]
    fn unit_ladder_satisfies_pf_relation_for_random_bases() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for n in 1..=8usize {
            let dim = n + 1;
            let psi = &Matrix::identity(dim)
                + &Matrix::from_fn(dim, dim, |_, _| {
                    c(rng.gen_range(-0.25..0.25), rng.gen_range(-0.25..0.25))
                });
            let eps: Vec<Scalar> = (0..dim).map(|k| c(k as f64 + 0.5, 0.0)).collect();
            let sys = from_spectrum(&eps, &psi, tol()).unwrap();
            let pair = general_ladder(&sys, &LadderWeights::unit(n)).unwrap();
            assert!(verify_pf_relation(&pair, tol()).overall, "n = {n}");
        }
    }

    #[test]
    fn structure_checks_cover_all_claims() {
        // Commutation with N holds for any spectrum.
        let sys = from_spectrum(&real_spectrum(&[0.3, 1.9, 5.2]), &shear_basis(), tol()).unwrap();
        let report = structure_checks(&sys, tol());
        assert!(report.check("number_commutes").unwrap().pass);
        assert!(report.check("pseudo_hermiticity").unwrap().pass);

        // Equidistant spectrum: H = eps_0 + d N.
        let sys = from_spectrum(&real_spectrum(&[0.0, 2.0, 4.0]), &shear_basis(), tol()).unwrap();
        let report = structure_checks(&sys, tol());
        let prop = report.check("equidistant_proportionality").unwrap();
        assert!(prop.pass, "residual {}", prop.residual);

        // H = 2 N exactly when eps = (0, 2, 4).
        let pair = general_ladder(&sys, &LadderWeights::unit(2)).unwrap();
        let number = pf_number_operator(&pair);
        assert!((&sys.h - &number.scale(c(2.0, 0.0))).max_norm() < 1e-10);

        // Complex spectrum: pseudo-hermiticity is not asserted.
        let eps = vec![c(1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0)];
        let sys = from_spectrum(&eps, &shear_basis(), tol()).unwrap();
        let report = structure_checks(&sys, tol());
        assert!(report.check("pseudo_hermiticity").is_none());
        assert!(report.check("number_commutes").unwrap().pass);
    }

    #[test]
    fn sigma_sign_flips_do_not_affect_verified_identities() {
        let sys = from_spectrum(&real_spectrum(&[0.5, 1.5, 3.5, 7.0]), &Matrix::identity(4), tol()).unwrap();
        let fac = factorize(&sys, tol()).unwrap();
        for flip_mask in 1..(1 << 3usize) {
            let mut weights = fac.weights.clone();
            for k in 0..3 {
                if flip_mask & (1 << k) != 0 {
                    weights.sigma[k] = -weights.sigma[k];
                }
            }
            let pair = general_ladder(&sys, &weights).unwrap();
            let rebuilt = &(&pair.b * &pair.a) + &Matrix::identity(4).scale(fac.shift);
            assert!(
                approx_equal(&rebuilt, &sys.h, tol()).unwrap(),
                "mask {flip_mask}"
            );
        }
    }

    #[test]
    fn factorize_from_spectrum_random_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for trial in 0..100 {
            let n = 1 + trial % 5;
            let dim = n + 1;
            // Random spectra with unit-scale gaps, random well-conditioned basis.
            let mut eps = vec![c(rng.gen_range(-1.0..1.0), 0.0)];
            for k in 1..dim {
                let gap = rng.gen_range(0.5..1.5);
                eps.push(eps[k - 1] + c(gap, 0.0));
            }
            let psi = &Matrix::identity(dim)
                + &Matrix::from_fn(dim, dim, |_, _| {
                    c(rng.gen_range(-0.2..0.2), rng.gen_range(-0.2..0.2))
                });
            let sys = from_spectrum(&eps, &psi, tol()).unwrap();
            let fac = factorize(&sys, tol()).unwrap();
            assert!(fac.residual < 1e-10, "trial {trial}: {}", fac.residual);
        }
    }

    #[test]
    fn input_json_parses_spectrum_only_form() {
        let input: FiniteLevelInput = serde_json::from_str(r#"{"eps": [[0,0],[1,0],[4,0]]}"#).unwrap();
        let sys = input.into_system(tol()).unwrap();
        assert!(approx_equal(&sys.h, &Matrix::diag_real(&[0.0, 1.0, 4.0]), tol()).unwrap());

        let bad: Result<FiniteLevelInput, _> = serde_json::from_str(r#"{"eps": []}"#);
        assert!(bad.is_err());
        let bad: Result<FiniteLevelInput, _> =
            serde_json::from_str(r#"{"eps": [[0,0],[1,0]], "Psi": {"rows":3,"cols":3,"data":[[1,0],[0,0],[0,0],[0,0],[1,0],[0,0],[0,0],[0,0],[1,0]]}}"#);
        assert!(bad.is_err());
    }
}
