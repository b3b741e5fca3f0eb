//! The full verification battery: everything the workbench can check about
//! one candidate pair, folded into a single report.

use pgfermi::coherent::{resolution_defect, Side};
use pgfermi::numerics::{eigenvalues, invert};
use pgfermi::pseudofermion::{
    build_system, completeness_defect, pseudo_adjoint_defect, verify_pf_relation, CandidatePair,
    PfError,
};
use pgfermi::{Check, Scalar, Tolerance, VerificationReport};

/// Run every check: the defining relation, nilpotency, Fock construction,
/// metric consistency, completeness, pseudo-adjointness, number-operator
/// spectrum and commutators, and both resolutions of identity.
pub fn full_battery(pair: &CandidatePair, tol: Tolerance) -> VerificationReport {
    let mut report = verify_pf_relation(pair, tol);

    let sys = match build_system(pair, tol) {
        Ok(sys) => sys,
        Err(err) => {
            report.push(build_failure_check(&err));
            return report;
        }
    };

    let dim = sys.dim();
    let op_scale = pair.a.max_norm().max(pair.b.max_norm()).max(1.0);

    report.push(Check::new(
        "vacuum_a",
        "a psi_0 = 0",
        pair.a.matvec(&sys.psi[0]).norm(),
        tol.threshold(op_scale),
    ));
    report.push(Check::new(
        "vacuum_b",
        "b^+ phi_0 = 0",
        pair.b.adjoint().matvec(&sys.phi[0]).norm(),
        tol.threshold(op_scale * sys.phi[0].norm().max(1.0)),
    ));
    report.push(Check::new(
        "termination",
        "b^{n+1} psi_0 = 0",
        pair.b.matvec(&sys.psi[sys.n()]).norm(),
        tol.threshold(op_scale.powi(sys.n() as i32 + 1)),
    ));

    let mut bio = 0.0f64;
    let mut bio_scale = 1.0f64;
    for (j, ph) in sys.phi.iter().enumerate() {
        for (k, ps) in sys.psi.iter().enumerate() {
            let expected = if j == k { Scalar::ONE } else { Scalar::ZERO };
            bio = bio.max((ph.dot(ps) - expected).norm());
            bio_scale = bio_scale.max(ph.norm() * ps.norm());
        }
    }
    report.push(Check::new(
        "biorthonormality",
        "<phi_j|psi_k> = delta_jk",
        bio,
        tol.threshold(bio_scale),
    ));

    report.push(Check::new(
        "completeness",
        "sum_k |psi_k><phi_k| = 1",
        completeness_defect(&sys),
        tol.threshold(bio_scale),
    ));

    let eta_scale = sys.eta.max_norm() * sys.eta_inv.max_norm().max(1.0);
    match invert(&sys.eta) {
        Ok(eta_num_inv) => report.push(Check::new(
            "metric_inverse",
            "eta^{-1} = sum_k |psi_k><psi_k|",
            (&eta_num_inv - &sys.eta_inv).max_norm(),
            tol.threshold(eta_scale),
        )),
        Err(_) => report.push(Check::new(
            "metric_inverse",
            "eta^{-1} = sum_k |psi_k><psi_k|",
            f64::MAX,
            tol.threshold(eta_scale),
        )),
    }

    report.push(Check::new(
        "pseudo_adjoint",
        "b = eta^{-1} a^+ eta",
        pseudo_adjoint_defect(&sys),
        tol.threshold(eta_scale * pair.a.max_norm().max(1.0)),
    ));

    let mut eigs = eigenvalues(&sys.number);
    eigs.sort_by(|x, y| x.re.partial_cmp(&y.re).unwrap());
    let mut spectrum_dev = 0.0f64;
    for (k, eig) in eigs.iter().enumerate() {
        spectrum_dev = spectrum_dev.max((eig - Scalar::new(k as f64, 0.0)).norm());
    }
    report.push(Check::new(
        "number_spectrum",
        "spec(N) = {0, 1, ..., n}",
        spectrum_dev,
        tol.threshold(sys.number.max_norm().max(1.0) * dim as f64),
    ));

    let num_scale = sys.number.max_norm().max(1.0) * op_scale;
    let comm_a = &(&(&pair.a * &sys.number) - &(&sys.number * &pair.a)) - &pair.a;
    report.push(Check::new(
        "commutator_a",
        "[a, N] = a",
        comm_a.max_norm(),
        tol.threshold(num_scale),
    ));
    let comm_b = &(&(&pair.b * &sys.number) - &(&sys.number * &pair.b)) + &pair.b;
    report.push(Check::new(
        "commutator_b",
        "[b, N] = -b",
        comm_b.max_norm(),
        tol.threshold(num_scale),
    ));

    for (side, name) in [(Side::Right, "resolution_right"), (Side::Left, "resolution_left")] {
        let residual = match resolution_defect(&sys, side) {
            Ok(defect) => defect.max_norm(),
            Err(_) => f64::MAX,
        };
        report.push(Check::new(
            name,
            "integral dz* dz |z>'<z| = 1",
            residual,
            tol.threshold(bio_scale * dim as f64),
        ));
    }

    report
}

/// A construction failure rendered as a failed check so reports always list
/// what went wrong, with the error's own magnitude as the residual.
fn build_failure_check(err: &PfError) -> Check {
    let (name, relation, residual) = match err {
        PfError::Numerics(inner) => (
            "vacuum_search",
            "a psi_0 = 0 has a unique solution",
            match inner {
                pgfermi::numerics::NumericsError::NoNullspace { sigma_min, .. } => *sigma_min,
                pgfermi::numerics::NumericsError::DegenerateNullspace { sigma_next, .. } => {
                    *sigma_next
                }
                _ => 1.0,
            },
        ),
        PfError::PairingSingular { magnitude } => (
            "vacuum_pairing",
            "<phi_0|psi_0> != 0",
            1.0 - magnitude,
        ),
        PfError::TerminationFailure { residual } => {
            ("termination", "b^{n+1} psi_0 = 0", *residual)
        }
        PfError::BiorthogonalityFailure { defect } => (
            "biorthonormality",
            "<phi_j|psi_k> = delta_jk",
            *defect,
        ),
        PfError::InvalidParams(_) => ("parameters", "parameters valid", 1.0),
    };
    Check::new(name, relation, residual, 0.0)
}
