//! Verification workbench for nonlinear n-fermion and n-pseudo-fermion
//! algebras.
//!
//! The crate constructs the finite-dimensional operators and states of these
//! algebras as concrete complex matrices, carries para-Grassmann-valued
//! objects through a graded symbolic engine, and mechanically verifies the
//! defining identities: nonlinear anticommutation relations, ladder actions,
//! bi-orthonormality, coherent-state eigenvalue equations, resolutions of
//! identity by generalized Berezin integration, and the factorization of
//! finite-level Hamiltonians through ladder operators.
//!
//! Modules:
//! - [`numerics`]: small dense complex linear algebra (inverses, nullspaces,
//!   eigensolvers) plus the repo-wide matrix JSON encoding.
//! - [`fermion`]: the Hermitian n-fermion algebra `A A^+ + (A^+)^n A^n = 1`.
//! - [`paragrassmann`]: order-(n+1) nilpotent generators with parity-graded
//!   commutation, adjoints, and weighted Berezin-style integration.
//! - [`pseudofermion`]: non-Hermitian pairs `(a, b)` with `a b + b^n a^n = 1`,
//!   bi-orthonormal Fock systems, metric operators, and example families.
//! - [`coherent`]: right/left ladder-operator coherent states and their
//!   bi-overcompleteness relations.
//! - [`finite_level`]: general ladder operators for (n+1)-level systems and
//!   Hamiltonian factorization.
//! - [`report`]: residual-based verification reports shared by all modules.

pub mod coherent;
pub mod fermion;
pub mod finite_level;
pub mod numerics;
pub mod paragrassmann;
pub mod pseudofermion;
pub mod report;

pub use numerics::{Matrix, Scalar, Tolerance, Vector};
pub use report::{Check, VerificationReport};
