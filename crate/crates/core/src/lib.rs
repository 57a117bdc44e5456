//! Classical density matrices for bosonic ODE systems, realized in truncated
//! Fock space.
//!
//! The crate is organised bottom-up:
//!
//! * [`poly`]: commuting-variable polynomials in the `(φ, π)` and `(z, y)`
//!   charts, with a small expression parser.
//! * [`operator`]: normal-ordered ladder-operator algebra and its dense
//!   realization at a per-mode cutoff.
//! * [`ensemble`]: coherent pseudo-wavefunctions, classical density matrices
//!   and Hamiltonian trajectories.
//! * [`evolution`]: the Liouville and free-space master generators, RK4
//!   stepping and the time-average projection.
//! * [`discrepancy`]: quantum vs classical observable flux, its closed form,
//!   field scaling and equilibrium checks.
//! * [`reification`]: the squeezing-type recodings `S(α)` and `M(α)`.
//!
//! The symbolic layers are generic over the coefficient type (see
//! [`scalar::Coefficient`]); floating-point and exact-rational instances are
//! exported as type aliases below. Numerical linear algebra is done in `f64`.

pub mod discrepancy;
pub mod ensemble;
pub mod error;
pub mod evolution;
pub mod linalg;
pub mod operator;
pub mod poly;
pub mod reification;
pub mod scalar;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Exact Gaussian-rational coefficient.
pub type ExactComplex = num_complex::Complex<num_rational::BigRational>;

/// Floating-point polynomial, the workhorse for Hamiltonians and observables.
pub type Poly = poly::PolyExpr<Complex64>;
/// Polynomial with exact rational coefficients.
pub type ExactPoly = poly::PolyExpr<ExactComplex>;

/// Floating-point normal-ordered operator.
pub type NormalForm = operator::NormalFormOperator<Complex64>;
/// Normal-ordered operator with exact coefficients.
pub type ExactNormalForm = operator::NormalFormOperator<ExactComplex>;

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
