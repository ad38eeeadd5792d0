//! Numerical toolkit for boundary singularities of the quasilinear
//! Hamilton-Jacobi equation
//!
//! ```text
//!     -div(|∇u|^{p-2} ∇u) + |∇u|^q = 0,     N >= p > q > p - 1 > 0,
//! ```
//!
//! on domains with an isolated boundary singularity at the origin.
//!
//! The toolkit computes:
//!
//! * the similarity exponent `β_q = (p-q)/(q+1-p)` and the critical
//!   absorption exponent `q_* = p - β_*/(β_*+1)` ([`exponents`]);
//! * the spherical p-harmonic eigenpair `(β_*, ψ_*)` on the upper half
//!   sphere by shooting on an elliptic phase reduction of the azimuthal
//!   ODE ([`eigensolver`]);
//! * the strongly singular azimuthal profile `ω_*`, which exists exactly
//!   for `q < q_*` ([`profiles`]);
//! * radial comparison barriers and interior subsolution sign checks
//!   ([`barrier`], [`subsolution`]);
//! * steady states of the full equation on an axisymmetric half-annulus
//!   with singular inner data, plus exponent fitting and estimate
//!   spot-checks ([`pde`]).
//!
//! All numerical kernels are generic over the scalar type through the
//! [`Real`] trait; the `*64` aliases at the crate root fix `f64`, which is
//! what the solver tolerances are calibrated for.

// `!(x > 0)` in argument guards rejects NaN along with the out-of-range
// values; the suggested `x <= 0` lets NaN through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod barrier;
pub mod eigensolver;
pub mod exponents;
pub mod io;
pub mod numerics;
pub mod params;
pub mod pde;
pub mod profiles;
pub mod real;
pub mod subsolution;

pub use params::{ParamError, ProblemParams};
pub use real::Real;

/// `f64` problem parameters.
pub type Params64 = ProblemParams<f64>;
/// `f64` eigensolver result.
pub type EigenResult64 = eigensolver::EigenResult<f64>;
/// `f64` azimuthal profile.
pub type AzimuthalProfile64 = eigensolver::AzimuthalProfile<f64>;
/// `f64` phase path.
pub type PhasePath64 = eigensolver::PhasePath<f64>;
/// `f64` polar field.
pub type PolarField64 = pde::PolarField<f64>;
/// `f64` exponent report.
pub type ExponentReport64 = exponents::ExponentReport<f64>;
