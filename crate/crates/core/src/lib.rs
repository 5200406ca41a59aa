//! Numerical toolkit for harmonically (s,m)-convex functions.
//!
//! The crate evaluates the weighted Hermite-Hadamard/Simpson functional
//! `I_f(λ, μ, a, b)`, its integral representation, and the two families of
//! upper bounds built on it. Every closed-form coefficient is paired with a
//! direct quadrature of the integral it claims to equal, so printed formulas
//! can be audited term by term.
//!
//! Module map:
//!
//! * [`specfun`]: Gamma, Beta and Gauss ₂F₁ (Euler integral checked against the series).
//! * [`quadrature`]: adaptive Gauss-Kronrod and tanh-sinh integration.
//! * [`convexity`]: function specs, grid checks of the convexity classes, closure combinators.
//! * [`identity`]: the `I_f` functional and its integral identity.
//! * [`bounds`]: the twelve bound coefficients, theorem right-hand sides, verdicts.
//! * [`harness`]: instance generation, sweeps and report emission.

pub mod bounds;
pub mod convexity;
pub mod error;
pub mod harness;
pub mod identity;
pub mod quadrature;
pub mod specfun;

pub use error::{Error, Result};
