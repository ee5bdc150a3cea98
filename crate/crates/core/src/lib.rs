//! Asymptotic iteration method (AIM) for the Dirac-Coulomb problem with a
//! position-dependent mass.
//!
//! Three independent routes to the bound-state spectrum live here:
//!
//! * [`spectrum`]: closed-form energies and hypergeometric eigenfunctions,
//! * [`aim`]: the iterative method, with an exact rational-function engine,
//!   a Taylor-jet engine, and big-integer determinant evaluation
//!   ([`precise`]) for numeric root finding,
//! * [`fd`]: a finite-difference discretization solved by Sturm bisection.
//!
//! [`verify`] cross-checks them.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod aim;
pub mod error;
pub mod exact;
pub mod fd;
pub mod jet;
pub mod model;
pub mod precise;
pub mod quadrature;
pub mod spectrum;
pub mod tridiag;
pub mod verify;

pub use error::{Error, Result};
pub use model::{make_channel, mass_function, BoundState, EffectiveChannel, PhysicalSetup, SpinorComponent};
