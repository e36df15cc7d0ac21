//! Numerical linear algebra in finite-dimensional indefinite-metric
//! (Pontryagin) spaces.
//!
//! * [`space`]: the form `[x, y] = (Jx, y)`, J-adjoints, operator classes,
//!   graph subspaces `L_W`.
//! * [`mnps`]: invariant maximal non-positive subspaces of J-dissipative
//!   matrices, with certificates.
//! * [`ball`]: Möbius maps, fractional-linear maps and the hyperbolic distance
//!   on the operator ball.
//! * [`fixpoint`]: common fixed points of bounded J-unitary group
//!   representations and their unitarization.
//! * [`qpd`]: quasi-positive-definite functions on finite groups.

// `!(x > tol)` also rejects NaN, which is the point.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ball;
pub mod error;
pub mod fixpoint;
pub mod fixtures;
pub mod group;
pub mod json;
pub mod linalg;
pub mod mnps;
pub mod qpd;
pub mod space;

pub use error::{Error, Result};
pub use linalg::{CMat, CVec, Inertia};
pub use num_complex::Complex64;
pub use space::{
    invariance_residual, BallPoint, BlockOperator, IndefiniteSpace, OperatorClass, Subspace,
};
