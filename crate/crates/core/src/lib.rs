//! Elliptic Ruijsenaars-Schneider systems.
//!
//! * [`elliptic`]: Weierstrass sigma, zeta, wp over a lattice (with
//!   trigonometric and rational degenerations), the pair potential and the
//!   Lax kernel with explicit branch data.
//! * [`dynamics`]: the spinless and spin RS equations of motion, the N = 2
//!   leaf flow, and an adaptive Dormand-Prince integrator.
//! * [`lax`]: Lax matrices, the gauged 2x2 matrix, the `det L(z0) = 0`
//!   chart and isospectrality diagnostics.
//! * [`verify`]: the N = 2 two-form, its Hamiltonian flow and the
//!   verification suites.
//! * [`cli`]: run configuration and the `simulate` / `verify` / `z0` commands.

// NaN must fail tolerance checks, so comparisons are written as !(x < tol).
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod elliptic;
pub mod lax;
pub mod verify;
pub mod cli;
mod error;

pub use error::{Error, Result};
