//! Weierstrass functions on a period lattice and its trigonometric and
//! rational degenerations, plus the RS pair potential and Lax kernel.

mod identities;
mod kernel;
mod lattice;
mod weierstrass;

pub use identities::{sigma_three_term_residual, zeta_sigma_residual, Residual};
pub use kernel::{phi, v_potential, v_tilde, BranchDatum, CutConvention};
pub use lattice::{Lattice, LatticeMode, LatticeParams, MAX_NOME, POLE_TOLERANCE};
