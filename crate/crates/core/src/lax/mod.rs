//! Lax matrices, the N = 2 spectral data and isospectrality diagnostics.

mod matrices;
mod spectral;
mod z0;

pub use matrices::{
    det_condition_n2, lax_gauged_n2, lax_rs, lax_spin, LaxSample, LaxState, N2Data, PrefactorPolicy,
};
pub use spectral::{isospectral_drift, spectral_invariants, DriftReport, SkippedSnapshot};
pub use z0::{f3_from_z0, f3_squared_from_z0, normalize_z0, solve_z0, Z0Solution, Z0_TOLERANCE};
