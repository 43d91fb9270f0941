//! Equations of motion and trajectory integration.

mod flows;
mod integrator;
mod rhs;
mod state;
mod trajectory;

pub use flows::{LeafFlow, Reversed, RsFlow, SpinFlow, VectorField};
pub(crate) use flows::leaf_pole_distance;
pub use integrator::{integrate, IntegratorOptions};
pub use rhs::{
    momenta_to_f, n2_flow_rhs, rank_factor_embed, rs_rhs, spin_rs_rhs, MomentaConversion,
    SignConvention,
};
pub use state::{
    pair_pole_distance, Hamiltonian, N2LeafState, PhaseState, RsState, SpinState, MIN_SEPARATION,
};
pub use trajectory::{IntegratorStats, Trajectory};
