use num_complex::Complex64;

use super::rhs::{n2_flow_rhs, rs_rhs, spin_rs_rhs, SignConvention};
use super::state::{pair_pole_distance, N2LeafState, PhaseState, RsState, SpinState};
use crate::elliptic::Lattice;
use crate::error::Result;

/// An autonomous vector field on a [`PhaseState`].
pub trait VectorField {
    type State: PhaseState;

    /// Time derivative, flattened in the order of [`PhaseState::to_flat`].
    fn derivative(&self, state: &Self::State) -> Result<Vec<Complex64>>;

    /// Distance to the nearest singularity of the field; the integrator
    /// stops when it falls below its guard threshold.
    fn pole_distance(&self, _state: &Self::State) -> f64 {
        f64::INFINITY
    }
}

/// Spinless RS flow in first-order form on `(x, f)`.
#[derive(Clone, Debug)]
pub struct RsFlow<'a> {
    pub lattice: &'a Lattice,
}

impl VectorField for RsFlow<'_> {
    type State = RsState;

    fn derivative(&self, state: &RsState) -> Result<Vec<Complex64>> {
        let (v, a) = rs_rhs(state, self.lattice)?;
        Ok(v.into_iter().chain(a).collect())
    }

    fn pole_distance(&self, state: &RsState) -> f64 {
        pair_pole_distance(&state.x, state.eta, self.lattice)
    }
}

/// Spin RS flow on `(x, F)`.
#[derive(Clone, Debug)]
pub struct SpinFlow<'a> {
    pub lattice: &'a Lattice,
    pub sign: SignConvention,
}

impl VectorField for SpinFlow<'_> {
    type State = SpinState;

    fn derivative(&self, state: &SpinState) -> Result<Vec<Complex64>> {
        let (v, fdot) = spin_rs_rhs(state, self.lattice, self.sign)?;
        let n = state.n();
        let mut out = v;
        out.extend((0..n * n).map(|k| fdot[(k / n, k % n)]));
        Ok(out)
    }

    fn pole_distance(&self, state: &SpinState) -> f64 {
        pair_pole_distance(&state.x, state.eta, self.lattice)
    }
}

/// The N = 2 leaf flow at fixed `z0`.
#[derive(Clone, Debug)]
pub struct LeafFlow<'a> {
    pub lattice: &'a Lattice,
}

impl VectorField for LeafFlow<'_> {
    type State = N2LeafState;

    fn derivative(&self, state: &N2LeafState) -> Result<Vec<Complex64>> {
        Ok(n2_flow_rhs(state, self.lattice)?.to_vec())
    }

    fn pole_distance(&self, state: &N2LeafState) -> f64 {
        leaf_pole_distance(state, self.lattice)
    }
}

pub(crate) fn leaf_pole_distance(state: &N2LeafState, lattice: &Lattice) -> f64 {
    let d = state.delta();
    [d, state.z0 + d, state.z0 - d]
        .iter()
        .map(|&z| lattice.distance_to_lattice(z))
        .fold(f64::INFINITY, f64::min)
}

/// The same field with time reversed.
#[derive(Clone, Debug)]
pub struct Reversed<F>(pub F);

impl<F: VectorField> VectorField for Reversed<F> {
    type State = F::State;

    fn derivative(&self, state: &Self::State) -> Result<Vec<Complex64>> {
        Ok(self.0.derivative(state)?.into_iter().map(|d| -d).collect())
    }

    fn pole_distance(&self, state: &Self::State) -> f64 {
        self.0.pole_distance(state)
    }
}
