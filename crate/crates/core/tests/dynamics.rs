//! Conservation laws and integrator behavior along the RS, spin RS and leaf
//! flows.

use ers::dynamics::{
    integrate, momenta_to_f, rank_factor_embed, Hamiltonian, IntegratorOptions, LeafFlow, PhaseState, Reversed,
    RsFlow, RsState, SignConvention, SpinFlow, SpinState, VectorField,
};
use ers::elliptic::Lattice;
use ers::lax::{solve_z0, N2Data};
use ers::verify::{random_spin_state, z0_drift, Suite};
use ers::Error;
use nalgebra::DMatrix;
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn precise(samples: usize) -> IntegratorOptions {
    IntegratorOptions::with_tolerances(1e-12, 1e-14).samples(samples)
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

#[derive(Clone, Debug, PartialEq)]
struct Flat(Vec<Complex64>);

impl PhaseState for Flat {
    fn to_flat(&self) -> Vec<Complex64> {
        self.0.clone()
    }
    fn with_flat(&self, y: &[Complex64]) -> Self {
        Flat(y.to_vec())
    }
    fn coordinate_names(&self) -> Vec<String> {
        (0..self.0.len()).map(|i| format!("y{i}")).collect()
    }
}

struct ConstantField(Vec<Complex64>);

impl VectorField for ConstantField {
    type State = Flat;
    fn derivative(&self, _: &Flat) -> ers::Result<Vec<Complex64>> {
        Ok(self.0.clone())
    }
}

/// `y' = i y`, solution `y0 exp(i t)`.
struct Rotation;

impl VectorField for Rotation {
    type State = Flat;
    fn derivative(&self, s: &Flat) -> ers::Result<Vec<Complex64>> {
        Ok(s.0.iter().map(|y| c(0.0, 1.0) * y).collect())
    }
}

#[test]
fn zero_field_leaves_state_unchanged() {
    let y0 = Flat(vec![c(0.3, -1.0), c(2.0, 0.5)]);
    let traj = integrate(&ConstantField(vec![c(0.0, 0.0); 2]), &y0, (0.0, 3.0), &IntegratorOptions::default().samples(5)).unwrap();
    assert!(traj.states.iter().all(|s| *s == y0));
}

#[test]
fn constant_field_is_integrated_exactly() {
    let rate = vec![c(1.5, -0.5), c(-2.0, 0.25)];
    let y0 = Flat(vec![c(0.3, -1.0), c(2.0, 0.5)]);
    let traj = integrate(&ConstantField(rate.clone()), &y0, (1.0, 4.0), &IntegratorOptions::default().samples(13)).unwrap();
    for (t, s) in traj.iter() {
        let expected: Vec<Complex64> = y0.0.iter().zip(&rate).map(|(y, r)| y + r * (t - 1.0)).collect();
        assert!(max_diff(&s.0, &expected) < 1e-13);
    }
}

#[test]
fn tighter_tolerance_reduces_error() {
    let y0 = Flat(vec![c(1.0, 0.0)]);
    let exact = c(0.0, 10.0).exp();
    let err = |tol: f64| {
        let t = integrate(&Rotation, &y0, (0.0, 10.0), &IntegratorOptions::with_tolerances(tol, tol * 1e-2).samples(2)).unwrap();
        (t.last().0[0] - exact).norm()
    };
    let (e8, e9, e13) = (err(1e-8), err(1e-9), err(1e-13));
    assert!(e9 < e8, "{e9} vs {e8}");
    assert!(e13 < 1e-11);
}

#[test]
fn spin_energy_and_trace_conserved_on_n2_and_n3() {
    let lattice = Lattice::rectangular(1.0, 1.0).unwrap();
    let mut rng = Suite::Isospectral.rng(7);
    for n in [2, 3] {
        let state = random_spin_state(&mut rng, n);
        let flow = SpinFlow { lattice: &lattice, sign: SignConvention::Flipped };
        let traj = integrate(&flow, &state, (0.0, 10.0), &precise(41)).unwrap();
        let h0 = state.hamiltonian();
        for s in &traj.states {
            assert!((s.hamiltonian() - h0).norm() / h0.norm() < 1e-8);
            assert!((s.f.trace() - state.f.trace()).norm() / h0.norm() < 1e-10);
        }
    }
}

#[test]
fn rs_velocity_sum_conserved() {
    let lattice = Lattice::elliptic(c(1.0, 0.0), c(0.3, 1.1)).unwrap();
    let eta = c(0.15, 0.0);
    let x = vec![c(0.9, 0.05), c(0.5, 0.03), c(0.1, 0.0)];
    let p = vec![c(0.1, 0.0), c(-0.2, 0.0), c(0.3, 0.0)];
    let state = RsState::new(x.clone(), momenta_to_f(&p, &x, eta, &lattice).unwrap().f, eta).unwrap();
    let traj = integrate(&RsFlow { lattice: &lattice }, &state, (0.0, 5.0), &precise(21)).unwrap();
    let h0 = state.hamiltonian();
    for s in &traj.states {
        assert!((s.hamiltonian() - h0).norm() / h0.norm() < 1e-10);
    }
}

#[test]
fn rank_one_initial_data_stays_rank_one() {
    let lattice = Lattice::rectangular(1.0, 1.0).unwrap();
    let a = vec![vec![c(1.1, 0.0)], vec![c(0.7, 0.0)]];
    let b = vec![vec![c(0.9, 0.0)], vec![c(1.3, 0.0)]];
    let f = rank_factor_embed(&a, &b).unwrap();
    let state = SpinState::new(vec![c(0.6, 0.05), c(0.1, 0.0)], f, c(0.15, 0.0)).unwrap();
    for sign in [SignConvention::Printed, SignConvention::Flipped] {
        let traj = integrate(&SpinFlow { lattice: &lattice, sign }, &state, (0.0, 5.0), &precise(21)).unwrap();
        for s in &traj.states {
            let minor = s.f[(0, 1)] * s.f[(1, 0)] - s.f[(0, 0)] * s.f[(1, 1)];
            assert!(minor.norm() < 1e-8, "{sign:?}: {minor}");
        }
    }
}

#[test]
fn leaf_flow_keeps_z0() {
    let lattice = Lattice::rectangular(1.0, 1.0).unwrap();
    let data = N2Data { x1: c(0.6, 0.05), x2: c(0.2, 0.0), f1: c(1.1, 0.0), f2: c(0.9, 0.0), f3_sq: c(0.36, 0.0), eta: c(0.15, 0.0) };
    let z0 = solve_z0(&data, None, &lattice).unwrap().z0;
    let traj = integrate(&LeafFlow { lattice: &lattice }, &data.leaf(z0), (0.0, 5.0), &precise(21)).unwrap();
    let mut guess = z0;
    for s in &traj.states {
        let d = N2Data::from_leaf(s, &lattice).unwrap();
        let again = solve_z0(&d, Some(guess), &lattice).unwrap().z0;
        assert!((again - z0).norm() < 1e-8);
        guess = again;
    }
    let spin = integrate(&SpinFlow { lattice: &lattice, sign: SignConvention::Flipped }, &data.spin_state(c(1.0, 0.0)), (0.0, 5.0), &precise(21)).unwrap();
    assert!(z0_drift(&spin, &lattice).unwrap() < 1e-8);
}

#[test]
fn forward_then_backward_returns_to_start() {
    let lattice = Lattice::elliptic(c(1.0, 0.0), c(0.3, 1.1)).unwrap();
    let state = SpinState::new(
        vec![c(0.6, 0.05), c(0.1, 0.0)],
        DMatrix::from_row_slice(2, 2, &[c(1.2, 0.0), c(0.7, 0.0), c(0.4, 0.0), c(0.9, 0.0)]),
        c(0.15, 0.0),
    )
    .unwrap();
    let flow = SpinFlow { lattice: &lattice, sign: SignConvention::Flipped };
    let opts = IntegratorOptions::with_tolerances(1e-10, 1e-12).samples(2);
    let forward = integrate(&flow, &state, (0.0, 3.0), &opts).unwrap();
    let back = integrate(&Reversed(flow), forward.last(), (0.0, 3.0), &opts).unwrap();
    assert!(max_diff(&back.last().to_flat(), &state.to_flat()) < 10.0 * 1e-10 * 3.0);
}

#[test]
fn collision_is_reported_not_integrated_through() {
    let lattice = Lattice::rectangular(1.0, 1.0).unwrap();
    let eta = c(0.15, 0.0);
    let state = RsState::new(vec![c(0.1, 0.0), c(0.1 + 0.15 + 1e-8, 0.0)], vec![c(1.0, 0.0); 2], eta).unwrap();
    assert!(matches!(
        integrate(&RsFlow { lattice: &lattice }, &state, (0.0, 1.0), &IntegratorOptions::default()),
        Err(Error::PoleProximity { .. })
    ));
}

#[test]
fn invalid_states_are_rejected() {
    let eta = c(0.15, 0.0);
    assert!(matches!(RsState::new(vec![c(0.0, 0.0)], vec![], eta), Err(Error::Dimension(_))));
    assert!(matches!(RsState::new(vec![c(0.0, 0.0)], vec![c(0.0, 0.0)], eta), Err(Error::InvalidState(_))));
    let lattice = Lattice::rectangular(1.0, 1.0).unwrap();
    let coincident = RsState::new(vec![c(0.2, 0.0), c(2.2, 0.0)], vec![c(1.0, 0.0); 2], eta).unwrap();
    assert!(coincident.validate(&lattice).is_err());
}
