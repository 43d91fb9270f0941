//! Lax matrices: gauge invariance, determinant factorization, traces, and
//! isospectral drift along the calibrated and uncalibrated spin flows.

use ers::dynamics::{integrate, IntegratorOptions, RsState, SignConvention, SpinFlow, SpinState};
use ers::elliptic::{phi, BranchDatum, Lattice};
use ers::lax::{
    det_condition_n2, isospectral_drift, lax_gauged_n2, lax_rs, lax_spin, spectral_invariants, N2Data, PrefactorPolicy,
};
use ers::Error;
use nalgebra::DMatrix;
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn sample_data() -> N2Data {
    N2Data { x1: c(0.6, 0.05), x2: c(0.2, 0.0), f1: c(1.1, 0.0), f2: c(0.9, 0.0), f3_sq: c(0.36, 0.0), eta: c(0.15, 0.0) }
}

fn eigen_pair(m: &DMatrix<Complex64>) -> (Complex64, Complex64) {
    let (tr, det) = (m.trace(), m.determinant());
    let disc = (tr * tr - 4.0 * det).sqrt();
    ((tr + disc) / 2.0, (tr - disc) / 2.0)
}

#[test]
fn gauged_matrix_shares_the_spectrum() {
    for lattice in [Lattice::rectangular(1.0, 1.0).unwrap(), Lattice::elliptic(c(1.0, 0.0), c(0.3, 1.1)).unwrap()] {
        let data = sample_data();
        for lambda in [c(1.0, 0.0), c(2.5, 0.0), c(0.4, 0.3)] {
            let spin = data.spin_state(lambda);
            for k in 0..20 {
                let z = c(0.05 + 0.043 * k as f64, 0.2 + 0.031 * k as f64);
                let b = BranchDatum::principal(z, data.eta, &lattice).unwrap();
                let l = lax_spin(&spin, z, &b, &lattice).unwrap().matrix;
                let g = lax_gauged_n2(&data, z, &b, PrefactorPolicy::WithSqrtPrefactor, &lattice).unwrap().matrix;
                let (a1, a2) = eigen_pair(&l);
                let (b1, b2) = eigen_pair(&g);
                let err = ((a1 - b1).norm() + (a2 - b2).norm()).min((a1 - b2).norm() + (a2 - b1).norm());
                assert!(err < 1e-10 * a1.norm().max(a2.norm()).max(1.0), "z = {z}: {err}");
            }
        }
    }
}

#[test]
fn stripped_determinant_is_the_det_condition() {
    let lattice = Lattice::elliptic(c(1.0, 0.0), c(0.3, 1.1)).unwrap();
    let data = sample_data();
    for z in [c(0.31, 0.47), c(-0.2, 0.6), c(0.7, -0.1)] {
        let b = BranchDatum::principal(z, data.eta, &lattice).unwrap();
        let det = lax_gauged_n2(&data, z, &b, PrefactorPolicy::Stripped, &lattice).unwrap().matrix.determinant();
        let cond = det_condition_n2(&data, z, &lattice).unwrap();
        assert!((det - cond).norm() < 1e-12 * cond.norm().max(1.0));
    }
}

#[test]
fn trace_is_energy_times_kernel_at_minus_eta() {
    let lattice = Lattice::rectangular(1.0, 1.0).unwrap();
    let eta = c(0.15, 0.0);
    let state = RsState::new(vec![c(0.9, 0.05), c(0.5, 0.03), c(0.1, 0.0)], vec![c(1.1, 0.0), c(0.8, 0.0), c(1.4, 0.0)], eta).unwrap();
    let z = c(0.31, 0.47);
    let b = BranchDatum::principal(z, eta, &lattice).unwrap();
    let l = lax_rs(&state, z, &b, &lattice).unwrap();
    let h: Complex64 = state.f.iter().sum();
    let expected = h * phi(-eta, z, eta, &lattice, &b).unwrap();
    assert!((l.matrix.trace() - expected).norm() < 1e-12 * expected.norm());
    let inv = spectral_invariants(&l, &[1, 2]).unwrap();
    assert!((inv[0] - l.matrix.trace()).norm() < 1e-12 * expected.norm());
    assert!((inv[1] - (&l.matrix * &l.matrix).trace()).norm() < 1e-12 * inv[1].norm());
    assert!(spectral_invariants(&l, &[0]).is_err());
}

#[test]
fn spin_lax_with_rank_one_spin_is_the_spinless_one() {
    let lattice = Lattice::rectangular(1.0, 1.0).unwrap();
    let eta = c(0.15, 0.0);
    let f = [c(1.1, 0.0), c(0.8, 0.0)];
    let rs = RsState::new(vec![c(0.5, 0.05), c(0.1, 0.0)], f.to_vec(), eta).unwrap();
    let spin = SpinState::new(rs.x.clone(), DMatrix::from_fn(2, 2, |i, _| f[i]), eta).unwrap();
    let z = c(0.31, 0.47);
    let b = BranchDatum::principal(z, eta, &lattice).unwrap();
    let a = lax_rs(&rs, z, &b, &lattice).unwrap().matrix;
    let s = lax_spin(&spin, z, &b, &lattice).unwrap().matrix;
    assert!((a - s).norm() < 1e-14);
}

#[test]
fn only_one_sign_is_isospectral() {
    let lattice = Lattice::rectangular(1.0, 1.0).unwrap();
    let state = SpinState::new(
        vec![c(0.9, 0.05), c(0.5, 0.03), c(0.1, 0.0)],
        DMatrix::from_fn(3, 3, |i, j| if i == j { c(1.0 + 0.2 * i as f64, 0.0) } else { c(0.3 + 0.1 * (i + j) as f64, 0.0) }),
        c(0.15, 0.0),
    )
    .unwrap();
    let z = c(0.31, 0.47);
    let b = BranchDatum::principal(z, state.eta, &lattice).unwrap();
    let opts = IntegratorOptions::with_tolerances(1e-12, 1e-14).samples(11);
    let drift = |sign| {
        let traj = integrate(&SpinFlow { lattice: &lattice, sign }, &state, (0.0, 5.0), &opts).unwrap();
        isospectral_drift(&traj, z, &b, &[1, 2, 3], &lattice).unwrap().drift
    };
    assert!(drift(SignConvention::Flipped) < 1e-8);
    assert!(drift(SignConvention::Printed) > 1e-3);
}

#[test]
fn lax_rejects_spectral_points_on_the_cut_ends() {
    let lattice = Lattice::rectangular(1.0, 1.0).unwrap();
    let eta = c(0.15, 0.0);
    assert!(matches!(BranchDatum::principal(eta, eta, &lattice), Err(Error::Domain { .. })));
    assert!(matches!(BranchDatum::principal(-eta + c(2.0, 0.0), eta, &lattice), Err(Error::Domain { .. })));
}
