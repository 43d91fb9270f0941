// Lax matrices along a spin trajectory: traces of powers stay fixed, and
// the gauged 2x2 matrix has the same spectrum as the original one.

use ers::dynamics::{integrate, IntegratorOptions, SignConvention, SpinFlow, SpinState};
use ers::elliptic::{BranchDatum, Lattice};
use ers::lax::{isospectral_drift, lax_gauged_n2, lax_spin, spectral_invariants, N2Data, PrefactorPolicy};
use nalgebra::DMatrix;
use num_complex::Complex64;

pub fn run_example() -> ers::Result<()> {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let lattice = Lattice::rectangular(1.0, 1.0)?;
    let state = SpinState::new(
        vec![c(0.6, 0.05), c(0.1, 0.0)],
        DMatrix::from_row_slice(2, 2, &[c(1.2, 0.0), c(0.7, 0.0), c(0.4, 0.0), c(0.9, 0.0)]),
        c(0.15, 0.0),
    )?;
    let z = c(0.31, 0.47);
    let branch = BranchDatum::principal(z, state.eta, &lattice)?;

    let l = lax_spin(&state, z, &branch, &lattice)?;
    let g = lax_gauged_n2(&N2Data::from_spin(&state)?, z, &branch, PrefactorPolicy::WithSqrtPrefactor, &lattice)?;
    println!("tr L = {:.10}, tr L_gauged = {:.10}", l.matrix.trace(), g.matrix.trace());
    println!("det L = {:.10}, det L_gauged = {:.10}", l.matrix.determinant(), g.matrix.determinant());
    println!("tr L^k, k = 1..3: {:?}", spectral_invariants(&l, &[1, 2, 3])?);

    let opts = IntegratorOptions::with_tolerances(1e-12, 1e-14).samples(11);
    let traj = integrate(&SpinFlow { lattice: &lattice, sign: SignConvention::Flipped }, &state, (0.0, 5.0), &opts)?;
    let report = isospectral_drift(&traj, z, &branch, &[1, 2], &lattice)?;
    println!("{}", serde_json::to_string(&report)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> ers::Result<()> {
    run_example()
}
