// Which overall sign of the spin equations keeps the Lax spectrum fixed?
// Integrates both and compares the drift of tr L(z)^k.

use ers::dynamics::{SignConvention, SpinState};
use ers::elliptic::Lattice;
use ers::verify::{calibrate_sign, spin_drift};
use nalgebra::DMatrix;
use num_complex::Complex64;

pub fn run_example() -> ers::Result<()> {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let state = SpinState::new(
        vec![c(0.6, 0.05), c(0.1, 0.0)],
        DMatrix::from_row_slice(2, 2, &[c(1.2, 0.0), c(0.7, 0.0), c(0.4, 0.0), c(0.9, 0.0)]),
        c(0.15, 0.0),
    )?;
    for (name, lattice) in [("square", Lattice::rectangular(1.0, 1.0)?), ("rational", Lattice::rational())] {
        for sign in [SignConvention::Printed, SignConvention::Flipped] {
            let d = spin_drift(&state, sign, 5.0, &lattice)?;
            println!("{name:>8} {sign:?}: isospectral drift {d:.3e}");
        }
        let outcome = calibrate_sign(&state, 5.0, &lattice)?;
        println!("{name:>8} selects {:?}", outcome.selected);
    }

    let diagonal = SpinState::new(state.x.clone(), DMatrix::from_diagonal_element(2, 2, c(1.0, 0.0)), state.eta)?;
    if let Err(e) = calibrate_sign(&diagonal, 5.0, &Lattice::rational()) {
        println!("diagonal F: {e}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> ers::Result<()> {
    run_example()
}
