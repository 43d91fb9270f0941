// The spinless N-body two-form: assemble it under both pair-potential
// signs, integrate its Hamiltonian flow, and compare with the RS equations.

use ers::dynamics::RsState;
use ers::elliptic::Lattice;
use ers::verify::{general_n_spinless_form_check, spinless_limit_test, PairPotentialSign};
use num_complex::Complex64;

pub fn run_example() -> ers::Result<()> {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let eta = c(0.15, 0.0);
    let n3 = RsState::new(vec![c(0.9, 0.05), c(0.55, 0.03), c(0.2, 0.0)], vec![c(1.1, 0.0), c(0.8, 0.0), c(1.4, 0.0)], eta)?;
    let n2 = RsState::new(vec![c(0.7, 0.04), c(0.2, 0.0)], vec![c(1.2, 0.0), c(0.9, 0.0)], eta)?;
    for (state, lattice, t_end, tol) in [
        (&n2, Lattice::rational(), 3.0, 1e-8),
        (&n3, Lattice::rectangular(1.0, 1.0)?, 2.0, 1e-6),
    ] {
        let r = general_n_spinless_form_check(state, t_end, tol, PairPotentialSign::Negated, &lattice)?;
        println!("N = {} ({:?}): {}", state.n(), lattice.mode(), if r.pass { "pass" } else { "FAIL" });
        for n in &r.notes {
            println!("    {n}");
        }
    }

    let lattice = Lattice::rectangular(1.0, 1.0)?;
    let r = spinless_limit_test(n2.x[0], n2.x[1], n2.f[0], n2.f[1], eta, &lattice)?;
    println!("spinless limit of the two-particle leaf form: {}", if r.pass { "pass" } else { "FAIL" });
    for check in &r.checks {
        println!("    {:<26} {:.2e}", check.name, check.residual);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> ers::Result<()> {
    run_example()
}
