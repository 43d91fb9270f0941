// Two spin particles three ways: the leaf flow, the Hamiltonian flow of
// the leaf two-form, and the spin equations. All three trajectories agree.

use ers::dynamics::SignConvention;
use ers::elliptic::Lattice;
use ers::lax::{solve_z0, N2Data};
use ers::verify::{flow_equivalence_test, leaf_coupling, WConvention};
use num_complex::Complex64;

pub fn run_example() -> ers::Result<()> {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let lattice = Lattice::rectangular(1.0, 1.0)?;
    let data = N2Data {
        x1: c(0.6, 0.05),
        x2: c(0.2, 0.0),
        f1: c(1.1, 0.0),
        f2: c(0.9, 0.0),
        f3_sq: c(0.36, 0.0),
        eta: c(0.15, 0.0),
    };
    let leaf = data.leaf(solve_z0(&data, None, &lattice)?.z0);
    for convention in [WConvention::OddCombination, WConvention::TwoVTilde] {
        println!("W ({}) = {:.10}", convention.name(), leaf_coupling(&leaf, convention, &lattice)?);
    }
    for convention in [WConvention::OddCombination, WConvention::TwoVTilde] {
        let r = flow_equivalence_test(&leaf, 5.0, 1e-6, SignConvention::Flipped, convention, &lattice)?;
        println!("{}: {}", convention.name(), if r.pass { "all descriptions agree" } else { "mismatch" });
        for check in &r.checks {
            println!("    {:<24} {:.2e} (< {:.0e})", check.name, check.residual, check.tolerance);
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> ers::Result<()> {
    run_example()
}
