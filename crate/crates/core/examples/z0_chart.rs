// The spectral coordinate z0 of two spin particles: solve det L(z0) = 0,
// invert the chart, and check the spinless point z0 = eta.

use ers::elliptic::Lattice;
use ers::lax::{det_condition_n2, f3_squared_from_z0, solve_z0, N2Data};
use ers::verify::identity8_residual;
use num_complex::Complex64;

pub fn run_example() -> ers::Result<()> {
    let c = |re: f64| Complex64::new(re, 0.0);
    let lattice = Lattice::rectangular(1.0, 1.0)?;
    let mut data = N2Data {
        x1: c(0.62),
        x2: c(0.17),
        f1: c(1.3),
        f2: c(0.8),
        f3_sq: c(0.5),
        eta: c(0.15),
    };
    let sol = solve_z0(&data, None, &lattice)?;
    println!(
        "z0 = {:.12} (paired root {:.12}), residual {:.1e}, {} Newton steps",
        sol.z0, sol.paired_root, sol.residual, sol.newton_iterations
    );
    println!("det condition at -z0: {:.1e}", det_condition_n2(&data, sol.paired_root, &lattice)?.norm());
    let back = f3_squared_from_z0(&data.leaf(sol.z0), &lattice)?;
    println!("f3^2 from z0: {back:.12} (input {})", data.f3_sq);
    println!("identity between the two zeta combinations: {:.1e}", identity8_residual(&data, sol.z0, &lattice)?);

    data.f3_sq = data.f1 * data.f2;
    let spinless = solve_z0(&data, None, &lattice)?;
    println!("spinless data: z0 = {:.12}, eta = {}", spinless.z0, data.eta);

    let rational = N2Data {
        x1: c(1.0),
        x2: c(0.0),
        f1: c(1.0),
        f2: c(1.0),
        f3_sq: c(0.5),
        eta: c(0.5),
    };
    let r = solve_z0(&rational, None, &Lattice::rational())?;
    println!("rational: z0 = {:.12}, closed form {:.12}", r.z0.re, (1.0f64 / 7.0).sqrt());
    Ok(())
}

#[allow(dead_code)]
fn main() -> ers::Result<()> {
    run_example()
}
