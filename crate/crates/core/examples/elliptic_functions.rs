// Weierstrass functions on a skew lattice and on its degenerations.

use ers::elliptic::{sigma_three_term_residual, v_potential, zeta_sigma_residual, Lattice};
use num_complex::Complex64;

pub fn run_example() -> ers::Result<()> {
    let skew = Lattice::elliptic(Complex64::new(1.0, 0.0), Complex64::new(0.3, 1.1))?;
    let z = Complex64::new(0.4, 0.3);
    println!("tau = {:.6}, |q| = {:.3e}", skew.tau(), skew.nome().norm());
    println!("sigma({z}) = {:.12}", skew.sigma(z)?);
    println!("zeta({z})  = {:.12}", skew.zeta(z)?);
    println!("wp({z})    = {:.12}", skew.wp(z)?);
    println!("eta1 = {:.12}, Legendre residual {:.1e}", skew.eta1(), skew.legendre_residual().unwrap_or(0.0));

    let (a, b, c, d) = (
        Complex64::new(0.21, 0.13),
        Complex64::new(-0.37, 0.28),
        Complex64::new(0.44, -0.19),
        Complex64::new(0.05, 0.41),
    );
    let three = sigma_three_term_residual(a, b, c, d, &skew)?;
    let zs = zeta_sigma_residual(a, b, c, &skew)?;
    println!("three-term sigma identity: relative residual {:.2e}", three.relative());
    println!("zeta-sigma identity:       relative residual {:.2e}", zs.relative());

    let x = Complex64::new(0.3, 0.0);
    let eta = Complex64::new(0.2, 0.0);
    for (name, l) in [
        ("square", Lattice::rectangular(1.0, 1.0)?),
        ("trigonometric", Lattice::trigonometric(Complex64::new(1.0, 0.0))?),
        ("rational", Lattice::rational()),
    ] {
        println!("{name:>14}: V({x}) = {:.12}", v_potential(x, eta, &l)?);
    }

    match skew.zeta(Complex64::new(2.0, 0.0)) {
        Err(e) => println!("at a lattice point: {e}"),
        Ok(v) => println!("unexpected value {v}"),
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> ers::Result<()> {
    run_example()
}
