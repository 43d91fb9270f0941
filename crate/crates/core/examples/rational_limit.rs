// Rational backend: the three two-particle descriptions agree, and the
// spin flow only sees f12 f21, so rescaling f12 -> f12 / lambda,
// f21 -> f21 lambda leaves the observable trajectory alone.

use ers::dynamics::SignConvention;
use ers::elliptic::Lattice;
use ers::lax::{solve_z0, N2Data};
use ers::verify::rational_limit_check;
use num_complex::Complex64;

pub fn run_example() -> ers::Result<()> {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let lattice = Lattice::rational();
    let data = N2Data {
        x1: c(1.0, 0.05),
        x2: c(0.0, 0.0),
        f1: c(1.0, 0.0),
        f2: c(1.0, 0.0),
        f3_sq: c(0.5, 0.0),
        eta: c(0.5, 0.0),
    };
    let leaf = data.leaf(solve_z0(&data, None, &lattice)?.z0);
    println!("z0 = {:.12}", leaf.z0);
    for lambda in [1.0, 2.5, 10.0] {
        let r = rational_limit_check(&leaf, c(lambda, 0.0), SignConvention::Flipped)?;
        let gauge = r.check("gauge-trajectory").map_or(f64::NAN, |c| c.residual);
        println!("lambda = {lambda:>4}: {} (trajectory gap {gauge:.1e})", if r.pass { "pass" } else { "FAIL" });
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> ers::Result<()> {
    run_example()
}
