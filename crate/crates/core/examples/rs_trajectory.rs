// Three spinless particles on the square lattice: integrate, check the
// conserved energy and print a few snapshots.

use ers::dynamics::{integrate, momenta_to_f, Hamiltonian, IntegratorOptions, RsFlow, RsState};
use ers::elliptic::Lattice;
use num_complex::Complex64;

pub fn run_example() -> ers::Result<()> {
    let lattice = Lattice::rectangular(1.0, 1.0)?;
    let eta = Complex64::new(0.15, 0.0);
    let x = vec![Complex64::new(0.9, 0.05), Complex64::new(0.5, 0.03), Complex64::new(0.1, 0.0)];
    let p = vec![Complex64::new(0.1, 0.0), Complex64::new(-0.2, 0.0), Complex64::new(0.3, 0.0)];
    let conversion = momenta_to_f(&p, &x, eta, &lattice)?;
    let state = RsState::new(x, conversion.f, eta)?;

    let opts = IntegratorOptions::with_tolerances(1e-11, 1e-13).samples(6);
    let traj = integrate(&RsFlow { lattice: &lattice }, &state, (0.0, 5.0), &opts)?;
    let h0 = traj.first().hamiltonian();
    for (t, s) in traj.iter() {
        let xs: Vec<String> = s.x.iter().map(|x| format!("{:+.6}", x.re)).collect();
        println!("t = {t:4.1}  x = [{}]  H - H0 = {:.1e}", xs.join(", "), (s.hamiltonian() - h0).norm());
    }
    println!(
        "{} steps ({} rejected), {} field evaluations",
        traj.stats.steps, traj.stats.rejected_steps, traj.stats.rhs_evaluations
    );
    print!("{}", traj.to_csv_string()?.lines().next().unwrap_or_default());
    println!();
    Ok(())
}

#[allow(dead_code)]
fn main() -> ers::Result<()> {
    run_example()
}
