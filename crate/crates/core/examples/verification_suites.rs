// Runs every verification suite and prints one line per suite.

use ers::verify::{run_suites, Suite, VerifyOptions};

pub fn run_example() -> ers::Result<()> {
    let reports = run_suites(&Suite::ALL, &VerifyOptions::default())?;
    for r in &reports {
        println!(
            "{:<20} {} worst {:.3e} (tol {:.1e}) {:>8.0} ms",
            r.suite,
            if r.pass { "pass" } else { "FAIL" },
            r.max_residual,
            r.tolerance,
            r.runtime_ms
        );
        for c in r.failed_checks() {
            println!("    failed {}: {:.3e} vs {:.1e}", c.name, c.residual, c.tolerance);
        }
        for n in &r.notes {
            println!("    {n}");
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> ers::Result<()> {
    run_example()
}
