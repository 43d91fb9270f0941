// Drives the library the way the `ers` binary does: a JSON config in,
// trajectory and summary files out.

use ers::cli::{cmd_simulate, cmd_z0, RunConfig};

const CONFIG: &str = r#"{
    "lattice": {"mode": "elliptic", "omega1": [1, 0], "omega3": [0, 1]},
    "eta": [0.15, 0],
    "system": {"kind": "n2-leaf", "x": [[0.6, 0.05], [0.2, 0]], "f": [[1.1, 0], [0.9, 0]], "f3": [0.6, 0]},
    "t_span": [0, 5],
    "rel_tol": 1e-12,
    "abs_tol": 1e-14,
    "sample_count": 51
}"#;

pub fn run_example() -> ers::Result<()> {
    let cfg = RunConfig::from_json(CONFIG)?;
    println!("{}", serde_json::to_string(&cmd_z0(&cfg)?)?);

    let out = std::env::temp_dir().join(format!("ers-run-config-{}", std::process::id()));
    let summary = cmd_simulate(&cfg, &out)?;
    println!(
        "energy drift {:.1e}, z0 drift {:.1e}, sign {:?}",
        summary.energy_drift,
        summary.z0_drift.unwrap_or(f64::NAN),
        summary.config.sign_convention
    );
    for entry in std::fs::read_dir(&out)? {
        let entry = entry?;
        println!("wrote {} ({} bytes)", entry.file_name().to_string_lossy(), entry.metadata()?.len());
    }
    std::fs::remove_dir_all(&out)?;
    Ok(())
}

#[allow(dead_code)]
fn main() -> ers::Result<()> {
    run_example()
}
