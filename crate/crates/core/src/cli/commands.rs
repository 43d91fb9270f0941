use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::config::{InitialState, RunConfig};
use crate::dynamics::{
    integrate, Hamiltonian, IntegratorStats, PhaseState, RsFlow, SignConvention, SpinFlow, Trajectory,
    VectorField,
};
use crate::error::{Error, Result};
use crate::lax::{det_condition_n2, f3_squared_from_z0, solve_z0, N2Data};
use crate::verify::{calibrated_sign, run_suites, z0_drift, SignChoice, Suite, SymplecticFlow, VerificationReport, VerifyOptions};

pub const TRAJECTORY_CSV: &str = "trajectory.csv";
pub const TRAJECTORY_JSON: &str = "trajectory.json";
pub const SUMMARY_JSON: &str = "summary.json";
pub const REPORTS_JSON: &str = "reports.json";

/// What `simulate` writes next to the trajectory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    /// The config with every automatic choice resolved; running it again
    /// reproduces the trajectory.
    pub config: RunConfig,
    pub system: String,
    pub energy_initial: Complex64,
    pub energy_final: Complex64,
    /// Largest `|H(t) - H(0)| / max(1, |H(0)|)` over the snapshots.
    pub energy_drift: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z0: Option<Complex64>,
    /// Largest distance of the re-solved `z0` from its initial value along
    /// the (embedded) N = 2 spin trajectory.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z0_drift: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cut_crossings: Vec<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub stats: IntegratorStats,
    pub samples: usize,
}

fn resolve_sign(cfg: &RunConfig) -> Result<SignConvention> {
    match cfg.sign_convention.fixed() {
        Some(s) => Ok(s),
        None => calibrated_sign(cfg.seed()),
    }
}

fn write_trajectory<S: PhaseState + Serialize>(traj: &Trajectory<S>, out: &Path) -> Result<()> {
    traj.write_csv(BufWriter::new(File::create(out.join(TRAJECTORY_CSV))?))?;
    traj.write_json(&out.join(TRAJECTORY_JSON))
}

fn run<F>(field: &F, initial: &F::State, cfg: &RunConfig) -> Result<Trajectory<F::State>>
where
    F: VectorField,
{
    integrate(field, initial, cfg.t_span(), &cfg.integrator_options())
}

fn drift<S: Hamiltonian>(traj: &Trajectory<S>) -> (Complex64, Complex64, f64) {
    let h0 = traj.first().hamiltonian();
    let worst = traj
        .states
        .iter()
        .map(|s| (s.hamiltonian() - h0).norm() / h0.norm().max(1.0))
        .fold(0.0, f64::max);
    (h0, traj.last().hamiltonian(), worst)
}

/// Integrates the configured system and writes `trajectory.csv`,
/// `trajectory.json` and `summary.json` under `out`.
pub fn cmd_simulate(cfg: &RunConfig, out: &Path) -> Result<Summary> {
    cfg.validate()?;
    let lattice = cfg.lattice()?;
    let sign = resolve_sign(cfg)?;
    let mut resolved = cfg.clone();
    resolved.sign_convention = match sign {
        SignConvention::Printed => SignChoice::Printed,
        SignConvention::Flipped => SignChoice::Flipped,
    };
    resolved.seed = Some(cfg.seed());
    std::fs::create_dir_all(out)?;

    let mut notes = Vec::new();
    let initial = InitialState::build(cfg, &lattice)?;
    let summary = match initial {
        InitialState::Rs { state, cut_crossings } => {
            let traj = run(&RsFlow { lattice: &lattice }, &state, cfg)?;
            write_trajectory(&traj, out)?;
            let (h0, h1, energy_drift) = drift(&traj);
            Summary {
                config: resolved,
                system: "rs".into(),
                energy_initial: h0,
                energy_final: h1,
                energy_drift,
                z0: None,
                z0_drift: None,
                cut_crossings,
                notes,
                stats: traj.stats.clone(),
                samples: traj.times.len(),
            }
        }
        InitialState::Spin(state) => {
            let traj = run(&SpinFlow { lattice: &lattice, sign }, &state, cfg)?;
            write_trajectory(&traj, out)?;
            let (h0, h1, energy_drift) = drift(&traj);
            let (mut z0, mut z0d) = (None, None);
            if state.n() == 2 {
                match solve_z0(&N2Data::from_spin(&state)?, None, &lattice).and_then(|s| Ok((s.z0, z0_drift(&traj, &lattice)?))) {
                    Ok((z, d)) => {
                        z0 = Some(z);
                        z0d = Some(d);
                    }
                    Err(e) => notes.push(format!("z0 not tracked: {e}")),
                }
            }
            Summary {
                config: resolved,
                system: "spin-rs".into(),
                energy_initial: h0,
                energy_final: h1,
                energy_drift,
                z0,
                z0_drift: z0d,
                cut_crossings: Vec::new(),
                notes,
                stats: traj.stats.clone(),
                samples: traj.times.len(),
            }
        }
        InitialState::Leaf { state, data } => {
            let field = SymplecticFlow {
                lattice: &lattice,
                convention: cfg.w_convention,
            };
            let traj = run(&field, &state, cfg)?;
            write_trajectory(&traj, out)?;
            let (h0, h1, energy_drift) = drift(&traj);
            let companion = run(&SpinFlow { lattice: &lattice, sign }, &data.spin_state(Complex64::new(1.0, 0.0)), cfg)?;
            let z0d = z0_drift(&companion, &lattice)?;
            notes.push(format!(
                "z0 drift measured along the spin flow of the embedded state; W convention {}",
                cfg.w_convention.name()
            ));
            Summary {
                config: resolved,
                system: "n2-leaf".into(),
                energy_initial: h0,
                energy_final: h1,
                energy_drift,
                z0: Some(state.z0),
                z0_drift: Some(z0d),
                cut_crossings: Vec::new(),
                notes,
                stats: traj.stats.clone(),
                samples: traj.times.len(),
            }
        }
    };
    std::fs::write(out.join(SUMMARY_JSON), serde_json::to_string_pretty(&summary)?)?;
    Ok(summary)
}

/// Runs the suites and writes `reports.json` under `out` (if given).
pub fn cmd_verify(suites: &[Suite], opts: &VerifyOptions, out: Option<&Path>) -> Result<Vec<VerificationReport>> {
    let reports = run_suites(suites, opts)?;
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join(REPORTS_JSON), serde_json::to_string_pretty(&reports)?)?;
    }
    Ok(reports)
}

/// Result of `z0`: the solved root for `f3` input, or `f3` for `z0` input.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "solved", rename_all = "kebab-case")]
pub enum Z0Output {
    Z0 {
        z0: Complex64,
        paired_root: Complex64,
        residual: f64,
        newton_iterations: usize,
        continuation_steps: usize,
    },
    F3 {
        f3: Complex64,
        f3_squared: Complex64,
        /// `|det condition|` at the given `z0` with the recovered `f3^2`.
        residual: f64,
        newton_iterations: usize,
    },
}

/// Solves the N = 2 chart in whichever direction the config asks for.
pub fn cmd_z0(cfg: &RunConfig) -> Result<Z0Output> {
    use super::config::SystemConfig;
    cfg.validate()?;
    let lattice = cfg.lattice()?;
    let SystemConfig::N2Leaf { x, f, f3, z0 } = &cfg.system else {
        return Err(Error::Config("z0 needs an n2-leaf system".into()));
    };
    let mut data = N2Data {
        x1: x[0],
        x2: x[1],
        f1: f[0],
        f2: f[1],
        f3_sq: Complex64::new(0.0, 0.0),
        eta: cfg.eta,
    };
    match (f3, z0) {
        (Some(f3), None) => {
            data.f3_sq = f3 * f3;
            let s = solve_z0(&data, None, &lattice)?;
            Ok(Z0Output::Z0 {
                z0: s.z0,
                paired_root: s.paired_root,
                residual: s.residual,
                newton_iterations: s.newton_iterations,
                continuation_steps: s.continuation_steps,
            })
        }
        (None, Some(z0)) => {
            let f3_sq = f3_squared_from_z0(&data.leaf(*z0), &lattice)?;
            data.f3_sq = f3_sq;
            Ok(Z0Output::F3 {
                f3: f3_sq.sqrt(),
                f3_squared: f3_sq,
                residual: det_condition_n2(&data, *z0, &lattice)?.norm(),
                newton_iterations: 0,
            })
        }
        _ => Err(Error::Config("n2-leaf: give exactly one of f3, z0".into())),
    }
}

/// Default output directory.
pub fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}
