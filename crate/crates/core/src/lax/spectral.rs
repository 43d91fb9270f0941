use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::matrices::{LaxSample, LaxState};
use crate::dynamics::Trajectory;
use crate::elliptic::{BranchDatum, Lattice};
use crate::error::{Error, Result};

/// `tr(L^k)` for each requested order.
pub fn spectral_invariants(sample: &LaxSample, orders: &[u32]) -> Result<Vec<Complex64>> {
    if orders.contains(&0) {
        return Err(Error::Config("spectral invariant orders start at 1".into()));
    }
    let max = orders.iter().copied().max().unwrap_or(0);
    let mut traces = Vec::with_capacity(max as usize);
    let mut power: DMatrix<Complex64> = sample.matrix.clone();
    for k in 1..=max {
        if k > 1 {
            power = &power * &sample.matrix;
        }
        traces.push(power.trace());
    }
    let out: Vec<_> = orders.iter().map(|&k| traces[k as usize - 1]).collect();
    if out.iter().any(|t| !(t.re.is_finite() && t.im.is_finite())) {
        return Err(Error::NonFinite("spectral invariant"));
    }
    Ok(out)
}

/// A snapshot whose Lax matrix could not be formed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkippedSnapshot {
    pub t: f64,
    pub reason: String,
}

/// Drift of `tr(L(z)^k)` along a trajectory, measured against the first
/// snapshot and relative to `max(1, |tr L(z)^k at t0|)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriftReport {
    pub z: Complex64,
    pub orders: Vec<u32>,
    /// Worst relative deviation over all orders and snapshots.
    pub drift: f64,
    /// Worst relative deviation over orders, one entry per snapshot.
    pub per_time: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub skipped: Vec<SkippedSnapshot>,
}

pub fn isospectral_drift<S: LaxState>(
    trajectory: &Trajectory<S>,
    z: Complex64,
    branch: &BranchDatum,
    orders: &[u32],
    lattice: &Lattice,
) -> Result<DriftReport> {
    let reference = spectral_invariants(&trajectory.first().lax(z, branch, lattice)?, orders)?;
    let mut per_time = Vec::with_capacity(trajectory.times.len());
    let mut skipped = Vec::new();
    for (t, state) in trajectory.iter() {
        let inv = state
            .lax(z, branch, lattice)
            .and_then(|s| spectral_invariants(&s, orders));
        match inv {
            Ok(inv) => {
                let worst = inv
                    .iter()
                    .zip(&reference)
                    .map(|(a, b)| (a - b).norm() / b.norm().max(1.0))
                    .fold(0.0, f64::max);
                per_time.push(worst);
            }
            Err(e) => {
                per_time.push(f64::NAN);
                skipped.push(SkippedSnapshot { t, reason: e.to_string() });
            }
        }
    }
    let drift = per_time.iter().copied().filter(|d| d.is_finite()).fold(0.0, f64::max);
    Ok(DriftReport {
        z,
        orders: orders.to_vec(),
        drift,
        per_time,
        skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn traces_of_powers() {
        let m = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0)]);
        let l = Lattice::rational();
        let b = BranchDatum::principal(c(0.3, 0.1), c(0.5, 0.0), &l).unwrap();
        let s = LaxSample {
            z: b.z,
            matrix: m,
            branch: b,
            prefactor_policy: None,
        };
        let t = spectral_invariants(&s, &[1, 2, 3]).unwrap();
        assert_eq!(t[0], c(5.0, 0.0));
        assert_eq!(t[1], c(29.0, 0.0));
        assert_eq!(t[2], c(155.0, 0.0));
        assert!(spectral_invariants(&s, &[0]).is_err());
    }
}
