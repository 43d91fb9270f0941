use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::matrices::{det_condition_n2, N2Data};
use crate::dynamics::N2LeafState;
use crate::elliptic::Lattice;
use crate::error::{Error, Result};

/// Residual below which a root of the determinant condition is accepted.
pub const Z0_TOLERANCE: f64 = 1e-10;

const MAX_NEWTON: usize = 50;
const FD_STEP: f64 = 1e-7;
const CONTINUATION_STEPS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Z0Solution {
    /// Normalized root: reduced to the centred cell with nonnegative
    /// coordinate along the first period.
    pub z0: Complex64,
    /// `|det condition|` at `z0`.
    pub residual: f64,
    pub newton_iterations: usize,
    /// `-z0` reduced to the cell; it is the other root.
    pub paired_root: Complex64,
    /// Homotopy steps used (0 when Newton converged from the guess).
    pub continuation_steps: usize,
}

fn newton(g: &dyn Fn(Complex64) -> Result<Complex64>, mut z: Complex64) -> Result<(Complex64, usize, f64)> {
    let mut val = g(z)?;
    for it in 1..=MAX_NEWTON {
        if val.norm() == 0.0 {
            return Ok((z, it - 1, 0.0));
        }
        let h = FD_STEP * z.norm().max(1.0);
        let d = (g(z + h)? - g(z - h)?) / (2.0 * h);
        let step = val / d;
        if !(step.re.is_finite() && step.im.is_finite()) {
            return Err(Error::Newton(format!("derivative vanished at z = {z}")));
        }
        z -= step;
        val = g(z)?;
        if step.norm() < 1e-14 * z.norm().max(1.0) {
            return finish(z, it, val.norm());
        }
    }
    finish(z, MAX_NEWTON, val.norm())
}

fn finish(z: Complex64, iterations: usize, residual: f64) -> Result<(Complex64, usize, f64)> {
    if residual < Z0_TOLERANCE {
        Ok((z, iterations, residual))
    } else {
        Err(Error::Newton(format!(
            "residual {residual:.3e} after {iterations} iterations at z = {z}"
        )))
    }
}

/// Picks the representative of `{z, -z}` modulo the lattice with
/// nonnegative first-period coordinate; ties go to the one nearer `eta`.
pub fn normalize_z0(z: Complex64, eta: Complex64, lattice: &Lattice) -> Complex64 {
    let a = lattice.reduce_to_cell(z);
    let b = lattice.reduce_to_cell(-z);
    let (ra, rb) = (lattice.real_coordinate(a), lattice.real_coordinate(b));
    if (ra - rb).abs() > 1e-12 {
        if ra > rb {
            a
        } else {
            b
        }
    } else if (a - eta).norm() <= (b - eta).norm() {
        a
    } else {
        b
    }
}

/// Finds the root `z0` of the determinant condition.
///
/// Newton from `initial_guess` first; without a guess, or if it fails,
/// continues from the spinless root `z0 = eta` (where `f3^2 = f1 f2`) along
/// `f3^2(t) = f1 f2 + t (f3^2 - f1 f2)`.
pub fn solve_z0(data: &N2Data, initial_guess: Option<Complex64>, lattice: &Lattice) -> Result<Z0Solution> {
    let solved = |z: Complex64, iterations: usize, steps: usize| -> Result<Z0Solution> {
        let z0 = normalize_z0(z, data.eta, lattice);
        let residual = det_condition_n2(data, z0, lattice)?.norm();
        if !(residual < Z0_TOLERANCE) {
            return Err(Error::Newton(format!("residual {residual:.3e} after normalization")));
        }
        Ok(Z0Solution {
            z0,
            residual,
            newton_iterations: iterations,
            paired_root: lattice.reduce_to_cell(-z0),
            continuation_steps: steps,
        })
    };

    if let Some(guess) = initial_guess {
        let g = |z| det_condition_n2(data, z, lattice);
        if let Ok((z, it, _)) = newton(&g, guess) {
            return solved(z, it, 0);
        }
    }

    let spinless = data.f1 * data.f2;
    let mut z = data.eta;
    let mut total = 0;
    for k in 1..=CONTINUATION_STEPS {
        let t = k as f64 / CONTINUATION_STEPS as f64;
        let stage = N2Data {
            f3_sq: spinless + t * (data.f3_sq - spinless),
            ..*data
        };
        let g = |w| det_condition_n2(&stage, w, lattice);
        let (root, it, _) = newton(&g, z)
            .map_err(|e| Error::Newton(format!("continuation step {k}/{CONTINUATION_STEPS}: {e}")))?;
        z = root;
        total += it;
    }
    solved(z, total, CONTINUATION_STEPS)
}

/// `f3^2` on the leaf through `state`:
/// `f1 f2 s(z0)^2/s(eta)^2 * s(D - eta) s(-D - eta) / (s(z0 + D) s(z0 - D))`.
pub fn f3_squared_from_z0(state: &N2LeafState, lattice: &Lattice) -> Result<Complex64> {
    let d = state.delta();
    let (z0, eta) = (state.z0, state.eta);
    lattice.off_lattice(eta, "f3_from_z0")?;
    lattice.off_lattice(z0 + d, "f3_from_z0")?;
    lattice.off_lattice(z0 - d, "f3_from_z0")?;
    let s = |w: Complex64| lattice.sigma(w);
    let ratio = s(z0)? / s(eta)?;
    Ok(state.f1 * state.f2 * ratio * ratio * s(d - eta)? * s(-d - eta)? / (s(z0 + d)? * s(z0 - d)?))
}

/// Principal square root of [`f3_squared_from_z0`]. The sign of `f3` is a
/// gauge choice; only `f3^2` is invariant.
pub fn f3_from_z0(state: &N2LeafState, lattice: &Lattice) -> Result<Complex64> {
    Ok(f3_squared_from_z0(state, lattice)?.sqrt())
}
