use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{N2LeafState, RsState, SpinState};
use crate::elliptic::{phi, BranchDatum, Lattice};
use crate::error::{Error, Result};

/// Whether the gauged N = 2 matrix carries its overall
/// `(sigma(z + eta) sigma(z - eta))^{-1/2}` factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PrefactorPolicy {
    WithSqrtPrefactor,
    Stripped,
}

/// A Lax matrix evaluated at spectral point `z` on the sheet fixed by `branch`.
#[derive(Clone, Debug, PartialEq)]
pub struct LaxSample {
    pub z: Complex64,
    pub matrix: DMatrix<Complex64>,
    pub branch: BranchDatum,
    /// Only set for the gauged N = 2 matrix.
    pub prefactor_policy: Option<PrefactorPolicy>,
}

fn kernel_matrix(
    x: &[Complex64],
    eta: Complex64,
    z: Complex64,
    branch: &BranchDatum,
    lattice: &Lattice,
    coefficient: impl Fn(usize, usize) -> Complex64,
) -> Result<DMatrix<Complex64>> {
    let n = x.len();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = coefficient(i, j) * phi(x[i] - x[j] - eta, z, eta, lattice, branch)?;
        }
    }
    Ok(m)
}

/// `L_ij = f_i Phi(x_i - x_j - eta, z)`.
pub fn lax_rs(state: &RsState, z: Complex64, branch: &BranchDatum, lattice: &Lattice) -> Result<LaxSample> {
    let matrix = kernel_matrix(&state.x, state.eta, z, branch, lattice, |i, _| state.f[i])?;
    Ok(LaxSample {
        z,
        matrix,
        branch: *branch,
        prefactor_policy: None,
    })
}

/// `L_ij = f_ij Phi(x_i - x_j - eta, z)`.
pub fn lax_spin(state: &SpinState, z: Complex64, branch: &BranchDatum, lattice: &Lattice) -> Result<LaxSample> {
    let matrix = kernel_matrix(&state.x, state.eta, z, branch, lattice, |i, j| state.f[(i, j)])?;
    Ok(LaxSample {
        z,
        matrix,
        branch: *branch,
        prefactor_policy: None,
    })
}

/// States that carry a Lax matrix.
pub trait LaxState {
    fn lax(&self, z: Complex64, branch: &BranchDatum, lattice: &Lattice) -> Result<LaxSample>;
}

impl LaxState for RsState {
    fn lax(&self, z: Complex64, branch: &BranchDatum, lattice: &Lattice) -> Result<LaxSample> {
        lax_rs(self, z, branch, lattice)
    }
}

impl LaxState for SpinState {
    fn lax(&self, z: Complex64, branch: &BranchDatum, lattice: &Lattice) -> Result<LaxSample> {
        lax_spin(self, z, branch, lattice)
    }
}

/// Two-particle spin data `(x1, x2, f1 = f11, f2 = f22, f3^2 = f12 f21)`.
///
/// Only `f3^2` enters the spectrum, so it is stored instead of `f3`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct N2Data {
    pub x1: Complex64,
    pub x2: Complex64,
    pub f1: Complex64,
    pub f2: Complex64,
    pub f3_sq: Complex64,
    pub eta: Complex64,
}

impl N2Data {
    pub fn from_spin(state: &SpinState) -> Result<Self> {
        if state.n() != 2 {
            return Err(Error::Dimension(format!("expected N = 2, got N = {}", state.n())));
        }
        Ok(N2Data {
            x1: state.x[0],
            x2: state.x[1],
            f1: state.f[(0, 0)],
            f2: state.f[(1, 1)],
            f3_sq: state.f[(0, 1)] * state.f[(1, 0)],
            eta: state.eta,
        })
    }

    /// Reconstructs `f3^2` from the leaf coordinate `z0`.
    pub fn from_leaf(state: &N2LeafState, lattice: &Lattice) -> Result<Self> {
        Ok(N2Data {
            x1: state.x1,
            x2: state.x2,
            f1: state.f1,
            f2: state.f2,
            f3_sq: super::z0::f3_squared_from_z0(state, lattice)?,
            eta: state.eta,
        })
    }

    pub fn delta(&self) -> Complex64 {
        self.x1 - self.x2
    }

    /// Principal square root of `f3^2`.
    pub fn f3(&self) -> Complex64 {
        self.f3_sq.sqrt()
    }

    /// Leaf state with the given `z0`.
    pub fn leaf(&self, z0: Complex64) -> N2LeafState {
        N2LeafState {
            x1: self.x1,
            x2: self.x2,
            f1: self.f1,
            f2: self.f2,
            z0,
            eta: self.eta,
        }
    }

    /// A spin state with `f12 = f3 / lambda`, `f21 = f3 lambda`.
    pub fn spin_state(&self, lambda: Complex64) -> SpinState {
        let f3 = self.f3();
        SpinState {
            x: vec![self.x1, self.x2],
            f: DMatrix::from_row_slice(2, 2, &[self.f1, f3 / lambda, f3 * lambda, self.f2]),
            eta: self.eta,
        }
    }
}

/// The 2x2 matrix obtained from `lax_spin` by a diagonal gauge built from
/// `Phi(x_i, z)`:
///
/// ```text
/// L11 = -f1 s(z)/s(eta),   L22 = -f2 s(z)/s(eta)
/// L12 = f3 s(z - x1 + x2) s(z + x1 + eta) s(x2) / (s(x2 - x1 - eta) s(z + x2 + eta) s(x1))
/// L21 = f3 s(z + x1 - x2) s(z + x2 + eta) s(x1) / (s(x1 - x2 - eta) s(z + x1 + eta) s(x2))
/// ```
///
/// times `1 / sqrt(s(z + eta) s(z - eta))` unless the policy is `Stripped`;
/// the square root is taken on the sheet selected by `branch`.
pub fn lax_gauged_n2(
    data: &N2Data,
    z: Complex64,
    branch: &BranchDatum,
    policy: PrefactorPolicy,
    lattice: &Lattice,
) -> Result<LaxSample> {
    branch.check(z, data.eta)?;
    let (x1, x2, eta) = (data.x1, data.x2, data.eta);
    for w in [eta, x1, x2, x2 - x1 - eta, x1 - x2 - eta, z + x1 + eta, z + x2 + eta] {
        lattice.off_lattice(w, "lax_gauged_n2")?;
    }
    let s = |w: Complex64| lattice.sigma(w);
    let f3 = data.f3();
    let diag = s(z)? / s(eta)?;
    let l12 = f3 * s(z - x1 + x2)? * s(z + x1 + eta)? * s(x2)?
        / (s(x2 - x1 - eta)? * s(z + x2 + eta)? * s(x1)?);
    let l21 = f3 * s(z + x1 - x2)? * s(z + x2 + eta)? * s(x1)?
        / (s(x1 - x2 - eta)? * s(z + x1 + eta)? * s(x2)?);
    let mut matrix = DMatrix::from_row_slice(2, 2, &[-data.f1 * diag, l12, l21, -data.f2 * diag]);
    if policy == PrefactorPolicy::WithSqrtPrefactor {
        lattice.off_lattice(z + eta, "lax_gauged_n2")?;
        lattice.off_lattice(z - eta, "lax_gauged_n2")?;
        matrix /= branch.sqrt_sigma_product(lattice)?;
    }
    Ok(LaxSample {
        z,
        matrix,
        branch: *branch,
        prefactor_policy: Some(policy),
    })
}

/// `f1 f2 s(z)^2 / s(eta)^2 - f3^2 s(z + D) s(z - D) / (s(D - eta) s(-D - eta))`, `D = x1 - x2`.
///
/// Its zeros in `z` are `+-z0`; it equals the determinant of the stripped
/// gauged matrix.
pub fn det_condition_n2(data: &N2Data, z: Complex64, lattice: &Lattice) -> Result<Complex64> {
    let d = data.delta();
    let eta = data.eta;
    lattice.off_lattice(eta, "det_condition_n2")?;
    lattice.off_lattice(d - eta, "det_condition_n2")?;
    lattice.off_lattice(-d - eta, "det_condition_n2")?;
    let s = |w: Complex64| lattice.sigma(w);
    let sz = s(z)?;
    let se = s(eta)?;
    Ok(data.f1 * data.f2 * sz * sz / (se * se)
        - data.f3_sq * s(z + d)? * s(z - d)? / (s(d - eta)? * s(-d - eta)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn setup() -> (Lattice, Complex64, Complex64, BranchDatum) {
        let l = Lattice::rectangular(1.0, 1.0).unwrap();
        let (z, eta) = (c(0.45, 0.35), c(0.3, 0.05));
        let b = BranchDatum::principal(z, eta, &l).unwrap();
        (l, z, eta, b)
    }

    #[test]
    fn one_particle_lax_matrix() {
        let (l, z, eta, b) = setup();
        let s = RsState::new(vec![c(0.2, 0.0)], vec![c(1.7, 0.0)], eta).unwrap();
        let m = lax_rs(&s, z, &b, &l).unwrap().matrix;
        assert_eq!(m.shape(), (1, 1));
        assert_eq!(m[(0, 0)], c(1.7, 0.0) * phi(-eta, z, eta, &l, &b).unwrap());
    }

    #[test]
    fn diagonal_carries_common_kernel() {
        let (l, z, eta, b) = setup();
        let s = RsState::new(vec![c(0.6, 0.05), c(0.1, 0.0), c(-0.3, 0.1)], vec![c(1.0, 0.0), c(0.7, 0.2), c(1.3, 0.0)], eta)
            .unwrap();
        let m = lax_rs(&s, z, &b, &l).unwrap().matrix;
        let p = phi(-eta, z, eta, &l, &b).unwrap();
        for i in 0..3 {
            assert_eq!(m[(i, i)], s.f[i] * p);
        }
    }

    #[test]
    fn zero_interaction_matrix_gives_zero_lax() {
        let (l, z, eta, b) = setup();
        let s = SpinState::new(vec![c(0.6, 0.0), c(0.1, 0.0)], DMatrix::zeros(2, 2), eta).unwrap();
        assert!(lax_spin(&s, z, &b, &l).unwrap().matrix.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn gauged_matrix_without_spin_coupling_is_diagonal() {
        let (l, z, eta, b) = setup();
        let d = N2Data {
            x1: c(0.6, 0.05),
            x2: c(0.1, 0.0),
            f1: c(1.0, 0.0),
            f2: c(1.1, 0.0),
            f3_sq: c(0.0, 0.0),
            eta,
        };
        let m = lax_gauged_n2(&d, z, &b, PrefactorPolicy::Stripped, &l).unwrap().matrix;
        assert_eq!(m[(0, 1)], c(0.0, 0.0));
        assert_eq!(m[(1, 0)], c(0.0, 0.0));
        let ratio = l.sigma(z).unwrap() / l.sigma(eta).unwrap();
        let det = m[(0, 0)] * m[(1, 1)];
        assert!((det - d.f1 * d.f2 * ratio * ratio).norm() < 1e-13 * det.norm());
    }

    #[test]
    fn det_condition_is_even_and_matches_stripped_determinant() {
        let (l, z, eta, b) = setup();
        let d = N2Data {
            x1: c(0.6, 0.05),
            x2: c(0.1, 0.0),
            f1: c(1.0, 0.1),
            f2: c(1.1, 0.0),
            f3_sq: c(0.54, -0.1),
            eta,
        };
        let v = det_condition_n2(&d, z, &l).unwrap();
        assert!((v - det_condition_n2(&d, -z, &l).unwrap()).norm() < 1e-13 * v.norm());
        let m = lax_gauged_n2(&d, z, &b, PrefactorPolicy::Stripped, &l).unwrap().matrix;
        let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
        assert!((det - v).norm() < 1e-12 * v.norm());
    }

    #[test]
    fn spinless_det_condition_vanishes_at_eta() {
        let l = Lattice::rectangular(1.0, 1.0).unwrap();
        let d = N2Data {
            x1: c(0.55, 0.0),
            x2: c(0.1, 0.0),
            f1: c(1.3, 0.0),
            f2: c(0.8, 0.0),
            f3_sq: c(1.04, 0.0),
            eta: c(0.15, 0.0),
        };
        assert!(det_condition_n2(&d, d.eta, &l).unwrap().norm() < 1e-12);
    }

    #[test]
    fn det_condition_without_coupling_has_double_zero_at_origin() {
        let l = Lattice::rectangular(1.0, 1.0).unwrap();
        let d = N2Data {
            x1: c(0.55, 0.0),
            x2: c(0.1, 0.0),
            f1: c(1.3, 0.0),
            f2: c(0.8, 0.0),
            f3_sq: c(0.0, 0.0),
            eta: c(0.15, 0.0),
        };
        assert_eq!(det_condition_n2(&d, c(0.0, 0.0), &l).unwrap(), c(0.0, 0.0));
        let h = 1e-4;
        let v = det_condition_n2(&d, c(h, 0.0), &l).unwrap();
        // quadratic: f1 f2 h^2 / sigma(eta)^2
        let se = l.sigma(d.eta).unwrap();
        assert!((v / (h * h) - d.f1 * d.f2 / (se * se)).norm() < 1e-6);
    }
}
