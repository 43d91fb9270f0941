use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::state::{N2LeafState, RsState, SpinState};
use crate::elliptic::{v_potential, Lattice};
use crate::error::{Error, Result};

/// Overall sign of the right-hand side of the spin equations
/// `fdot_ij = s * [sum_{k != j} f_ik f_kj V(x_j - x_k) - sum_{k != i} f_ik f_kj V(x_k - x_i)]`.
///
/// `Printed` is `s = +1` with `V(x) = zeta(x + eta) - zeta(x)`; `Flipped` is
/// `s = -1`, equivalently the printed formula with `V(x) = zeta(x) - zeta(x + eta)`.
/// Only one of them makes `L_ij = f_ij Phi(x_i - x_j - eta, z)` isospectral;
/// see [`crate::verify::sign_calibration`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignConvention {
    Printed,
    Flipped,
}

impl SignConvention {
    pub fn factor(self) -> f64 {
        match self {
            SignConvention::Printed => 1.0,
            SignConvention::Flipped => -1.0,
        }
    }

    pub fn other(self) -> Self {
        match self {
            SignConvention::Printed => SignConvention::Flipped,
            SignConvention::Flipped => SignConvention::Printed,
        }
    }
}

/// Result of converting canonical momenta to the `f_i` variables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentaConversion {
    pub f: Vec<Complex64>,
    /// Ordered pairs `(i, s)` whose square-root factor sits on the negative
    /// real axis, where the principal branch is discontinuous.
    pub cut_crossings: Vec<(usize, usize)>,
}

/// `f_i = e^{p_i} prod_{s != i} (sigma(x_i - x_s + eta) sigma(x_i - x_s - eta) / sigma^2(x_i - x_s))^{1/2}`,
/// with the principal square root on each factor.
pub fn momenta_to_f(
    p: &[Complex64],
    x: &[Complex64],
    eta: Complex64,
    lattice: &Lattice,
) -> Result<MomentaConversion> {
    if p.len() != x.len() {
        return Err(Error::Dimension(format!(
            "{} momenta for {} positions",
            p.len(),
            x.len()
        )));
    }
    let mut f = Vec::with_capacity(p.len());
    let mut cut_crossings = Vec::new();
    for (i, (&pi, &xi)) in p.iter().zip(x).enumerate() {
        let mut fi = pi.exp();
        for (s, &xs) in x.iter().enumerate() {
            if s == i {
                continue;
            }
            let d = xi - xs;
            lattice.off_lattice(d, "momenta_to_f")?;
            let sd = lattice.sigma(d)?;
            let ratio = lattice.sigma(d + eta)? * lattice.sigma(d - eta)? / (sd * sd);
            if ratio.re < 0.0 && ratio.im.abs() <= 1e-14 * ratio.norm() {
                cut_crossings.push((i, s));
            }
            fi *= ratio.sqrt();
        }
        f.push(fi);
    }
    Ok(MomentaConversion { f, cut_crossings })
}

/// `V(x_a - x_b)` for all ordered pairs `a != b`; the diagonal is unused.
fn pair_potentials(x: &[Complex64], eta: Complex64, lattice: &Lattice) -> Result<DMatrix<Complex64>> {
    let n = x.len();
    let mut v = DMatrix::zeros(n, n);
    for a in 0..n {
        for b in 0..n {
            if a != b {
                v[(a, b)] = v_potential(x[a] - x[b], eta, lattice)?;
            }
        }
    }
    Ok(v)
}

/// Spinless equations of motion in first-order form:
/// `xdot_i = f_i`, `xddot_i = sum_{s != i} f_i f_s (V(x_s - x_i) - V(x_i - x_s))`.
pub fn rs_rhs(state: &RsState, lattice: &Lattice) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let n = state.n();
    let v = pair_potentials(&state.x, state.eta, lattice)?;
    let accel = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&s| s != i)
                .map(|s| state.f[i] * state.f[s] * (v[(s, i)] - v[(i, s)]))
                .sum()
        })
        .collect();
    Ok((state.f.clone(), accel))
}

/// Spin equations: `xdot_i = f_ii` and `fdot_ij` as in [`SignConvention`].
pub fn spin_rs_rhs(
    state: &SpinState,
    lattice: &Lattice,
    sign: SignConvention,
) -> Result<(Vec<Complex64>, DMatrix<Complex64>)> {
    let n = state.n();
    let f = &state.f;
    let v = pair_potentials(&state.x, state.eta, lattice)?;
    let s = sign.factor();
    let fdot = DMatrix::from_fn(n, n, |i, j| {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..n {
            let fkk = f[(i, k)] * f[(k, j)];
            if k != j {
                acc += fkk * v[(j, k)];
            }
            if k != i {
                acc -= fkk * v[(k, i)];
            }
        }
        s * acc
    });
    Ok((state.velocities(), fdot))
}

/// `f_ij = b_i . a_j` (no conjugation); rank at most `l`.
pub fn rank_factor_embed(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> Result<DMatrix<Complex64>> {
    let n = a.len();
    if b.len() != n || n == 0 {
        return Err(Error::Dimension(format!("{} a-vectors and {} b-vectors", n, b.len())));
    }
    let l = a[0].len();
    if a.iter().chain(b).any(|v| v.len() != l) {
        return Err(Error::Dimension("internal vectors must share one length".into()));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| {
        b[i].iter().zip(&a[j]).map(|(bi, aj)| bi * aj).sum()
    }))
}

/// Leaf flow generated by `H = f1 + f2`:
/// `f1dot = -f1 f2 (zeta(z0 + D) - zeta(z0 - D) - 2 zeta(D)) = -f2dot`, `xdot_i = f_i`,
/// with `D = x1 - x2`. Returned in the order `(x1, x2, f1, f2)`.
pub fn n2_flow_rhs(state: &N2LeafState, lattice: &Lattice) -> Result<[Complex64; 4]> {
    let d = state.delta();
    let bracket = lattice.zeta(state.z0 + d)? - lattice.zeta(state.z0 - d)? - 2.0 * lattice.zeta(d)?;
    let f1dot = -state.f1 * state.f2 * bracket;
    Ok([state.f1, state.f2, f1dot, -f1dot])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_particle_has_free_momentum_map() {
        let l = Lattice::rectangular(1.0, 1.0).unwrap();
        let m = momenta_to_f(&[c(0.3, 0.1)], &[c(0.2, 0.0)], c(0.2, 0.0), &l).unwrap();
        assert_eq!(m.f, vec![c(0.3, 0.1).exp()]);
    }

    #[test]
    fn zero_coupling_momentum_map() {
        let l = Lattice::rectangular(1.0, 1.0).unwrap();
        let p = [c(0.3, 0.0), c(-0.2, 0.1)];
        let m = momenta_to_f(&p, &[c(0.2, 0.0), c(0.7, 0.1)], c(0.0, 0.0), &l).unwrap();
        for (fi, pi) in m.f.iter().zip(&p) {
            assert!((fi - pi.exp()).norm() < 1e-14);
        }
    }

    #[test]
    fn rational_two_body_momentum_map() {
        let l = Lattice::rational();
        let m = momenta_to_f(&[c(0.0, 0.0); 2], &[c(1.0, 0.0), c(0.0, 0.0)], c(0.5, 0.0), &l).unwrap();
        // sigma(1.5) sigma(0.5) / sigma(1)^2 = 0.75
        assert!((m.f[0] - c(0.75f64.sqrt(), 0.0)).norm() < 1e-15);
        assert!(m.cut_crossings.is_empty());
    }

    #[test]
    fn momentum_map_flags_negative_ratio() {
        let l = Lattice::rational();
        // (0.2 + 0.5)(0.2 - 0.5) / 0.04 < 0
        let m = momenta_to_f(&[c(0.0, 0.0); 2], &[c(0.2, 0.0), c(0.0, 0.0)], c(0.5, 0.0), &l).unwrap();
        assert_eq!(m.cut_crossings, vec![(0, 1), (1, 0)]);
    }

    #[test]
    fn one_particle_moves_freely() {
        let l = Lattice::rectangular(1.0, 1.0).unwrap();
        let s = RsState::new(vec![c(0.1, 0.0)], vec![c(1.3, 0.0)], c(0.2, 0.0)).unwrap();
        let (v, a) = rs_rhs(&s, &l).unwrap();
        assert_eq!(v, vec![c(1.3, 0.0)]);
        assert_eq!(a, vec![c(0.0, 0.0)]);
    }

    #[test]
    fn swapping_particles_swaps_accelerations() {
        let l = Lattice::rectangular(1.0, 1.0).unwrap();
        let eta = c(0.15, 0.0);
        let s = RsState::new(vec![c(0.6, 0.0), c(0.1, 0.0)], vec![c(1.0, 0.0), c(0.7, 0.0)], eta).unwrap();
        let t = RsState::new(vec![c(0.1, 0.0), c(0.6, 0.0)], vec![c(0.7, 0.0), c(1.0, 0.0)], eta).unwrap();
        let (_, a) = rs_rhs(&s, &l).unwrap();
        let (_, b) = rs_rhs(&t, &l).unwrap();
        assert!((a[0] - b[1]).norm() < 1e-15 && (a[1] - b[0]).norm() < 1e-15);
    }

    #[test]
    fn rational_two_body_acceleration() {
        let l = Lattice::rational();
        let s = RsState::new(vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(1.0, 0.0); 2], c(0.5, 0.0)).unwrap();
        let (_, a) = rs_rhs(&s, &l).unwrap();
        // V(-1) - V(1) with V(x) = 1/(x + 1/2) - 1/x
        let v = |x: f64| 1.0 / (x + 0.5) - 1.0 / x;
        let expected = v(-1.0) - v(1.0);
        assert!((a[0] - c(expected, 0.0)).norm() < 1e-15);
        assert!((a[0] + a[1]).norm() < 1e-15);
    }

    #[test]
    fn diagonal_spin_matrix_is_stationary() {
        let l = Lattice::rectangular(1.0, 1.0).unwrap();
        let f = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0, 0.0), c(2.0, 0.0), c(0.5, 0.0)]));
        let s = SpinState::new(vec![c(0.1, 0.0), c(0.4, 0.0), c(0.8, 0.0)], f, c(0.13, 0.0)).unwrap();
        for sign in [SignConvention::Printed, SignConvention::Flipped] {
            let (v, fdot) = spin_rs_rhs(&s, &l, sign).unwrap();
            assert_eq!(v, vec![c(1.0, 0.0), c(2.0, 0.0), c(0.5, 0.0)]);
            assert!(fdot.iter().all(|z| z.norm() == 0.0));
        }
    }

    #[test]
    fn two_body_spin_energy_rate_vanishes() {
        let l = Lattice::rectangular(1.0, 1.0).unwrap();
        let f = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.1), c(0.6, 0.0), c(0.9, -0.2), c(1.1, 0.0)]);
        let s = SpinState::new(vec![c(0.6, 0.05), c(0.1, 0.0)], f, c(0.3, 0.05)).unwrap();
        let (_, fdot) = spin_rs_rhs(&s, &l, SignConvention::Printed).unwrap();
        assert!((fdot[(0, 0)] + fdot[(1, 1)]).norm() < 1e-14);
    }

    #[test]
    fn rank_one_embedding() {
        let one = vec![vec![c(1.0, 0.0)]; 3];
        let f = rank_factor_embed(&one, &one).unwrap();
        assert!(f.iter().all(|&z| z == c(1.0, 0.0)));
        let a = vec![vec![c(0.3, 0.2)], vec![c(-1.1, 0.4)]];
        let b = vec![vec![c(0.7, -0.5)], vec![c(0.2, 0.9)]];
        let f = rank_factor_embed(&a, &b).unwrap();
        assert!((f[(0, 1)] * f[(1, 0)] - f[(0, 0)] * f[(1, 1)]).norm() < 1e-15);
        assert!(rank_factor_embed(&a, &b[..1]).is_err());
    }

    #[test]
    fn rational_leaf_flow() {
        let l = Lattice::rational();
        let s = N2LeafState {
            x1: c(1.0, 0.0),
            x2: c(0.0, 0.0),
            f1: c(1.0, 0.0),
            f2: c(1.0, 0.0),
            z0: c(0.7, 0.0),
            eta: c(0.5, 0.0),
        };
        let d = n2_flow_rhs(&s, &l).unwrap();
        let expected = -(1.0 / 1.7 - 1.0 / (0.7 - 1.0) - 2.0);
        assert!((d[2] - c(expected, 0.0)).norm() < 1e-14);
        assert_eq!(d[3], -d[2]);
        assert_eq!(d[0], s.f1);
    }
}
