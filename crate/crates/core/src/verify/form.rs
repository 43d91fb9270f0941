use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{pair_pole_distance, N2LeafState, PhaseState, RsState, VectorField};
use crate::elliptic::{v_potential, v_tilde, Lattice};
use crate::error::{Error, Result};
use crate::lax::N2Data;

/// Below this `|det Omega|` a form is treated as singular.
pub const DEGENERACY_THRESHOLD: f64 = 1e-12;

/// Which expression is used for the `dx1 ^ dx2` coefficient `W(D)` of the
/// N = 2 leaf form, `D = x1 - x2`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WConvention {
    /// `W = V~(D) - V~(-D) = zeta(D + z0) + zeta(D - z0) - 2 zeta(D)`.
    #[default]
    OddCombination,
    /// `W = 2 V~(D)`.
    TwoVTilde,
}

impl WConvention {
    pub fn name(self) -> &'static str {
        match self {
            WConvention::OddCombination => "odd_combination",
            WConvention::TwoVTilde => "two_v_tilde",
        }
    }
}

/// The leaf two-form `-dln f1 ^ dx1 - dln f2 ^ dx2 + W dx1 ^ dx2` as an
/// antisymmetric matrix in the coordinates `(x1, x2, u1 = ln f1, u2 = ln f2)`,
/// with `omega = sum_{a<b} Omega_ab dy^a ^ dy^b`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoFormN2 {
    pub matrix: DMatrix<Complex64>,
    pub convention: WConvention,
    pub w: Complex64,
}

impl TwoFormN2 {
    pub fn from_coupling(w: Complex64, convention: WConvention) -> Self {
        let one = Complex64::new(1.0, 0.0);
        let mut m = DMatrix::zeros(4, 4);
        m[(0, 2)] = one;
        m[(2, 0)] = -one;
        m[(1, 3)] = one;
        m[(3, 1)] = -one;
        m[(0, 1)] = w;
        m[(1, 0)] = -w;
        TwoFormN2 {
            matrix: m,
            convention,
            w,
        }
    }

    pub fn determinant(&self) -> Complex64 {
        self.matrix.determinant()
    }
}

pub fn leaf_coupling(state: &N2LeafState, convention: WConvention, lattice: &Lattice) -> Result<Complex64> {
    let d = state.delta();
    match convention {
        WConvention::OddCombination => {
            Ok(v_tilde(d, state.z0, lattice)? - v_tilde(-d, state.z0, lattice)?)
        }
        WConvention::TwoVTilde => Ok(2.0 * v_tilde(d, state.z0, lattice)?),
    }
}

pub fn two_form_n2(state: &N2LeafState, convention: WConvention, lattice: &Lattice) -> Result<TwoFormN2> {
    Ok(TwoFormN2::from_coupling(leaf_coupling(state, convention, lattice)?, convention))
}

/// Solves `iota_X omega = dH`, i.e. `Omega^T X = dH`.
pub fn hamiltonian_vector_field(omega: &DMatrix<Complex64>, dh: &DVector<Complex64>) -> Result<DVector<Complex64>> {
    let det = omega.determinant();
    if !(det.norm() > DEGENERACY_THRESHOLD) {
        return Err(Error::SingularForm(format!("|det| = {:.3e}", det.norm())));
    }
    omega
        .transpose()
        .lu()
        .solve(dh)
        .ok_or_else(|| Error::SingularForm("LU solve failed".into()))
}

/// Hamiltonian vector field of `H = f1 + f2` for `form`, returned as
/// `(x1dot, x2dot, f1dot, f2dot)`.
pub fn symplectic_flow(form: &TwoFormN2, state: &N2LeafState) -> Result<[Complex64; 4]> {
    let zero = Complex64::new(0.0, 0.0);
    let dh = DVector::from_vec(vec![zero, zero, state.f1, state.f2]);
    let x = hamiltonian_vector_field(&form.matrix, &dh)?;
    Ok([x[0], x[1], state.f1 * x[2], state.f2 * x[3]])
}

/// [`symplectic_flow`] as a vector field on the leaf.
#[derive(Clone, Debug)]
pub struct SymplecticFlow<'a> {
    pub lattice: &'a Lattice,
    pub convention: WConvention,
}

impl VectorField for SymplecticFlow<'_> {
    type State = N2LeafState;

    fn derivative(&self, state: &N2LeafState) -> Result<Vec<Complex64>> {
        let form = two_form_n2(state, self.convention, self.lattice)?;
        Ok(symplectic_flow(&form, state)?.to_vec())
    }

    fn pole_distance(&self, state: &N2LeafState) -> f64 {
        crate::dynamics::leaf_pole_distance(state, self.lattice)
    }
}

/// Largest component of `d omega` on the leaf, by central differences of
/// step `h` in the `(x1, x2, u1, u2)` chart.
pub fn closedness_residual(state: &N2LeafState, convention: WConvention, lattice: &Lattice, h: f64) -> Result<f64> {
    let y0 = [state.x1, state.x2, state.f1.ln(), state.f2.ln()];
    let omega = |y: [Complex64; 4]| -> Result<DMatrix<Complex64>> {
        let s = N2LeafState {
            x1: y[0],
            x2: y[1],
            f1: y[2].exp(),
            f2: y[3].exp(),
            ..*state
        };
        Ok(two_form_n2(&s, convention, lattice)?.matrix)
    };
    let mut partials = Vec::with_capacity(4);
    for a in 0..4 {
        let (mut up, mut down) = (y0, y0);
        up[a] += h;
        down[a] -= h;
        partials.push((omega(up)? - omega(down)?) / Complex64::new(2.0 * h, 0.0));
    }
    let mut worst = 0.0f64;
    for a in 0..4 {
        for b in a + 1..4 {
            for c in b + 1..4 {
                let v = partials[a][(b, c)] + partials[b][(c, a)] + partials[c][(a, b)];
                worst = worst.max(v.norm());
            }
        }
    }
    Ok(worst)
}

/// Relative residual of
/// `f1 f2 (2 zeta(D) + zeta(z0 - D) - zeta(z0 + D)) = f3^2 (2 zeta(D) + zeta(eta - D) - zeta(eta + D))`.
pub fn identity8_residual(data: &N2Data, z0: Complex64, lattice: &Lattice) -> Result<f64> {
    let (lhs, rhs) = identity8_sides(data, z0, lattice)?;
    let scale = lhs.norm().max(rhs.norm());
    Ok(if scale == 0.0 { 0.0 } else { (lhs - rhs).norm() / scale })
}

pub(crate) fn identity8_sides(data: &N2Data, z0: Complex64, lattice: &Lattice) -> Result<(Complex64, Complex64)> {
    let d = data.delta();
    let zd = 2.0 * lattice.zeta(d)?;
    let lhs = data.f1 * data.f2 * (zd + lattice.zeta(z0 - d)? - lattice.zeta(z0 + d)?);
    let rhs = data.f3_sq * (zd + lattice.zeta(data.eta - d)? - lattice.zeta(data.eta + d)?);
    Ok((lhs, rhs))
}

/// Sign put in front of the pair potential when assembling the spinless
/// N-body form `sum dln f_i ^ dx_i + sum_{i != j} V(x_i - x_j) dx_i ^ dx_j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairPotentialSign {
    AsPrinted,
    Negated,
}

impl PairPotentialSign {
    pub fn factor(self) -> f64 {
        match self {
            PairPotentialSign::AsPrinted => 1.0,
            PairPotentialSign::Negated => -1.0,
        }
    }

    pub fn other(self) -> Self {
        match self {
            PairPotentialSign::AsPrinted => PairPotentialSign::Negated,
            PairPotentialSign::Negated => PairPotentialSign::AsPrinted,
        }
    }
}

/// The spinless form as a `2N x 2N` matrix in `(x_1..x_N, u_1..u_N)`.
pub fn spinless_form(state: &RsState, sign: PairPotentialSign, lattice: &Lattice) -> Result<DMatrix<Complex64>> {
    let n = state.n();
    let s = sign.factor();
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        m[(i, n + i)] = Complex64::new(-1.0, 0.0);
        m[(n + i, i)] = Complex64::new(1.0, 0.0);
        for j in i + 1..n {
            let dx = state.x[i] - state.x[j];
            let c = s * (v_potential(dx, state.eta, lattice)? - v_potential(-dx, state.eta, lattice)?);
            m[(i, j)] = c;
            m[(j, i)] = -c;
        }
    }
    Ok(m)
}

/// Hamiltonian vector field of `H = sum f_i` for [`spinless_form`], as
/// `(xdot, fdot)`.
pub fn spinless_form_field(state: &RsState, sign: PairPotentialSign, lattice: &Lattice) -> Result<Vec<Complex64>> {
    let n = state.n();
    let omega = spinless_form(state, sign, lattice)?;
    let mut dh = DVector::zeros(2 * n);
    for i in 0..n {
        dh[n + i] = state.f[i];
    }
    let x = hamiltonian_vector_field(&omega, &dh)?;
    Ok((0..2 * n).map(|k| if k < n { x[k] } else { state.f[k - n] * x[k] }).collect())
}

/// Time orientation `o` such that the field of [`spinless_form_field`] has
/// `xdot = o f` at `state`, with the mismatch `|xdot - o f| / |f|`.
pub fn spinless_form_orientation(state: &RsState, sign: PairPotentialSign, lattice: &Lattice) -> Result<(f64, f64)> {
    let field = spinless_form_field(state, sign, lattice)?;
    let n = state.n();
    let fnorm: f64 = state.f.iter().map(|f| f.norm_sqr()).sum::<f64>().sqrt();
    let mismatch = |o: f64| -> f64 {
        (0..n).map(|i| (field[i] - o * state.f[i]).norm_sqr()).sum::<f64>().sqrt() / fnorm
    };
    let (plus, minus) = (mismatch(1.0), mismatch(-1.0));
    Ok(if plus <= minus { (1.0, plus) } else { (-1.0, minus) })
}

/// [`spinless_form_field`] multiplied by a fixed orientation.
#[derive(Clone, Debug)]
pub struct SpinlessFormFlow<'a> {
    pub lattice: &'a Lattice,
    pub sign: PairPotentialSign,
    pub orientation: f64,
}

impl VectorField for SpinlessFormFlow<'_> {
    type State = RsState;

    fn derivative(&self, state: &RsState) -> Result<Vec<Complex64>> {
        Ok(spinless_form_field(state, self.sign, self.lattice)?
            .into_iter()
            .map(|v| self.orientation * v)
            .collect())
    }

    fn pole_distance(&self, state: &RsState) -> f64 {
        pair_pole_distance(&state.x, state.eta, self.lattice)
    }
}

/// Convenience: flattened comparison of two states of the same shape.
pub(crate) fn max_deviation<S: PhaseState>(a: &S, b: &S) -> f64 {
    a.to_flat()
        .iter()
        .zip(b.to_flat())
        .map(|(p, q)| (p - q).norm() / p.norm().max(1.0))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{n2_flow_rhs, rs_rhs};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn leaf() -> N2LeafState {
        N2LeafState {
            x1: c(0.62, 0.03),
            x2: c(0.17, 0.0),
            f1: c(1.3, 0.1),
            f2: c(0.8, 0.0),
            z0: c(0.21, 0.12),
            eta: c(0.15, 0.0),
        }
    }

    #[test]
    fn zero_coupling_gives_canonical_form() {
        let f = TwoFormN2::from_coupling(c(0.0, 0.0), WConvention::OddCombination);
        assert_eq!(f.matrix, -f.matrix.transpose());
        assert!((f.determinant() - c(1.0, 0.0)).norm() < 1e-15);
        let s = leaf();
        let x = symplectic_flow(&f, &s).unwrap();
        assert_eq!(x, [s.f1, s.f2, c(0.0, 0.0), c(0.0, 0.0)]);
    }

    #[test]
    fn odd_combination_reproduces_leaf_flow() {
        let l = Lattice::rectangular(1.0, 1.0).unwrap();
        let s = leaf();
        let x = symplectic_flow(&two_form_n2(&s, WConvention::OddCombination, &l).unwrap(), &s).unwrap();
        let y = n2_flow_rhs(&s, &l).unwrap();
        for k in 0..4 {
            assert!((x[k] - y[k]).norm() < 1e-13 * y[k].norm().max(1.0));
        }
        assert!((x[2] + x[3]).norm() < 1e-13);
    }

    #[test]
    fn conventions_differ_off_the_symmetric_locus() {
        let l = Lattice::rectangular(1.0, 1.0).unwrap();
        let s = leaf();
        let a = leaf_coupling(&s, WConvention::OddCombination, &l).unwrap();
        let b = leaf_coupling(&s, WConvention::TwoVTilde, &l).unwrap();
        assert!((a - b).norm() > 1e-3);
    }

    #[test]
    fn leaf_form_is_closed() {
        let l = Lattice::rectangular(1.0, 1.0).unwrap();
        for conv in [WConvention::OddCombination, WConvention::TwoVTilde] {
            assert!(closedness_residual(&leaf(), conv, &l, 1e-5).unwrap() < 1e-8);
        }
    }

    #[test]
    fn identity8_spinless_is_exact() {
        let l = Lattice::rectangular(1.0, 1.0).unwrap();
        let s = leaf();
        let d = N2Data {
            x1: s.x1,
            x2: s.x2,
            f1: s.f1,
            f2: s.f2,
            f3_sq: s.f1 * s.f2,
            eta: s.eta,
        };
        assert_eq!(identity8_residual(&d, d.eta, &l).unwrap(), 0.0);
    }

    #[test]
    fn spinless_form_without_coupling_is_free() {
        let l = Lattice::rectangular(1.0, 1.0).unwrap();
        let s = RsState::new(vec![c(0.5, 0.0), c(0.1, 0.0), c(-0.3, 0.0)], vec![c(1.0, 0.0), c(1.4, 0.0), c(0.7, 0.0)], c(0.0, 0.0))
            .unwrap();
        for sign in [PairPotentialSign::AsPrinted, PairPotentialSign::Negated] {
            let (o, mismatch) = spinless_form_orientation(&s, sign, &l).unwrap();
            assert_eq!(mismatch, 0.0);
            let v = spinless_form_field(&s, sign, &l).unwrap();
            assert!(v[3..].iter().all(|d| d.norm() == 0.0));
            assert_eq!(o, -1.0);
        }
    }

    #[test]
    fn negated_potential_gives_rs_acceleration() {
        let l = Lattice::rectangular(1.0, 1.0).unwrap();
        let s = RsState::new(vec![c(0.5, 0.0), c(0.1, 0.0), c(-0.3, 0.0)], vec![c(1.0, 0.0), c(1.4, 0.0), c(0.7, 0.0)], c(0.15, 0.0))
            .unwrap();
        let (_, accel) = rs_rhs(&s, &l).unwrap();
        let sign = PairPotentialSign::Negated;
        let (o, _) = spinless_form_orientation(&s, sign, &l).unwrap();
        let v = spinless_form_field(&s, sign, &l).unwrap();
        for i in 0..3 {
            assert!((o * v[3 + i] - accel[i]).norm() < 1e-12 * accel[i].norm().max(1.0));
        }
    }
}
