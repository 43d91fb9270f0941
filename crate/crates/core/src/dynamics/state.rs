use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::elliptic::Lattice;
use crate::error::{Error, Result};

/// Minimum separation from a pole of V accepted in a state.
pub const MIN_SEPARATION: f64 = 1e-10;

/// A point of a phase space that the integrator can flatten into a complex
/// vector. Parameters that do not evolve (eta, z0) stay in the template and
/// are copied by [`PhaseState::with_flat`].
pub trait PhaseState: Clone {
    fn to_flat(&self) -> Vec<Complex64>;
    fn with_flat(&self, y: &[Complex64]) -> Self;
    /// Column labels matching [`PhaseState::to_flat`].
    fn coordinate_names(&self) -> Vec<String>;
}

pub trait Hamiltonian {
    fn hamiltonian(&self) -> Complex64;
}

/// Spinless RS state: positions and `f_i = xdot_i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RsState {
    pub x: Vec<Complex64>,
    pub f: Vec<Complex64>,
    pub eta: Complex64,
}

impl RsState {
    pub fn new(x: Vec<Complex64>, f: Vec<Complex64>, eta: Complex64) -> Result<Self> {
        if x.len() != f.len() || x.is_empty() {
            return Err(Error::Dimension(format!(
                "{} positions but {} velocities",
                x.len(),
                f.len()
            )));
        }
        if let Some(i) = f.iter().position(|fi| fi.norm() == 0.0) {
            return Err(Error::InvalidState(format!("f_{} = 0", i + 1)));
        }
        Ok(RsState { x, f, eta })
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn validate(&self, lattice: &Lattice) -> Result<()> {
        check_separations(&self.x, self.eta, lattice)
    }
}

impl Hamiltonian for RsState {
    fn hamiltonian(&self) -> Complex64 {
        self.f.iter().sum()
    }
}

impl PhaseState for RsState {
    fn to_flat(&self) -> Vec<Complex64> {
        self.x.iter().chain(&self.f).copied().collect()
    }

    fn with_flat(&self, y: &[Complex64]) -> Self {
        let n = self.n();
        RsState {
            x: y[..n].to_vec(),
            f: y[n..2 * n].to_vec(),
            eta: self.eta,
        }
    }

    fn coordinate_names(&self) -> Vec<String> {
        let n = self.n();
        (1..=n)
            .map(|i| format!("x{i}"))
            .chain((1..=n).map(|i| format!("f{i}")))
            .collect()
    }
}

/// Spin RS state: positions and the interaction matrix `F = (f_ij)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinState {
    pub x: Vec<Complex64>,
    #[serde(with = "matrix_rows")]
    pub f: DMatrix<Complex64>,
    pub eta: Complex64,
}

impl SpinState {
    pub fn new(x: Vec<Complex64>, f: DMatrix<Complex64>, eta: Complex64) -> Result<Self> {
        if x.is_empty() || f.nrows() != x.len() || f.ncols() != x.len() {
            return Err(Error::Dimension(format!(
                "{} positions but a {}x{} matrix",
                x.len(),
                f.nrows(),
                f.ncols()
            )));
        }
        Ok(SpinState { x, f, eta })
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn validate(&self, lattice: &Lattice) -> Result<()> {
        check_separations(&self.x, self.eta, lattice)
    }

    /// Velocities `xdot_i = f_ii`.
    pub fn velocities(&self) -> Vec<Complex64> {
        (0..self.n()).map(|i| self.f[(i, i)]).collect()
    }

    /// Simultaneous relabelling of particles: particle `i` of the result is
    /// particle `perm[i]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let n = self.n();
        SpinState {
            x: perm.iter().map(|&p| self.x[p]).collect(),
            f: DMatrix::from_fn(n, n, |i, j| self.f[(perm[i], perm[j])]),
            eta: self.eta,
        }
    }
}

impl Hamiltonian for SpinState {
    fn hamiltonian(&self) -> Complex64 {
        self.f.diagonal().iter().sum()
    }
}

impl PhaseState for SpinState {
    fn to_flat(&self) -> Vec<Complex64> {
        let n = self.n();
        let mut y = self.x.clone();
        y.extend((0..n * n).map(|k| self.f[(k / n, k % n)]));
        y
    }

    fn with_flat(&self, y: &[Complex64]) -> Self {
        let n = self.n();
        SpinState {
            x: y[..n].to_vec(),
            f: DMatrix::from_row_slice(n, n, &y[n..n + n * n]),
            eta: self.eta,
        }
    }

    fn coordinate_names(&self) -> Vec<String> {
        let n = self.n();
        let mut names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
        for i in 1..=n {
            for j in 1..=n {
                names.push(format!("f{i}{j}"));
            }
        }
        names
    }
}

/// The N = 2 chart `(x1, x2, f1, f2)` on a leaf of fixed `z0` (and `eta`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct N2LeafState {
    pub x1: Complex64,
    pub x2: Complex64,
    pub f1: Complex64,
    pub f2: Complex64,
    pub z0: Complex64,
    pub eta: Complex64,
}

impl N2LeafState {
    pub fn delta(&self) -> Complex64 {
        self.x1 - self.x2
    }

    pub fn validate(&self, lattice: &Lattice) -> Result<()> {
        let d = self.delta();
        for (z, what) in [(d, "x1 - x2"), (self.z0 + d, "z0 + x1 - x2"), (self.z0 - d, "z0 - x1 + x2")] {
            let dist = lattice.distance_to_lattice(z);
            if dist < MIN_SEPARATION {
                return Err(Error::InvalidState(format!("{what} is on the lattice ({dist:.2e})")));
            }
        }
        if self.f1.norm() == 0.0 || self.f2.norm() == 0.0 {
            return Err(Error::InvalidState("f1 and f2 must be nonzero".into()));
        }
        Ok(())
    }
}

impl Hamiltonian for N2LeafState {
    fn hamiltonian(&self) -> Complex64 {
        self.f1 + self.f2
    }
}

impl PhaseState for N2LeafState {
    fn to_flat(&self) -> Vec<Complex64> {
        vec![self.x1, self.x2, self.f1, self.f2]
    }

    fn with_flat(&self, y: &[Complex64]) -> Self {
        N2LeafState {
            x1: y[0],
            x2: y[1],
            f1: y[2],
            f2: y[3],
            ..*self
        }
    }

    fn coordinate_names(&self) -> Vec<String> {
        ["x1", "x2", "f1", "f2"].iter().map(|s| s.to_string()).collect()
    }
}

/// Smallest distance from any `x_i - x_j` (i != j) and `x_i - x_j + eta`
/// to the lattice: the arguments at which the pair potential blows up.
pub fn pair_pole_distance(x: &[Complex64], eta: Complex64, lattice: &Lattice) -> f64 {
    let mut best = f64::INFINITY;
    for (i, &xi) in x.iter().enumerate() {
        for (j, &xj) in x.iter().enumerate() {
            if i != j {
                let d = xi - xj;
                best = best
                    .min(lattice.distance_to_lattice(d))
                    .min(lattice.distance_to_lattice(d + eta));
            }
        }
    }
    best
}

fn check_separations(x: &[Complex64], eta: Complex64, lattice: &Lattice) -> Result<()> {
    let d = pair_pole_distance(x, eta, lattice);
    if d < MIN_SEPARATION {
        return Err(Error::InvalidState(format!(
            "pairwise separation {d:.2e} is at a pole of V"
        )));
    }
    Ok(())
}

/// Serializes a square complex matrix as a list of rows.
pub(crate) mod matrix_rows {
    use nalgebra::DMatrix;
    use num_complex::Complex64;
    use serde::{de::Error as _, Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &DMatrix<Complex64>, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<Complex64>> = (0..m.nrows())
            .map(|i| m.row(i).iter().copied().collect())
            .collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DMatrix<Complex64>, D::Error> {
        let rows = Vec::<Vec<Complex64>>::deserialize(d)?;
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(D::Error::custom("matrix must be square"));
        }
        Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn spin_hamiltonian_is_trace() {
        let f = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)]);
        let s = SpinState::new(vec![c(0.5, 0.0), c(0.0, 0.0)], f, c(0.2, 0.0)).unwrap();
        assert_eq!(s.hamiltonian(), c(3.0, 0.0));
    }

    #[test]
    fn relabelling_preserves_energy() {
        let f = DMatrix::from_fn(3, 3, |i, j| c(1.0 + i as f64, 0.3 * j as f64));
        let s = SpinState::new(vec![c(0.1, 0.0), c(0.5, 0.0), c(0.9, 0.1)], f, c(0.2, 0.0)).unwrap();
        let p = s.permuted(&[2, 0, 1]);
        assert_eq!(p.hamiltonian(), s.hamiltonian());
        assert_eq!(p.f[(0, 1)], s.f[(2, 0)]);
    }

    #[test]
    fn flat_round_trip_keeps_parameters() {
        let s = N2LeafState {
            x1: c(0.5, 0.0),
            x2: c(0.1, 0.0),
            f1: c(1.0, 0.0),
            f2: c(1.2, 0.0),
            z0: c(0.2, 0.1),
            eta: c(0.15, 0.0),
        };
        assert_eq!(s.with_flat(&s.to_flat()), s);
        let f = DMatrix::from_fn(2, 2, |i, j| c(i as f64, j as f64 + 1.0));
        let sp = SpinState::new(vec![c(0.5, 0.0), c(0.1, 0.0)], f, c(0.2, 0.0)).unwrap();
        assert_eq!(sp.with_flat(&sp.to_flat()), sp);
        assert_eq!(sp.coordinate_names().len(), sp.to_flat().len());
    }

    #[test]
    fn states_reject_bad_shapes() {
        assert!(RsState::new(vec![c(0.0, 0.0)], vec![], c(0.1, 0.0)).is_err());
        assert!(RsState::new(vec![c(0.0, 0.0)], vec![c(0.0, 0.0)], c(0.1, 0.0)).is_err());
        let f = DMatrix::from_element(2, 3, c(1.0, 0.0));
        assert!(SpinState::new(vec![c(0.0, 0.0), c(1.0, 0.0)], f, c(0.1, 0.0)).is_err());
    }

    #[test]
    fn colliding_particles_are_invalid() {
        let l = Lattice::rectangular(1.0, 1.0).unwrap();
        let s = RsState::new(vec![c(0.3, 0.0), c(0.3, 0.0)], vec![c(1.0, 0.0); 2], c(0.1, 0.0)).unwrap();
        assert!(s.validate(&l).is_err());
        let s = RsState::new(vec![c(0.3, 0.0), c(0.4, 0.0)], vec![c(1.0, 0.0); 2], c(0.1, 0.0)).unwrap();
        // x2 - x1 + eta = 0
        assert!(s.validate(&l).is_err());
    }

    #[test]
    fn spin_state_json_uses_rows() {
        let f = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0)]);
        let s = SpinState::new(vec![c(0.5, 0.0), c(0.0, 0.0)], f, c(0.2, 0.0)).unwrap();
        let v = serde_json::to_value(&s).unwrap();
        assert_eq!(v["f"][0][1], serde_json::json!([2.0, 0.0]));
        let back: SpinState = serde_json::from_value(v).unwrap();
        assert_eq!(back, s);
    }
}
