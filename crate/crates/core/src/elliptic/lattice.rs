use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest nome accepted in elliptic mode. Beyond this the q-series need
/// thousands of terms and lose accuracy.
pub const MAX_NOME: f64 = 0.95;

/// Arguments closer than this to a pole (or lattice point) are rejected.
pub const POLE_TOLERANCE: f64 = 1e-12;

/// Relative size below which a series term is dropped.
pub(crate) const SERIES_CUTOFF: f64 = 1e-16;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LatticeMode {
    Elliptic,
    Trigonometric,
    Rational,
}

/// Wire form of a lattice: `{mode, omega1: [re, im], omega3: [re, im]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeParams {
    pub mode: LatticeMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega1: Option<Complex64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega3: Option<Complex64>,
}

/// Precomputed q-series data for the elliptic backend.
#[derive(Clone, Debug)]
pub(crate) struct NomeSeries {
    /// q^{2n}, n = 1, 2, ...
    pub q2n: Vec<Complex64>,
    /// q^{2n} / (1 - q^{2n})
    pub lambert: Vec<Complex64>,
    /// prod (1 - q^{2n})^2
    pub norm: Complex64,
}

/// Period lattice `2 omega1 Z + 2 omega3 Z`, or one of its degenerations.
///
/// In trigonometric mode only `omega1` is finite; in rational mode both
/// periods are infinite and sigma(z) = z. Construction validates the lattice
/// and precomputes the nome series and the quasi-period constants, after
/// which the value is immutable.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "LatticeParams", into = "LatticeParams")]
pub struct Lattice {
    mode: LatticeMode,
    omega1: Complex64,
    omega3: Complex64,
    tau: Complex64,
    nome: Complex64,
    eta1: Complex64,
    eta3: Option<Complex64>,
    /// Inverse of the real 2x2 map (a, b) -> 2 omega1 a + 2 omega3 b.
    cell_inverse: [[f64; 2]; 2],
    pub(crate) series: NomeSeries,
}

fn finite(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

impl Lattice {
    pub fn elliptic(omega1: Complex64, omega3: Complex64) -> Result<Self> {
        if !finite(omega1) || !finite(omega3) {
            return Err(Error::InvalidLattice("non-finite half-period".into()));
        }
        if omega1.norm() == 0.0 {
            return Err(Error::InvalidLattice("omega1 must be nonzero".into()));
        }
        let tau = omega3 / omega1;
        if tau.im <= 0.0 {
            return Err(Error::InvalidLattice(format!(
                "Im(omega3/omega1) must be positive, got tau = {tau}"
            )));
        }
        let nome = (I * PI * tau).exp();
        if nome.norm() > MAX_NOME {
            return Err(Error::InvalidLattice(format!(
                "|q| = {:.4} exceeds {MAX_NOME}",
                nome.norm()
            )));
        }

        // |q|^n < 1e-18 bounds every series term once the argument is reduced
        // into the fundamental cell.
        let n_max = ((1e-18f64).ln() / nome.norm().ln()).ceil().max(1.0) as usize + 1;
        let q2 = nome * nome;
        let mut q2n = Vec::with_capacity(n_max);
        let mut lambert = Vec::with_capacity(n_max);
        let mut norm = Complex64::new(1.0, 0.0);
        let mut p = q2;
        for _ in 0..n_max {
            q2n.push(p);
            lambert.push(p / (1.0 - p));
            norm *= (1.0 - p) * (1.0 - p);
            p *= q2;
        }

        let eta1 = Self::theta_eta1(omega1, nome);
        let (w1, w3) = (2.0 * omega1, 2.0 * omega3);
        let det = w1.re * w3.im - w3.re * w1.im;
        let cell_inverse = [[w3.im / det, -w3.re / det], [-w1.im / det, w1.re / det]];

        let mut lattice = Lattice {
            mode: LatticeMode::Elliptic,
            omega1,
            omega3,
            tau,
            nome,
            eta1,
            eta3: None,
            cell_inverse,
            series: NomeSeries { q2n, lambert, norm },
        };
        lattice.eta3 = Some(lattice.zeta(omega3)?);
        Ok(lattice)
    }

    /// Rectangular lattice with real half-period `real` and imaginary
    /// half-period `i * imag`. sigma, zeta and wp are real on the real axis.
    pub fn rectangular(real: f64, imag: f64) -> Result<Self> {
        if !(real > 0.0 && imag > 0.0) {
            return Err(Error::InvalidLattice(
                "rectangular half-periods must be positive".into(),
            ));
        }
        Self::elliptic(Complex64::new(real, 0.0), Complex64::new(0.0, imag))
    }

    pub fn trigonometric(omega1: Complex64) -> Result<Self> {
        if !finite(omega1) || omega1.norm() == 0.0 {
            return Err(Error::InvalidLattice("omega1 must be finite and nonzero".into()));
        }
        let nu = PI / (2.0 * omega1);
        Ok(Lattice {
            mode: LatticeMode::Trigonometric,
            omega1,
            omega3: Complex64::new(0.0, f64::INFINITY),
            tau: Complex64::new(0.0, f64::INFINITY),
            nome: Complex64::new(0.0, 0.0),
            eta1: nu * nu * omega1 / 3.0,
            eta3: None,
            cell_inverse: [[0.0; 2]; 2],
            series: NomeSeries {
                q2n: Vec::new(),
                lambert: Vec::new(),
                norm: Complex64::new(1.0, 0.0),
            },
        })
    }

    pub fn rational() -> Self {
        Lattice {
            mode: LatticeMode::Rational,
            omega1: Complex64::new(f64::INFINITY, 0.0),
            omega3: Complex64::new(0.0, f64::INFINITY),
            tau: Complex64::new(0.0, f64::INFINITY),
            nome: Complex64::new(0.0, 0.0),
            eta1: Complex64::new(0.0, 0.0),
            eta3: None,
            cell_inverse: [[0.0; 2]; 2],
            series: NomeSeries {
                q2n: Vec::new(),
                lambert: Vec::new(),
                norm: Complex64::new(1.0, 0.0),
            },
        }
    }

    pub fn from_params(params: &LatticeParams) -> Result<Self> {
        let need = |w: Option<Complex64>, name: &str| {
            w.ok_or_else(|| Error::InvalidLattice(format!("{name} is required")))
        };
        match params.mode {
            LatticeMode::Elliptic => {
                Self::elliptic(need(params.omega1, "omega1")?, need(params.omega3, "omega3")?)
            }
            LatticeMode::Trigonometric => Self::trigonometric(need(params.omega1, "omega1")?),
            LatticeMode::Rational => Ok(Self::rational()),
        }
    }

    pub fn params(&self) -> LatticeParams {
        match self.mode {
            LatticeMode::Elliptic => LatticeParams {
                mode: self.mode,
                omega1: Some(self.omega1),
                omega3: Some(self.omega3),
            },
            LatticeMode::Trigonometric => LatticeParams {
                mode: self.mode,
                omega1: Some(self.omega1),
                omega3: None,
            },
            LatticeMode::Rational => LatticeParams {
                mode: self.mode,
                omega1: None,
                omega3: None,
            },
        }
    }

    // eta1 = -(pi^2 / 12 omega1) theta1'''(0) / theta1'(0)
    fn theta_eta1(omega1: Complex64, nome: Complex64) -> Complex64 {
        let mut num = Complex64::new(0.0, 0.0);
        let mut den = Complex64::new(0.0, 0.0);
        let mut n = 0u32;
        loop {
            let odd = (2 * n + 1) as f64;
            let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
            // q^{(n+1/2)^2} / q^{1/4} = q^{n(n+1)}
            let qp = nome.powu(n * (n + 1));
            num += sign * odd.powi(3) * qp;
            den += sign * odd * qp;
            if odd.powi(3) * qp.norm() < SERIES_CUTOFF * num.norm() || n > 200 {
                break;
            }
            n += 1;
        }
        PI * PI / (12.0 * omega1) * num / den
    }

    pub fn mode(&self) -> LatticeMode {
        self.mode
    }
    pub fn omega1(&self) -> Complex64 {
        self.omega1
    }
    pub fn omega3(&self) -> Complex64 {
        self.omega3
    }
    pub fn tau(&self) -> Complex64 {
        self.tau
    }
    pub fn nome(&self) -> Complex64 {
        self.nome
    }
    /// zeta(omega1).
    pub fn eta1(&self) -> Complex64 {
        self.eta1
    }
    /// zeta(omega3); only defined for the elliptic backend.
    pub fn eta3(&self) -> Option<Complex64> {
        self.eta3
    }

    /// `|eta1 omega3 - eta3 omega1 - i pi / 2|`, elliptic mode only.
    pub fn legendre_residual(&self) -> Option<f64> {
        self.eta3
            .map(|eta3| (self.eta1 * self.omega3 - eta3 * self.omega1 - I * PI / 2.0).norm())
    }

    /// Real coordinates (a, b) with z = 2 omega1 a + 2 omega3 b.
    pub(crate) fn cell_coordinates(&self, z: Complex64) -> (f64, f64) {
        let m = &self.cell_inverse;
        (m[0][0] * z.re + m[0][1] * z.im, m[1][0] * z.re + m[1][1] * z.im)
    }

    pub(crate) fn period(&self, m: f64, n: f64) -> Complex64 {
        2.0 * m * self.omega1 + 2.0 * n * self.omega3
    }

    /// Splits `z = z' + 2 m omega1 + 2 n omega3` with `z'` in the cell
    /// centred at the origin. Degenerate backends only reduce along the
    /// finite period.
    pub(crate) fn reduce(&self, z: Complex64) -> (Complex64, f64, f64) {
        match self.mode {
            LatticeMode::Elliptic => {
                let (a, b) = self.cell_coordinates(z);
                let (m, n) = (a.round(), b.round());
                (z - self.period(m, n), m, n)
            }
            LatticeMode::Trigonometric => {
                let m = (z / (2.0 * self.omega1)).re.round();
                (z - 2.0 * m * self.omega1, m, 0.0)
            }
            LatticeMode::Rational => (z, 0.0, 0.0),
        }
    }

    /// Distance from `z` to the nearest lattice point (the zero set of sigma).
    pub fn distance_to_lattice(&self, z: Complex64) -> f64 {
        match self.mode {
            LatticeMode::Elliptic => {
                let (a, b) = self.cell_coordinates(z);
                let mut best = f64::INFINITY;
                for m in [a.floor(), a.ceil()] {
                    for n in [b.floor(), b.ceil()] {
                        best = best.min((z - self.period(m, n)).norm());
                    }
                }
                best
            }
            LatticeMode::Trigonometric => {
                let t = (z / (2.0 * self.omega1)).re;
                [t.floor(), t.ceil()]
                    .iter()
                    .map(|&m| (z - 2.0 * m * self.omega1).norm())
                    .fold(f64::INFINITY, f64::min)
            }
            LatticeMode::Rational => z.norm(),
        }
    }

    /// Reduces `z` modulo the lattice into the cell centred at the origin.
    pub fn reduce_to_cell(&self, z: Complex64) -> Complex64 {
        self.reduce(z).0
    }

    /// Coordinate along the first period, `Re(z / 2 omega1)` for the
    /// periodic backends and `Re z` for the rational one.
    pub fn real_coordinate(&self, z: Complex64) -> f64 {
        match self.mode {
            LatticeMode::Elliptic => self.cell_coordinates(z).0,
            LatticeMode::Trigonometric => (z / (2.0 * self.omega1)).re,
            LatticeMode::Rational => z.re,
        }
    }
}

impl TryFrom<LatticeParams> for Lattice {
    type Error = Error;
    fn try_from(params: LatticeParams) -> Result<Self> {
        Lattice::from_params(&params)
    }
}

impl From<Lattice> for LatticeParams {
    fn from(lattice: Lattice) -> Self {
        lattice.params()
    }
}

impl PartialEq for Lattice {
    fn eq(&self, other: &Self) -> bool {
        self.params() == other.params()
    }
}
