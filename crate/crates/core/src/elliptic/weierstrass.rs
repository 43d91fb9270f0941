//! Weierstrass sigma, zeta and wp.
//!
//! The elliptic backend reduces the argument into the cell centred at the
//! origin and evaluates
//!
//! ```text
//! sigma(z) = (2w1/pi) exp(eta1 z^2 / 2w1) theta1(v) / theta1'(0),   v = pi z / 2w1
//! theta1(v) / theta1'(0) = sin v prod_n (1 - q^2n e^{2iv})(1 - q^2n e^{-2iv}) / (1 - q^2n)^2
//! zeta(z)  = eta1 z / w1 + (pi/2w1) [cot v + 4 sum_n q^2n/(1-q^2n) sin 2nv]
//! wp(z)    = -eta1 / w1 + (pi/2w1)^2 [csc^2 v - 8 sum_n n q^2n/(1-q^2n) cos 2nv]
//! ```
//!
//! The quasi-periodicity of theta1 restores the unreduced value; its factors
//! are collected in the exponent so that only one `exp` is taken.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::lattice::{Lattice, LatticeMode, POLE_TOLERANCE, SERIES_CUTOFF};
use crate::error::{Error, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn check_finite(z: Complex64, func: &'static str) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite(func))
    }
}

impl Lattice {
    /// Rejects `z` if it lies within [`POLE_TOLERANCE`] of a lattice point.
    pub(crate) fn off_lattice(&self, z: Complex64, func: &'static str) -> Result<()> {
        check_finite(z, func)?;
        let d = self.distance_to_lattice(z);
        if d < POLE_TOLERANCE {
            Err(Error::domain(func, z, d))
        } else {
            Ok(())
        }
    }

    /// Weierstrass sigma. Exactly zero at lattice points reached by reduction.
    pub fn sigma(&self, z: Complex64) -> Result<Complex64> {
        check_finite(z, "sigma")?;
        match self.mode() {
            LatticeMode::Rational => Ok(z),
            LatticeMode::Trigonometric => {
                let nu = PI / (2.0 * self.omega1());
                Ok((nu * nu * z * z / 6.0).exp() * (nu * z).sin() / nu)
            }
            LatticeMode::Elliptic => Ok(self.sigma_elliptic(z)),
        }
    }

    fn sigma_elliptic(&self, z: Complex64) -> Complex64 {
        let (zr, m, n) = self.reduce(z);
        if zr.re == 0.0 && zr.im == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let w1 = self.omega1();
        let v = PI * zr / (2.0 * w1);
        let e = (2.0 * I * v).exp();
        let e_inv = 1.0 / e;
        let growth = e.norm().max(e_inv.norm());

        let mut prod = Complex64::new(1.0, 0.0);
        for &p in &self.series.q2n {
            prod *= (1.0 - p * e) * (1.0 - p * e_inv);
            if p.norm() * growth < SERIES_CUTOFF {
                break;
            }
        }

        let exponent = (2.0 * w1 / PI).ln() + self.eta1() * z * z / (2.0 * w1)
            + I * PI * (m + n)
            - I * PI * self.tau() * (n * n)
            - 2.0 * I * n * v;
        exponent.exp() * v.sin() * prod / self.series.norm
    }

    /// Weierstrass zeta, `sigma'/sigma`. Poles at lattice points are a
    /// domain error.
    pub fn zeta(&self, z: Complex64) -> Result<Complex64> {
        self.off_lattice(z, "zeta")?;
        match self.mode() {
            LatticeMode::Rational => Ok(1.0 / z),
            LatticeMode::Trigonometric => {
                let nu = PI / (2.0 * self.omega1());
                let u = nu * z;
                Ok(nu * nu * z / 3.0 + nu * u.cos() / u.sin())
            }
            LatticeMode::Elliptic => {
                let (zr, _, n) = self.reduce(z);
                let w1 = self.omega1();
                let v = PI * zr / (2.0 * w1);
                let e = (2.0 * I * v).exp();
                let e_inv = 1.0 / e;
                let mut sum = v.cos() / v.sin();
                let (mut en, mut en_inv) = (e, e_inv);
                for &c in &self.series.lambert {
                    // 4 c sin(2kv) = -2i c (e^k - e^-k)
                    let term = -2.0 * I * c * (en - en_inv);
                    sum += term;
                    if 4.0 * c.norm() * en.norm().max(en_inv.norm()) < SERIES_CUTOFF * sum.norm() {
                        break;
                    }
                    en *= e;
                    en_inv *= e_inv;
                }
                Ok(self.eta1() * z / w1 + PI / (2.0 * w1) * (sum - 2.0 * I * n))
            }
        }
    }

    /// Weierstrass wp, `-zeta'`.
    pub fn wp(&self, z: Complex64) -> Result<Complex64> {
        self.off_lattice(z, "wp")?;
        match self.mode() {
            LatticeMode::Rational => Ok(1.0 / (z * z)),
            LatticeMode::Trigonometric => {
                let nu = PI / (2.0 * self.omega1());
                let s = (nu * z).sin();
                Ok(-nu * nu / 3.0 + nu * nu / (s * s))
            }
            LatticeMode::Elliptic => {
                let (zr, _, _) = self.reduce(z);
                let w1 = self.omega1();
                let v = PI * zr / (2.0 * w1);
                let e = (2.0 * I * v).exp();
                let e_inv = 1.0 / e;
                let s = v.sin();
                let mut sum = 1.0 / (s * s);
                let (mut en, mut en_inv) = (e, e_inv);
                for (k, &c) in self.series.lambert.iter().enumerate() {
                    let n = (k + 1) as f64;
                    // 8 n c cos(2nv) = 4 n c (e^n + e^-n)
                    let bound = 8.0 * n * c.norm() * en.norm().max(en_inv.norm());
                    sum -= 4.0 * n * c * (en + en_inv);
                    if bound < SERIES_CUTOFF * sum.norm() {
                        break;
                    }
                    en *= e;
                    en_inv *= e_inv;
                }
                let k = PI / (2.0 * w1);
                Ok(-self.eta1() / w1 + k * k * sum)
            }
        }
    }
}
