use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::lattice::Lattice;
use crate::error::{Error, Result};

/// Pair potential `V(x) = zeta(x + eta) - zeta(x)`.
pub fn v_potential(x: Complex64, eta: Complex64, lattice: &Lattice) -> Result<Complex64> {
    if eta == Complex64::new(0.0, 0.0) {
        lattice.off_lattice(x, "v_potential")?;
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok(lattice.zeta(x + eta)? - lattice.zeta(x)?)
}

/// `V~(x) = zeta(x + z0) - zeta(x)`, the leaf potential of the N = 2 form.
pub fn v_tilde(x: Complex64, z0: Complex64, lattice: &Lattice) -> Result<Complex64> {
    v_potential(x, z0, lattice)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CutConvention {
    /// The spectral curve is cut along a path joining `z = eta` and `z = -eta`.
    #[default]
    EtaToMinusEta,
}

/// A chosen value `w` of `log(sigma(z - eta) / sigma(z + eta))` at a fixed
/// spectral point. The Lax kernel's multivalued factor is `exp(x w / 2 eta)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchDatum {
    pub z: Complex64,
    pub eta: Complex64,
    pub w: Complex64,
    #[serde(default)]
    pub cut: CutConvention,
}

impl BranchDatum {
    /// Principal logarithm of the ratio at `z`.
    pub fn principal(z: Complex64, eta: Complex64, lattice: &Lattice) -> Result<Self> {
        let (num, den) = Self::ratio_parts(z, eta, lattice)?;
        Ok(BranchDatum {
            z,
            eta,
            w: (num / den).ln(),
            cut: CutConvention::EtaToMinusEta,
        })
    }

    /// Wraps an externally chosen `w`, checking `exp(w) = sigma(z-eta)/sigma(z+eta)`.
    pub fn new(z: Complex64, eta: Complex64, w: Complex64, lattice: &Lattice) -> Result<Self> {
        let (num, den) = Self::ratio_parts(z, eta, lattice)?;
        let ratio = num / den;
        let mismatch = (w.exp() - ratio).norm() / ratio.norm();
        if !(mismatch < 1e-10) {
            return Err(Error::InconsistentBranch(format!(
                "exp(w) differs from sigma(z-eta)/sigma(z+eta) by {mismatch:.3e}"
            )));
        }
        Ok(BranchDatum {
            z,
            eta,
            w,
            cut: CutConvention::EtaToMinusEta,
        })
    }

    /// Same point, with `w` moved to another sheet: `w + 2 pi i k`.
    pub fn shifted(&self, k: i32) -> Self {
        BranchDatum {
            w: self.w + Complex64::new(0.0, 2.0 * std::f64::consts::PI * k as f64),
            ..*self
        }
    }

    /// `sqrt(sigma(z + eta) sigma(z - eta))` on the sheet selected by `w`,
    /// i.e. `sigma(z + eta) exp(w / 2)`.
    pub fn sqrt_sigma_product(&self, lattice: &Lattice) -> Result<Complex64> {
        Ok(lattice.sigma(self.z + self.eta)? * (self.w / 2.0).exp())
    }

    fn ratio_parts(
        z: Complex64,
        eta: Complex64,
        lattice: &Lattice,
    ) -> Result<(Complex64, Complex64)> {
        lattice.off_lattice(z - eta, "branch datum")?;
        lattice.off_lattice(z + eta, "branch datum")?;
        Ok((lattice.sigma(z - eta)?, lattice.sigma(z + eta)?))
    }

    pub(crate) fn check(&self, z: Complex64, eta: Complex64) -> Result<()> {
        if self.z != z || self.eta != eta {
            return Err(Error::InconsistentBranch(format!(
                "datum recorded at z = {}, eta = {} but used at z = {z}, eta = {eta}",
                self.z, self.eta
            )));
        }
        Ok(())
    }
}

/// Lax kernel
/// `Phi(x, z) = sigma(z + x + eta) / (sigma(z + eta) sigma(x)) * [sigma(z - eta)/sigma(z + eta)]^{x / 2 eta}`
/// with the power taken as `exp(x w / 2 eta)` on the sheet fixed by `branch`.
pub fn phi(
    x: Complex64,
    z: Complex64,
    eta: Complex64,
    lattice: &Lattice,
    branch: &BranchDatum,
) -> Result<Complex64> {
    branch.check(z, eta)?;
    if eta == Complex64::new(0.0, 0.0) {
        return Err(Error::domain("phi", eta, 0.0));
    }
    lattice.off_lattice(x, "phi")?;
    lattice.off_lattice(z + eta, "phi")?;
    lattice.off_lattice(z - eta, "phi")?;
    let single_valued = lattice.sigma(z + x + eta)? / (lattice.sigma(z + eta)? * lattice.sigma(x)?);
    Ok(single_valued * (x * branch.w / (2.0 * eta)).exp())
}
