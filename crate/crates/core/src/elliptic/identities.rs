//! Residuals of the two addition identities used in the N = 2 computation:
//!
//! ```text
//! s(a+c)s(a-c)s(b+d)s(b-d) - s(a+d)s(a-d)s(b+c)s(b-c) = s(a+b)s(a-b)s(c+d)s(c-d)
//! zeta(a) + zeta(b) + zeta(c) - zeta(a+b+c) = s(a+b)s(b+c)s(a+c) / (s(a)s(b)s(c)s(a+b+c))
//! ```

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::lattice::Lattice;
use crate::error::Result;

/// Absolute residual of an identity together with the magnitude of its
/// largest term, so callers can test it relatively.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub absolute: f64,
    pub scale: f64,
}

impl Residual {
    pub fn relative(&self) -> f64 {
        if self.scale == 0.0 {
            self.absolute
        } else {
            self.absolute / self.scale
        }
    }
}

pub fn sigma_three_term_residual(
    a: Complex64,
    b: Complex64,
    c: Complex64,
    d: Complex64,
    lattice: &Lattice,
) -> Result<Residual> {
    for (z, _) in [(a, 'a'), (b, 'b'), (c, 'c'), (d, 'd')] {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(crate::Error::NonFinite("sigma_three_term_residual"));
        }
    }
    let s = |z: Complex64| lattice.sigma(z);
    let t1 = s(a + c)? * s(a - c)? * s(b + d)? * s(b - d)?;
    let t2 = s(a + d)? * s(a - d)? * s(b + c)? * s(b - c)?;
    let t3 = s(a + b)? * s(a - b)? * s(c + d)? * s(c - d)?;
    Ok(Residual {
        absolute: (t1 - t2 - t3).norm(),
        scale: t1.norm().max(t2.norm()).max(t3.norm()),
    })
}

/// The degenerate inputs `a + b`, `b + c`, `a + c` on the lattice are
/// excluded (both sides vanish there) and reported as domain errors.
pub fn zeta_sigma_residual(
    a: Complex64,
    b: Complex64,
    c: Complex64,
    lattice: &Lattice,
) -> Result<Residual> {
    let abc = a + b + c;
    for z in [a, b, c, abc, a + b, b + c, a + c] {
        lattice.off_lattice(z, "zeta_sigma_residual")?;
    }
    let zs = [lattice.zeta(a)?, lattice.zeta(b)?, lattice.zeta(c)?, -lattice.zeta(abc)?];
    let lhs: Complex64 = zs.iter().sum();
    let s = |z: Complex64| lattice.sigma(z);
    let rhs = s(a + b)? * s(b + c)? * s(a + c)? / (s(a)? * s(b)? * s(c)? * s(abc)?);
    let scale = zs
        .iter()
        .map(|z| z.norm())
        .fold(rhs.norm(), f64::max);
    Ok(Residual {
        absolute: (lhs - rhs).norm(),
        scale,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn equal_c_d_vanishes_termwise() {
        let l = Lattice::rectangular(1.0, 1.0).unwrap();
        let r = sigma_three_term_residual(c(0.3, 0.1), c(-0.2, 0.4), c(0.15, -0.05), c(0.15, -0.05), &l)
            .unwrap();
        assert_eq!(r.absolute, 0.0);
    }

    #[test]
    fn rational_polynomial_identities() {
        let l = Lattice::rational();
        let r = sigma_three_term_residual(c(0.7, 0.2), c(-0.3, 0.5), c(0.4, -0.6), c(1.1, 0.3), &l)
            .unwrap();
        assert!(r.relative() < 1e-15);
        let r = zeta_sigma_residual(c(0.7, 0.2), c(-0.3, 0.5), c(0.4, -0.6), &l).unwrap();
        assert!(r.relative() < 1e-15);
    }

    #[test]
    fn opposite_arguments_are_excluded() {
        let l = Lattice::rectangular(1.0, 1.0).unwrap();
        assert!(zeta_sigma_residual(c(0.3, 0.2), c(-0.3, -0.2), c(0.1, 0.1), &l).is_err());
    }
}
