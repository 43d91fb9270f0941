use std::io::Read;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{
    momenta_to_f, rank_factor_embed, IntegratorOptions, N2LeafState, RsState, SpinState,
};
use crate::elliptic::{Lattice, LatticeParams};
use crate::error::{Error, Result};
use crate::lax::{solve_z0, N2Data};
use crate::verify::{SignChoice, WConvention, DEFAULT_SEED};

/// Initial data, tagged by `kind`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SystemConfig {
    /// Spinless particles; give either velocities `f` or momenta `p`.
    Rs {
        x: Vec<Complex64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        f: Option<Vec<Complex64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        p: Option<Vec<Complex64>>,
    },
    /// Spin particles; give either the matrix `f` (rows) or internal
    /// vectors `a`, `b` with `f_ij = b_i . a_j`.
    SpinRs {
        x: Vec<Complex64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        f: Option<Vec<Vec<Complex64>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        a: Option<Vec<Vec<Complex64>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        b: Option<Vec<Vec<Complex64>>>,
    },
    /// Two particles on a leaf; give either `f3` (then `z0` is solved for)
    /// or `z0` directly.
    N2Leaf {
        x: [Complex64; 2],
        f: [Complex64; 2],
        #[serde(default, skip_serializing_if = "Option::is_none")]
        f3: Option<Complex64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        z0: Option<Complex64>,
    },
}

fn default_t_span() -> [f64; 2] {
    [0.0, 5.0]
}

fn default_rel_tol() -> f64 {
    1e-10
}

fn default_abs_tol() -> f64 {
    1e-12
}

fn default_sample_count() -> usize {
    201
}

/// A complete run description. Complex numbers are `[re, im]` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub lattice: LatticeParams,
    pub eta: Complex64,
    pub system: SystemConfig,
    #[serde(default = "default_t_span")]
    pub t_span: [f64; 2],
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
    #[serde(default = "default_abs_tol")]
    pub abs_tol: f64,
    #[serde(default = "default_sample_count")]
    pub sample_count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default)]
    pub sign_convention: SignChoice,
    #[serde(default)]
    pub w_convention: WConvention,
}

impl RunConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config from a file, or from standard input when `path` is `-`.
    pub fn load(path: &Path) -> Result<Self> {
        let text = if path.as_os_str() == "-" {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s)?;
            s
        } else {
            std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?
        };
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, tol) in [("rel_tol", self.rel_tol), ("abs_tol", self.abs_tol)] {
            if !(tol > 0.0 && tol <= 1e-2) {
                return Err(Error::Config(format!("{name} = {tol} outside (0, 1e-2]")));
            }
        }
        if self.sample_count < 2 {
            return Err(Error::Config("sample_count must be at least 2".into()));
        }
        let [t0, t1] = self.t_span;
        if !(t0.is_finite() && t1.is_finite() && t1 > t0) {
            return Err(Error::Config(format!("invalid t_span [{t0}, {t1}]")));
        }
        self.lattice()?;
        match &self.system {
            SystemConfig::Rs { x, f, p } => {
                if f.is_some() == p.is_some() {
                    return Err(Error::Config("rs: give exactly one of f, p".into()));
                }
                let len = f.as_ref().or(p.as_ref()).map_or(0, Vec::len);
                if len != x.len() || x.is_empty() {
                    return Err(Error::Config(format!("rs: {} positions, {len} velocities", x.len())));
                }
            }
            SystemConfig::SpinRs { x, f, a, b } => match (f, a, b) {
                (Some(rows), None, None) => {
                    if rows.len() != x.len() || rows.iter().any(|r| r.len() != x.len()) || x.is_empty() {
                        return Err(Error::Config("spin-rs: f must be an N x N matrix".into()));
                    }
                }
                (None, Some(a), Some(b)) => {
                    if a.len() != x.len() || b.len() != x.len() || x.is_empty() {
                        return Err(Error::Config("spin-rs: need one a and one b vector per particle".into()));
                    }
                }
                _ => return Err(Error::Config("spin-rs: give either f or both a and b".into())),
            },
            SystemConfig::N2Leaf { f3, z0, .. } => {
                if f3.is_some() == z0.is_some() {
                    return Err(Error::Config("n2-leaf: give exactly one of f3, z0".into()));
                }
            }
        }
        Ok(())
    }

    pub fn lattice(&self) -> Result<Lattice> {
        Lattice::from_params(&self.lattice).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    pub fn integrator_options(&self) -> IntegratorOptions {
        IntegratorOptions::with_tolerances(self.rel_tol, self.abs_tol).samples(self.sample_count)
    }

    pub fn t_span(&self) -> (f64, f64) {
        (self.t_span[0], self.t_span[1])
    }
}

/// Initial state built from a config.
#[derive(Clone, Debug, PartialEq)]
pub enum InitialState {
    Rs { state: RsState, cut_crossings: Vec<(usize, usize)> },
    Spin(SpinState),
    Leaf { state: N2LeafState, data: N2Data },
}

impl InitialState {
    pub fn build(cfg: &RunConfig, lattice: &Lattice) -> Result<Self> {
        let eta = cfg.eta;
        match &cfg.system {
            SystemConfig::Rs { x, f, p } => {
                let (f, cut_crossings) = match (f, p) {
                    (Some(f), _) => (f.clone(), Vec::new()),
                    (None, Some(p)) => {
                        let m = momenta_to_f(p, x, eta, lattice)?;
                        (m.f, m.cut_crossings)
                    }
                    (None, None) => return Err(Error::Config("rs: missing f or p".into())),
                };
                let state = RsState::new(x.clone(), f, eta)?;
                state.validate(lattice)?;
                Ok(InitialState::Rs { state, cut_crossings })
            }
            SystemConfig::SpinRs { x, f, a, b } => {
                let n = x.len();
                let matrix = match (f, a, b) {
                    (Some(rows), _, _) => {
                        nalgebra::DMatrix::from_row_iterator(n, n, rows.iter().flat_map(|r| r.iter().copied()))
                    }
                    (None, Some(a), Some(b)) => rank_factor_embed(a, b)?,
                    _ => return Err(Error::Config("spin-rs: missing f or a, b".into())),
                };
                let state = SpinState::new(x.clone(), matrix, eta)?;
                state.validate(lattice)?;
                Ok(InitialState::Spin(state))
            }
            SystemConfig::N2Leaf { x, f, f3, z0 } => {
                let mut data = N2Data {
                    x1: x[0],
                    x2: x[1],
                    f1: f[0],
                    f2: f[1],
                    f3_sq: Complex64::new(0.0, 0.0),
                    eta,
                };
                let z0 = match (f3, z0) {
                    (Some(f3), _) => {
                        data.f3_sq = f3 * f3;
                        solve_z0(&data, None, lattice)?.z0
                    }
                    (None, Some(z0)) => {
                        let z0 = *z0;
                        data.f3_sq = crate::lax::f3_squared_from_z0(&data.leaf(z0), lattice)?;
                        z0
                    }
                    (None, None) => return Err(Error::Config("n2-leaf: missing f3 or z0".into())),
                };
                let state = data.leaf(z0);
                state.validate(lattice)?;
                Ok(InitialState::Leaf { state, data })
            }
        }
    }
}
