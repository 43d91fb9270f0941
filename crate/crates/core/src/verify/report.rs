use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

/// One named quantity compared against its threshold. A check passes iff
/// `residual < tolerance`; NaN never passes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn pass(&self) -> bool {
        self.residual < self.tolerance
    }

    fn ratio(&self) -> f64 {
        let r = self.residual / self.tolerance;
        if r.is_nan() {
            f64::INFINITY
        } else {
            r
        }
    }
}

/// Outcome of one verification suite.
///
/// `max_residual` and `tolerance` are taken from the check closest to (or
/// furthest past) its threshold, so `pass == (max_residual < tolerance)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub pass: bool,
    pub max_residual: f64,
    pub tolerance: f64,
    pub seed: Option<u64>,
    pub convention: Option<String>,
    pub runtime_ms: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass())
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Accumulates checks and notes while a suite runs.
#[derive(Debug)]
pub struct ReportBuilder {
    suite: String,
    checks: Vec<Check>,
    notes: Vec<String>,
    overrides: BTreeMap<String, f64>,
    start: Instant,
}

impl ReportBuilder {
    pub fn new(suite: impl Into<String>) -> Self {
        ReportBuilder {
            suite: suite.into(),
            checks: Vec::new(),
            notes: Vec::new(),
            overrides: BTreeMap::new(),
            start: Instant::now(),
        }
    }

    /// Replaces the tolerance of any check whose name is a key of `overrides`.
    pub fn with_overrides(mut self, overrides: &BTreeMap<String, f64>) -> Self {
        self.overrides = overrides.clone();
        self
    }

    pub fn check(&mut self, name: impl Into<String>, residual: f64, tolerance: f64) -> &mut Self {
        let name = name.into();
        let tolerance = self.overrides.get(&name).copied().unwrap_or(tolerance);
        self.checks.push(Check {
            name,
            residual,
            tolerance,
        });
        self
    }

    /// A check that an observed quantity exceeds `threshold`, stored as
    /// `threshold / observed < 1`.
    pub fn check_exceeds(&mut self, name: impl Into<String>, observed: f64, threshold: f64) -> &mut Self {
        let residual = if observed.is_nan() { f64::NAN } else { threshold / observed };
        self.check(name, residual, 1.0)
    }

    pub fn note(&mut self, note: impl Into<String>) -> &mut Self {
        self.notes.push(note.into());
        self
    }

    /// Records a check, keeping the larger residual if one with this name
    /// already exists (NaN wins).
    pub fn check_max(&mut self, name: impl Into<String>, residual: f64, tolerance: f64) -> &mut Self {
        let name = name.into();
        match self.checks.iter_mut().find(|c| c.name == name) {
            Some(c) => {
                if residual.is_nan() || residual > c.residual {
                    c.residual = residual;
                }
                self
            }
            None => self.check(name, residual, tolerance),
        }
    }

    /// Merges the checks of another report into this one by name (keeping
    /// the worst residual), optionally prefixing the names. Notes are not
    /// copied.
    pub fn absorb(&mut self, prefix: Option<&str>, report: &VerificationReport) -> &mut Self {
        for c in &report.checks {
            let name = match prefix {
                Some(p) => format!("{p}/{}", c.name),
                None => c.name.clone(),
            };
            self.check_max(name, c.residual, c.tolerance);
        }
        self
    }

    pub fn finish(self, seed: Option<u64>, convention: Option<String>) -> VerificationReport {
        let worst = self
            .checks
            .iter()
            .max_by(|a, b| a.ratio().total_cmp(&b.ratio()));
        let (max_residual, tolerance) = match worst {
            Some(c) => (c.residual, c.tolerance),
            None => (0.0, 0.0),
        };
        let pass = !self.checks.is_empty() && self.checks.iter().all(Check::pass);
        VerificationReport {
            suite: self.suite,
            pass,
            max_residual,
            tolerance,
            seed,
            convention,
            runtime_ms: self.start.elapsed().as_secs_f64() * 1e3,
            notes: self.notes,
            checks: self.checks,
        }
    }
}
