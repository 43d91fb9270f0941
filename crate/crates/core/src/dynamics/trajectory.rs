use std::io::Write;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::state::PhaseState;
use crate::error::Result;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegratorStats {
    pub steps: usize,
    pub rejected_steps: usize,
    pub rhs_evaluations: usize,
    pub rel_tol: f64,
    pub abs_tol: f64,
}

/// Snapshots of an integrated trajectory. Times are strictly increasing and
/// every state has the shape of the initial one.
///
/// JSON form: `{times: [...], states: [...], stats: {...}}`; floats are
/// written in shortest round-trip form so the JSON file reproduces the
/// trajectory bit for bit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory<S> {
    pub times: Vec<f64>,
    pub states: Vec<S>,
    pub stats: IntegratorStats,
}

impl<S> Trajectory<S> {
    pub fn first(&self) -> &S {
        &self.states[0]
    }

    pub fn last(&self) -> &S {
        &self.states[self.states.len() - 1]
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &S)> {
        self.times.iter().copied().zip(&self.states)
    }
}

impl<S: Serialize> Trajectory<S> {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }
}

impl<S: DeserializeOwned> Trajectory<S> {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

impl<S: PhaseState> Trajectory<S> {
    /// CSV with a `t` column followed by `<name>_re`, `<name>_im` for every
    /// flattened coordinate, 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let names = match self.states.first() {
            Some(s) => s.coordinate_names(),
            None => Vec::new(),
        };
        let mut header = vec!["t".to_string()];
        for n in &names {
            header.push(format!("{n}_re"));
            header.push(format!("{n}_im"));
        }
        writeln!(out, "{}", header.join(","))?;
        for (t, s) in self.iter() {
            let mut row = vec![format!("{t:.16e}")];
            for z in s.to_flat() {
                row.push(format!("{:.16e}", z.re));
                row.push(format!("{:.16e}", z.im));
            }
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is ascii"))
    }
}
