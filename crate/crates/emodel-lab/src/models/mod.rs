//! Concrete model catalogue: closed forms and the cross-checks tying them to the generic machinery.

pub mod su3;
pub mod biyb;
pub mod cpn;
pub mod pcm;
pub mod pendulum;
pub mod reduction;
pub mod ybcpn;

use std::collections::BTreeMap;

use nalgebra::DVector;
use serde::Serialize;

use crate::algebra::{CMat, I};

/// Regular Cartan element `i diag(N-1, N-3, …, 1-N)`.
pub fn regular_xi(n: usize) -> CMat {
    CMat::from_diagonal(&DVector::from_iterator(n, (0..n).map(|a| I * ((n - 1) as f64 - 2.0 * a as f64))))
}

/// `i diag(1, …, 1, 1-N)`, whose orbit is `CP^{N-1}`.
pub fn block_xi(n: usize) -> CMat {
    let mut d = vec![I; n];
    d[n - 1] = I * -((n as f64) - 1.0);
    CMat::from_diagonal(&DVector::from_vec(d))
}

/// A single named residual compared against a threshold.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub threshold: f64,
    pub pass: bool,
}

/// Ordered collection of checks produced by a verification suite.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub samples: usize,
    pub checks: Vec<Check>,
    /// Reported but not gated, e.g. residuals of alternative transcriptions.
    pub notes: BTreeMap<String, f64>,
}

impl SuiteReport {
    pub fn new(suite: &str, seed: u64, samples: usize) -> Self {
        Self {
            suite: suite.to_string(),
            seed,
            samples,
            checks: Vec::new(),
            notes: BTreeMap::new(),
        }
    }

    /// Records `residual` under `name`, keeping the maximum if the name already exists.
    pub fn record(&mut self, name: &str, residual: f64, threshold: f64) {
        // NaN must never pass
        let residual = if residual.is_nan() { f64::INFINITY } else { residual };
        if let Some(c) = self.checks.iter_mut().find(|c| c.name == name) {
            c.residual = c.residual.max(residual);
            c.pass = c.residual <= c.threshold;
        } else {
            self.checks.push(Check {
                name: name.to_string(),
                residual,
                threshold,
                pass: residual <= threshold,
            });
        }
    }

    /// Records an ungated value, keeping the maximum.
    pub fn note(&mut self, name: &str, value: f64) {
        let v = self.notes.entry(name.to_string()).or_insert(f64::NEG_INFINITY);
        *v = v.max(value);
    }

    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// Replaces thresholds of checks named in `tol` and re-evaluates them.
    pub fn apply_tolerances(&mut self, tol: &BTreeMap<String, f64>) {
        for c in &mut self.checks {
            if let Some(&t) = tol.get(&c.name) {
                c.threshold = t;
                c.pass = c.residual <= t;
            }
        }
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}
