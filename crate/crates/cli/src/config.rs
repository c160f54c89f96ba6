//! Run settings and command-line value parsing.

use std::str::FromStr;

use hvlab::distributions::{MonteCarlo, PowerLawDistribution};
use hvlab::oracle::QuantumState;
use num_complex::Complex64;

use crate::report::Format;

/// A bad command-line value; reported with exit code 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

impl From<hvlab::Error> for UsageError {
    fn from(e: hvlab::Error) -> Self {
        UsageError(e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub samples: u64,
    /// Index of the power-law hidden-variable density.
    pub n: u32,
    pub format: Format,
    pub grid_step: f64,
    pub sigma: f64,
    pub workers: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            samples: 1_000_000,
            n: 0,
            format: Format::Text,
            grid_step: 0.01,
            sigma: 4.0,
            workers: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), UsageError> {
        if self.samples < 1 {
            return Err(UsageError("--samples must be at least 1".into()));
        }
        if !(self.grid_step > 0.0 && self.grid_step <= 0.5) {
            return Err(UsageError(format!("--grid-step must lie in (0, 0.5], got {}", self.grid_step)));
        }
        if !(self.sigma > 0.0) {
            return Err(UsageError(format!("--sigma must be positive, got {}", self.sigma)));
        }
        if self.workers == Some(0) {
            return Err(UsageError("--workers must be at least 1".into()));
        }
        Ok(())
    }

    /// Estimator for the `stream`-th Monte Carlo run of an experiment.
    pub fn mc(&self, stream: u64) -> MonteCarlo {
        let mc = MonteCarlo::new(self.samples, self.seed.wrapping_add(stream));
        match self.workers {
            Some(w) => mc.with_workers(w),
            None => mc,
        }
    }

    pub fn distribution(&self) -> PowerLawDistribution {
        PowerLawDistribution::with_index(self.n)
    }
}

pub fn parse_reals(s: &str) -> Result<Vec<f64>, UsageError> {
    s.split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| UsageError(format!("'{t}' is not a finite number")))
        })
        .collect()
}

pub fn parse_fixed<const D: usize>(s: &str, what: &str) -> Result<[f64; D], UsageError> {
    let v = parse_reals(s)?;
    v.try_into()
        .map_err(|v: Vec<f64>| UsageError(format!("{what} needs {D} components, got {}", v.len())))
}

/// Three probabilities, renormalised when their sum is within 1e-6 of 1.
pub fn parse_probs(s: &str) -> Result<[f64; 3], UsageError> {
    let p: [f64; 3] = parse_fixed(s, "--probs")?;
    if p.iter().any(|x| *x < 0.0) {
        return Err(UsageError(format!("probabilities must be non-negative, got {s}")));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > 1e-6 {
        return Err(UsageError(format!("probabilities must sum to 1, got {total}")));
    }
    Ok(p.map(|x| x / total))
}

/// Comma-separated complex amplitudes such as `0.6,0.8i` or `1+2i,0,-1`,
/// normalised.
pub fn parse_state(s: &str) -> Result<QuantumState, UsageError> {
    let amps = s
        .split(',')
        .map(|t| {
            let t = t.trim();
            Complex64::from_str(t).map_err(|_| UsageError(format!("'{t}' is not a complex number")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(QuantumState::pure_normalized(amps)?)
}

pub fn fmt_list(xs: &[f64]) -> String {
    let parts: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
    parts.join(",")
}
