//! Sweep configuration: one JSON document per experiment.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use molcap_core::FirstArrivalDist;

use crate::{Error, Result};

/// What varies across the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMode {
    /// Fixed molecule budget, growing horizon.
    FixedMSweepT,
    /// Fixed horizon, growing budget.
    FixedTSweepM,
    /// Budget proportional to the horizon: `m = round(α·t)` on every point.
    JointLinear,
}

/// First-arrival distribution selection.
#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DistSpec {
    Geometric {
        rho: f64,
        n_max: usize,
    },
    Brownian1d {
        distance: f64,
        diffusion: f64,
        dt: f64,
        n_max: usize,
    },
    Table {
        pmf: Vec<f64>,
        #[serde(default)]
        tail: f64,
    },
    /// Plain-text table: one probability per line, optional final
    /// `tail <value>` line.
    TableFile {
        path: PathBuf,
    },
}

impl DistSpec {
    pub fn build(&self) -> Result<FirstArrivalDist<f64>> {
        let dist = match self {
            DistSpec::Geometric { rho, n_max } => FirstArrivalDist::geometric(*rho, *n_max)?,
            DistSpec::Brownian1d {
                distance,
                diffusion,
                dt,
                n_max,
            } => FirstArrivalDist::brownian_1d(*distance, *diffusion, *dt, *n_max)?,
            DistSpec::Table { pmf, tail } => FirstArrivalDist::from_table(pmf, *tail)?,
            DistSpec::TableFile { path } => {
                let text = std::fs::read_to_string(path)?;
                FirstArrivalDist::from_table_text(&text)?
            }
        };
        Ok(dist)
    }
}

/// Scheme knobs; a scheme's column is computed only when its knob is set.
#[derive(Debug, Clone, Default, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeParams {
    /// Chebyshev confidence for the amplitude scheme (must exceed 1).
    pub k: Option<f64>,
    /// Release probability for the Bernoulli scheme (strictly inside (0,1)).
    pub r: Option<f64>,
    /// Budget ratio for `joint_linear` mode; other modes derive `α = m/t`
    /// per row.
    pub alpha: Option<f64>,
}

fn default_tol() -> f64 {
    molcap_core::channel::CAPACITY_DEFAULT_TOL
}

/// Full experiment description.
#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub mode: SweepMode,
    /// Grid of `[t, m]` pairs, evaluated in order.
    pub grid: Vec<(u64, u64)>,
    pub dist: DistSpec,
    #[serde(default)]
    pub scheme: SchemeParams,
    #[serde(default)]
    pub seed: u64,
    /// Monte-Carlo validation trials per row; 0 skips the MC columns.
    #[serde(default)]
    pub trials: u64,
    /// Also compute exact mutual information and capacity per row; only
    /// valid when every grid point is inside the enumeration guard rails.
    #[serde(default)]
    pub exact: bool,
    /// Capacity-maximization tolerance in bits.
    #[serde(default = "default_tol")]
    pub tol: f64,
}

impl SweepSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: SweepSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::Config("grid must not be empty".to_string()));
        }
        for &(t, m) in &self.grid {
            if t < 1 || m < 1 {
                return Err(Error::Config(format!(
                    "grid point ({t}, {m}) needs t ≥ 1 and m ≥ 1"
                )));
            }
        }
        if let Some(k) = self.scheme.k {
            if k.is_nan() || k <= 1.0 || !k.is_finite() {
                return Err(Error::Config(format!("scheme.k must exceed 1, got {k}")));
            }
        }
        if let Some(r) = self.scheme.r {
            if r.is_nan() || r <= 0.0 || r >= 1.0 {
                return Err(Error::Config(format!(
                    "scheme.r must lie strictly inside (0, 1), got {r}"
                )));
            }
        }
        if let Some(alpha) = self.scheme.alpha {
            if alpha.is_nan() || alpha <= 0.0 || !alpha.is_finite() {
                return Err(Error::Config(format!(
                    "scheme.alpha must be positive, got {alpha}"
                )));
            }
        }
        if self.mode == SweepMode::JointLinear {
            let alpha = self.scheme.alpha.ok_or_else(|| {
                Error::Config("joint_linear mode requires scheme.alpha".to_string())
            })?;
            for &(t, m) in &self.grid {
                let expected = (alpha * t as f64).round() as u64;
                if m != expected {
                    return Err(Error::Config(format!(
                        "joint_linear requires m = round(α·t): got ({t}, {m}), expected m = {expected}"
                    )));
                }
            }
        }
        if self.scheme.r.is_some() && self.trials > 0 && self.trials < 10_000 {
            return Err(Error::Config(format!(
                "Monte-Carlo validation of the release scheme needs at least 10^4 trials, got {}",
                self.trials
            )));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::Config(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        Ok(())
    }
}
