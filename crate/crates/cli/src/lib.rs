//! Experiment harness: configuration, sweep execution, scaling fits, and
//! CSV/SVG emission for the molecular timing channel laboratory.
//!
//! A sweep is described by a single JSON document (see [`config::SweepSpec`])
//! so that every experiment is reproducible from one serializable source of
//! truth; command-line flags override individual fields. Sweep rows are
//! deterministic for a fixed config and seed: each grid point draws from its
//! own random stream derived from the master seed and the row index, so
//! parallel execution cannot perturb the output.

pub mod config;
pub mod emit;
pub mod fit;
pub mod sweep;

pub use config::{DistSpec, SchemeParams, SweepMode, SweepSpec};
pub use emit::{parse_csv, to_csv, to_svg, EmitFormat, FitOverlay};
pub use fit::{fit_rows, fit_scaling, FitModel, FitResult, XVar};
pub use sweep::{run_sweep, SweepRow};

/// Harness-level errors; core errors pass through.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] molcap_core::Error),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("config error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("config error: {0}")]
    Config(String),
    #[error("sandwich violation at t={t} m={m}: {lb_name} = {lb} exceeds {ub_name} = {ub}")]
    Sandwich {
        t: u64,
        m: u64,
        lb_name: &'static str,
        lb: f64,
        ub_name: &'static str,
        ub: f64,
    },
    #[error("fit error: {0}")]
    Fit(String),
    #[error("csv error: {0}")]
    Csv(String),
}

pub type Result<T> = std::result::Result<T, Error>;
