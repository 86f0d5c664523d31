//! Discrete-time molecular timing channel laboratory.
//!
//! A transmitter releases indistinguishable molecules into a medium over `t`
//! discrete slots; each molecule independently draws a first-arrival delay
//! from a distribution `p_N` and is absorbed when it first hits the receiver.
//! The receiver only sees per-slot arrival counts. This crate models that
//! channel end to end:
//!
//! - [`arrival`]: first-arrival delay distributions (geometric, 1-D
//!   first-passage, user tables), validation and sampling;
//! - [`channel`]: forward simulation, the exact conditional law on small
//!   instances, exact mutual information, and small-instance capacity via
//!   alternating maximization;
//! - [`bounds`]: maximum-entropy upper bounds and the combinatorial
//!   identities behind them;
//! - [`schemes`]: three constructive coding schemes (interval timing,
//!   amplitude levels, Bernoulli release) with analytic lower bounds and
//!   Monte-Carlo validation hooks.
//!
//! All information quantities are in bits (log base 2). The numeric kernel is
//! generic over the scalar type via [`num::Real`]; `f64` is the working
//! precision for experiments, with `*64`/`*32` aliases exported at the crate
//! root.

pub mod arrival;
pub mod bounds;
pub mod channel;
pub mod num;
pub mod schemes;

pub use arrival::FirstArrivalDist;
pub use bounds::{BoundName, BoundReport};
pub use channel::{
    worker_rng, ArrivalRecord, CapacityResult, ConditionalLaw, InputEnsemble, ReleasePattern,
};
pub use num::Real;
pub use schemes::{SchemeAParams, SchemeBParams, SchemeCParams};

/// Errors produced by channel construction, enumeration and scheme setup.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error(
        "instance too large for exact enumeration: {molecules} molecules over {slots} slots \
         (limits: {max_molecules} molecules, {max_slots} slots)"
    )]
    TooLarge {
        slots: u64,
        molecules: u64,
        max_slots: u64,
        max_molecules: u64,
    },
    #[error("message index {index} out of range 1..={count}")]
    MessageOutOfRange { index: u64, count: u64 },
    #[error("table parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// `f64` aliases, the default precision for experiments.
pub type FirstArrivalDist64 = FirstArrivalDist<f64>;
pub type InputEnsemble64 = InputEnsemble<f64>;
pub type CapacityResult64 = CapacityResult<f64>;
pub type BoundReport64 = BoundReport<f64>;
pub type SchemeBParams64 = SchemeBParams<f64>;
pub type SchemeCParams64 = SchemeCParams<f64>;

/// `f32` aliases, for callers that trade precision for footprint.
pub type FirstArrivalDist32 = FirstArrivalDist<f32>;
pub type InputEnsemble32 = InputEnsemble<f32>;
pub type SchemeBParams32 = SchemeBParams<f32>;
pub type SchemeCParams32 = SchemeCParams<f32>;
