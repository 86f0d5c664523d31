//! First-arrival delay distributions.
//!
//! A molecule released at slot `i` arrives at slot `i + n`, where the delay
//! `n ≥ 0` is drawn from a pmf `p_N` supported on `{0, …, n_max}` plus an
//! explicit `tail_mass` for delays beyond the truncation horizon. Delays past
//! the session horizon are indistinguishable from "lost", so truncating with
//! an explicit tail is exact for every in-scope computation.
//!
//! Valid distributions are causal (no support below 0), normalized within
//! [`Real::NORM_TOL`], and have `F_N(n_max) > 0` so that a molecule has a
//! positive chance of ever being observed.

use rand::Rng;

use crate::num::Real;
use crate::{Error, Result};

/// Truncated first-arrival delay pmf with explicit tail mass.
///
/// Immutable after construction; safe to share across threads. Sampling takes
/// a caller-owned random source.
#[derive(Debug, Clone, PartialEq)]
pub struct FirstArrivalDist<R: Real> {
    pmf: Vec<R>,
    cum: Vec<R>,
    tail_mass: R,
}

impl<R: Real> FirstArrivalDist<R> {
    /// Geometric delays: `p_N(n) = (1−ρ)·ρ^n` truncated at `n_max`, with
    /// `tail_mass = ρ^(n_max+1)`. Satisfies every validity condition for any
    /// `ρ ∈ (0, 1)`.
    pub fn geometric(rho: R, n_max: usize) -> Result<Self> {
        if rho.is_nan() || rho <= R::zero() || rho >= R::one() {
            return Err(Error::InvalidDistribution(format!(
                "geometric ratio must lie strictly inside (0, 1), got {rho}"
            )));
        }
        let mut pmf = Vec::with_capacity(n_max + 1);
        let mut term = R::one() - rho;
        for _ in 0..=n_max {
            pmf.push(term);
            term *= rho;
        }
        // term is now (1−ρ)ρ^(n_max+1); the tail is ρ^(n_max+1).
        let tail_mass = term / (R::one() - rho);
        Self::validated(pmf, tail_mass)
    }

    /// Delays of a 1-D Brownian motion first passage to an absorbing point at
    /// `distance`, discretized by cdf differences over slots of width `dt`:
    /// `p_N(n) = F((n+1)·dt) − F(n·dt)` with `F(τ) = erfc(d / (2√(Dτ)))`.
    ///
    /// The cdf-difference discretization guarantees a valid pmf and exact
    /// normalization; `p_N(0) = F(dt) > 0` always.
    pub fn brownian_1d(distance: R, diffusion: R, dt: R, n_max: usize) -> Result<Self> {
        for (name, v) in [("distance", distance), ("diffusion", diffusion), ("dt", dt)] {
            if v.is_nan() || v <= R::zero() || !v.is_finite() {
                return Err(Error::InvalidDistribution(format!(
                    "{name} must be strictly positive and finite, got {v}"
                )));
            }
        }
        let passage_cdf = |tau: R| -> R {
            if tau <= R::zero() {
                R::zero()
            } else {
                (distance / (R::two() * (diffusion * tau).sqrt())).erfc()
            }
        };
        let mut pmf = Vec::with_capacity(n_max + 1);
        let mut prev = R::zero();
        for n in 0..=n_max {
            let next = passage_cdf(dt * R::cast_usize(n + 1));
            pmf.push((next - prev).max(R::zero()));
            prev = next;
        }
        let tail_mass = (R::one() - prev).max(R::zero());
        Self::validated(pmf, tail_mass)
    }

    /// User-supplied pmf. Entries must be nonnegative and total (including
    /// the tail) within [`Real::TABLE_TOL`] of 1; the table is then
    /// renormalized exactly.
    pub fn from_table(values: &[R], tail_mass: R) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidDistribution(
                "empty probability table".to_string(),
            ));
        }
        for (n, &v) in values.iter().enumerate() {
            if v.is_nan() || v < R::zero() || !v.is_finite() {
                return Err(Error::InvalidDistribution(format!(
                    "table entry {n} is not a probability: {v}"
                )));
            }
        }
        if tail_mass.is_nan() || tail_mass < R::zero() || !tail_mass.is_finite() {
            return Err(Error::InvalidDistribution(format!(
                "tail mass is not a probability: {tail_mass}"
            )));
        }
        let total = values.iter().copied().sum::<R>() + tail_mass;
        if (total - R::one()).abs() > R::TABLE_TOL {
            return Err(Error::InvalidDistribution(format!(
                "table total {total} is off from 1 by more than the tolerance"
            )));
        }
        let pmf: Vec<R> = values.iter().map(|&v| v / total).collect();
        Self::validated(pmf, tail_mass / total)
    }

    /// Parses the plain-text table format: one probability per line, with an
    /// optional final line `tail <value>`. Blank lines and lines starting
    /// with `#` are ignored.
    pub fn from_table_text(text: &str) -> Result<Self> {
        let mut values: Vec<R> = Vec::new();
        let mut tail: Option<R> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if tail.is_some() {
                return Err(Error::Parse(format!(
                    "line {}: data after the tail line",
                    lineno + 1
                )));
            }
            if let Some(rest) = line.strip_prefix("tail") {
                let v: f64 = rest.trim().parse().map_err(|_| {
                    Error::Parse(format!(
                        "line {}: malformed tail value {rest:?}",
                        lineno + 1
                    ))
                })?;
                tail = Some(R::cast_f64(v));
            } else {
                let v: f64 = line.parse().map_err(|_| {
                    Error::Parse(format!(
                        "line {}: malformed probability {line:?}",
                        lineno + 1
                    ))
                })?;
                values.push(R::cast_f64(v));
            }
        }
        Self::from_table(&values, tail.unwrap_or_else(R::zero))
    }

    fn validated(pmf: Vec<R>, tail_mass: R) -> Result<Self> {
        debug_assert!(!pmf.is_empty());
        let support: R = pmf.iter().copied().sum();
        let total = support + tail_mass;
        if (total - R::one()).abs() > R::NORM_TOL {
            return Err(Error::InvalidDistribution(format!(
                "pmf plus tail sums to {total}, not 1"
            )));
        }
        if support.is_nan() || support <= R::zero() {
            return Err(Error::InvalidDistribution(
                "no arrival mass within the horizon: F_N(n_max) must be positive".to_string(),
            ));
        }
        let mut cum = Vec::with_capacity(pmf.len());
        let mut acc = R::zero();
        for &p in &pmf {
            acc += p;
            cum.push(acc.min(R::one()));
        }
        Ok(Self {
            pmf,
            cum,
            tail_mass,
        })
    }

    /// Truncation horizon: the largest delay with explicit pmf mass.
    pub fn n_max(&self) -> usize {
        self.pmf.len() - 1
    }

    /// `p_N(n)`; zero beyond the horizon (that mass lives in the tail).
    pub fn pmf(&self, n: usize) -> R {
        self.pmf.get(n).copied().unwrap_or_else(R::zero)
    }

    pub fn pmf_slice(&self) -> &[R] {
        &self.pmf
    }

    /// Mass assigned to delays strictly beyond `n_max`.
    pub fn tail_mass(&self) -> R {
        self.tail_mass
    }

    /// `p_N(0)`, the chance of same-slot arrival. Some schemes degenerate
    /// when this is zero, so callers may want to flag that case.
    pub fn instant_arrival_prob(&self) -> R {
        self.pmf[0]
    }

    /// Cdf `F_N(n) = Σ_{i=0}^{n} p_N(i)`. Zero for `n < 0`, saturates at
    /// `1 − tail_mass` for `n ≥ n_max`, never exceeds 1.
    pub fn cdf(&self, n: i64) -> R {
        if n < 0 {
            return R::zero();
        }
        let idx = (n as usize).min(self.n_max());
        self.cum[idx]
    }

    /// Draws one delay: `Some(n)` with probability `p_N(n)`, `None` ("lost",
    /// never observed within any horizon) with probability `tail_mass`.
    pub fn sample_delay<G: Rng + ?Sized>(&self, rng: &mut G) -> Option<usize> {
        let u = R::cast_f64(rng.random::<f64>());
        let idx = self.cum.partition_point(|&c| c <= u);
        if idx < self.cum.len() {
            Some(idx)
        } else if self.tail_mass > R::zero() {
            None
        } else {
            // Rounding can push u to the saturated cdf value even with an
            // empty tail; the draw belongs to the last support point.
            Some(self.n_max())
        }
    }
}
