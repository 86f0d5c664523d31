//! Scheme A: interval timing.
//!
//! The session is divided into `ℓ = ⌊t/τ⌋` intervals of `τ = ⌊√t⌋` slots. A
//! message `j ∈ {1…ℓ}` releases all `m` molecules at the first slot of
//! interval `j`; the receiver decodes the interval of the first nonzero
//! arrival slot, or `ℓ+1` when nothing arrives. Arrivals in the leftover
//! slots past `ℓτ` are clamped into interval `ℓ`, which keeps the decoder
//! total while leaving the error analysis intact (those outcomes were
//! already errors or correct-late arrivals).

use rand::Rng;

use crate::arrival::FirstArrivalDist;
use crate::channel::{transmit, ArrivalRecord, ReleasePattern};
use crate::num::Real;
use crate::{Error, Result};

/// Interval-timing layout for a session of `t` slots and `m` molecules.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SchemeAParams {
    t: u64,
    m: u64,
    tau: u64,
    ell: u64,
}

/// Analytic error probability and capacity lower bounds for scheme A.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeABound<R> {
    /// `(1 − F_N(τ))^m`, the probability that every molecule outlasts τ.
    pub p_err: R,
    /// `(1 − P_e)·log₂(√t − 1) − 1`.
    pub lb_sqrt: R,
    /// `(1 − P_e)·log₂ℓ − 1`, using the true interval count; never below
    /// `lb_sqrt`.
    pub lb_exact_ell: R,
}

impl SchemeAParams {
    pub fn new(t: u64, m: u64) -> Result<Self> {
        if t < 1 || m < 1 {
            return Err(Error::InvalidParameter(format!(
                "interval scheme needs t ≥ 1 and m ≥ 1, got t={t} m={m}"
            )));
        }
        let tau = t.isqrt();
        let ell = t / tau;
        Ok(Self { t, m, tau, ell })
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    /// Interval length `τ = ⌊√t⌋`.
    pub fn tau(&self) -> u64 {
        self.tau
    }

    /// Interval count `ℓ = ⌊t/τ⌋`; messages are `1…ℓ`.
    pub fn ell(&self) -> u64 {
        self.ell
    }

    /// The decoder's extra "nothing arrived" output.
    pub fn erasure_symbol(&self) -> u64 {
        self.ell + 1
    }

    /// Message `j` releases all `m` molecules at 1-based slot `(j−1)τ + 1`.
    pub fn encode(&self, j: u64) -> Result<ReleasePattern> {
        if j < 1 || j > self.ell {
            return Err(Error::MessageOutOfRange {
                index: j,
                count: self.ell,
            });
        }
        let mut x = vec![0u64; self.t as usize];
        x[((j - 1) * self.tau) as usize] = self.m;
        ReleasePattern::new(x, self.m)
    }

    /// Interval index of the first nonzero arrival slot, clamped to `ℓ`;
    /// `ℓ+1` when all counts are zero.
    pub fn decode(&self, record: &ArrivalRecord) -> u64 {
        match record.counts().iter().position(|&c| c > 0) {
            Some(idx) => {
                let slot = idx as u64 + 1; // 1-based
                slot.div_ceil(self.tau).min(self.ell)
            }
            None => self.ell + 1,
        }
    }

    /// Analytic bounds; requires `t ≥ 4` so that `log₂(√t − 1)` is
    /// nonnegative.
    pub fn bound<R: Real>(&self, dist: &FirstArrivalDist<R>) -> Result<SchemeABound<R>> {
        if self.t < 4 {
            return Err(Error::InvalidParameter(format!(
                "interval bound needs t ≥ 4, got t={}",
                self.t
            )));
        }
        let miss = R::one() - dist.cdf(self.tau as i64);
        let p_err = miss.powi(self.m as i32);
        let success = R::one() - p_err;
        let lb_sqrt = success * (R::cast_u64(self.t).sqrt() - R::one()).log2() - R::one();
        let lb_exact_ell = success * R::cast_u64(self.ell).log2() - R::one();
        Ok(SchemeABound {
            p_err,
            lb_sqrt,
            lb_exact_ell,
        })
    }

    /// Monte-Carlo decoding-error frequency over uniformly random messages.
    pub fn simulate_error_rate<R: Real, G: Rng + ?Sized>(
        &self,
        dist: &FirstArrivalDist<R>,
        trials: u64,
        rng: &mut G,
    ) -> R {
        let mut errors = 0u64;
        for _ in 0..trials {
            let j = rng.random_range(1..=self.ell);
            let pattern = self.encode(j).expect("message in range");
            let received = transmit(&pattern, dist, rng);
            if self.decode(&received) != j {
                errors += 1;
            }
        }
        R::cast_u64(errors) / R::cast_u64(trials)
    }
}
