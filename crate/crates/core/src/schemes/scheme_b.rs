//! Scheme B: amplitude levels with Chebyshev decoding.
//!
//! All molecules go out in the first slot. A message `j ∈ {1…n}` releases
//! `W_j ≈ 2jk√(mq/p)` molecules, where `p = F_N(t)` is the chance a molecule
//! arrives in session and `k > 1` sets the Chebyshev confidence; the top
//! level is the full budget `m`. The receiver sums all arrivals into
//! `U = Σᵢ yᵢ` and picks the level whose Chebyshev window
//! `((2j−1)k√(mpq), (2j+1)k√(mpq)]` contains `U`, erasing when none does.
//! Mis-decoding probability is at most `1/k²` per Chebyshev's inequality.

use rand::Rng;

use crate::arrival::FirstArrivalDist;
use crate::num::{h2, Real};
use crate::{Error, Result};

/// Amplitude-level layout for budget `m`, horizon `t`, confidence `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeBParams<R: Real> {
    t: u64,
    m: u64,
    k: R,
    p: R,
    q: R,
    levels: Vec<u64>,
}

/// Analytic error cap and capacity lower bound for scheme B.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeBBound<R> {
    /// Chebyshev decoding-error cap `1/k²` (0 in the noiseless case).
    pub err_ub: R,
    /// Lower bound in bits, `½(1−1/k²)·log₂m + K`.
    pub lb: R,
    /// The constant `K`, explicit: `lb == ½(1−1/k²)·log₂m + k_const`.
    pub k_const: R,
    /// True when `F_N(t) = 1` and the bound degenerates to lossless
    /// amplitude readout `log₂(m+1)`.
    pub noiseless: bool,
}

impl<R: Real> SchemeBParams<R> {
    /// Builds the level set. Fails when `k ≤ 1`, when `p = F_N(t)` is 0 or
    /// 1 (see [`scheme_b_bound`] for the noiseless case), when no level fits
    /// (`n = 0`), or when rounding collides two levels, meaning `m` is too
    /// small for this `(k, p)` and the scheme cannot signal.
    pub fn new(t: u64, m: u64, k: R, dist: &FirstArrivalDist<R>) -> Result<Self> {
        if t < 1 || m < 1 {
            return Err(Error::InvalidParameter(format!(
                "amplitude scheme needs t ≥ 1 and m ≥ 1, got t={t} m={m}"
            )));
        }
        if k.is_nan() || k <= R::one() || !k.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "Chebyshev parameter must exceed 1, got {k}"
            )));
        }
        let p = dist.cdf(t as i64);
        if p <= R::zero() {
            return Err(Error::InvalidParameter(
                "F_N(t) = 0: no molecule can arrive in session".to_string(),
            ));
        }
        if p >= R::one() {
            return Err(Error::InvalidParameter(
                "F_N(t) = 1: noiseless channel, amplitude levels degenerate".to_string(),
            ));
        }
        let q = R::one() - p;
        let m_r = R::cast_u64(m);
        let spacing = R::two() * k * (m_r * q / p).sqrt();
        let n_real = (m_r * p / q).sqrt() / (R::two() * k);
        let n_levels = n_real.round().to_u64().expect("level count fits in u64");
        if n_levels == 0 {
            return Err(Error::InvalidParameter(format!(
                "no amplitude level fits: (1/2k)√(mp/q) = {n_real} rounds to zero"
            )));
        }
        let mut levels = Vec::with_capacity(n_levels as usize);
        for j in 1..n_levels {
            let w = (spacing * R::cast_u64(j))
                .round()
                .to_u64()
                .expect("level fits in u64");
            levels.push(w);
        }
        levels.push(m); // the peak signal is the full budget
        let mut prev = 0u64;
        for (idx, &w) in levels.iter().enumerate() {
            if w <= prev {
                return Err(Error::InvalidParameter(format!(
                    "amplitude level collision after rounding: W_{} = {w} does not exceed W_{} = {prev}",
                    idx + 1,
                    idx
                )));
            }
            prev = w;
        }
        Ok(Self {
            t,
            m,
            k,
            p,
            q,
            levels,
        })
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn k(&self) -> R {
        self.k
    }

    /// `p = F_N(t)`, the in-session arrival probability.
    pub fn arrival_prob(&self) -> R {
        self.p
    }

    pub fn n_levels(&self) -> u64 {
        self.levels.len() as u64
    }

    pub fn levels(&self) -> &[u64] {
        &self.levels
    }

    /// A single level carries no information; worth flagging to callers.
    pub fn is_degenerate(&self) -> bool {
        self.levels.len() == 1
    }

    /// Message `j` releases `W_j` molecules in the first slot.
    pub fn encode(&self, j: u64) -> Result<crate::channel::ReleasePattern> {
        if j < 1 || j > self.n_levels() {
            return Err(Error::MessageOutOfRange {
                index: j,
                count: self.n_levels(),
            });
        }
        let mut x = vec![0u64; self.t as usize];
        x[0] = self.levels[(j - 1) as usize];
        crate::channel::ReleasePattern::new(x, self.m)
    }

    /// Decodes a total arrival count: `Some(j)` when
    /// `(2j−1)k√(mpq) < U ≤ (2j+1)k√(mpq)` (strict lower, inclusive upper),
    /// `None` (erasure) when `U` falls outside every window.
    pub fn decode(&self, total_arrivals: u64) -> Option<u64> {
        let s = self.k * (R::cast_u64(self.m) * self.p * self.q).sqrt();
        let u = R::cast_u64(total_arrivals);
        let n = self.n_levels();
        let upper = (R::cast_u64(2 * n + 1)) * s;
        if u <= s || u > upper {
            return None;
        }
        // Windows are contiguous, so locate by division and fix up any
        // floating-point edge.
        let guess = ((u / s - R::one()) * R::half())
            .ceil()
            .to_u64()
            .unwrap_or(1);
        for j in [guess.saturating_sub(1), guess, guess + 1] {
            if j < 1 || j > n {
                continue;
            }
            let lo = R::cast_u64(2 * j - 1) * s;
            let hi = R::cast_u64(2 * j + 1) * s;
            if u > lo && u <= hi {
                return Some(j);
            }
        }
        None
    }

    /// Analytic bound for these parameters (the `p ∈ (0,1)` branch).
    pub fn bound(&self) -> SchemeBBound<R> {
        scheme_b_formula(self.m, self.k, self.p, self.q)
    }

    /// Monte-Carlo decoding-error frequency over uniformly random messages.
    pub fn simulate_error_rate<G: Rng + ?Sized>(
        &self,
        dist: &FirstArrivalDist<R>,
        trials: u64,
        rng: &mut G,
    ) -> R {
        let mut errors = 0u64;
        for _ in 0..trials {
            let j = rng.random_range(1..=self.n_levels());
            let pattern = self.encode(j).expect("message in range");
            let received = crate::channel::transmit(&pattern, dist, rng);
            if self.decode(received.total_arrived()) != Some(j) {
                errors += 1;
            }
        }
        R::cast_u64(errors) / R::cast_u64(trials)
    }
}

fn scheme_b_formula<R: Real>(m: u64, k: R, p: R, q: R) -> SchemeBBound<R> {
    let err_ub = R::one() / (k * k);
    let x = (p / q).sqrt() / (R::two() * k);
    let k_const = x.log2() - err_ub * (R::one() + x) - h2(err_ub);
    let log_m = R::cast_u64(m).log2();
    let lb = R::half() * (R::one() - err_ub) * log_m + k_const;
    SchemeBBound {
        err_ub,
        lb,
        k_const,
        noiseless: false,
    }
}

/// Scheme B's analytic bound for `(t, m, k)` under `dist`.
///
/// `F_N(t) = 1` (no molecule is ever lost in session) is the flagged
/// noiseless special case: every level is read off exactly, so `m+1`
/// amplitudes are distinguishable and the bound is `log₂(m+1)` with zero
/// error. `F_N(t) = 0` is an error, as is a level collision.
pub fn scheme_b_bound<R: Real>(
    t: u64,
    m: u64,
    k: R,
    dist: &FirstArrivalDist<R>,
) -> Result<SchemeBBound<R>> {
    if t < 1 || m < 1 {
        return Err(Error::InvalidParameter(format!(
            "amplitude bound needs t ≥ 1 and m ≥ 1, got t={t} m={m}"
        )));
    }
    let p = dist.cdf(t as i64);
    if p >= R::one() {
        let lb = R::cast_u64(m + 1).log2();
        return Ok(SchemeBBound {
            err_ub: R::zero(),
            lb,
            k_const: lb,
            noiseless: true,
        });
    }
    Ok(SchemeBParams::new(t, m, k, dist)?.bound())
}
