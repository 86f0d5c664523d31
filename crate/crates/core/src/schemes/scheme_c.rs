//! Scheme C: Bernoulli release with binarized output.
//!
//! Each slot independently releases one molecule with probability `r`. The
//! receiver thresholds the arrival counts to `w_i = 1{y_i ≥ 1}` and the
//! per-slot marginal channel `x_i → w_i` is an exact 2×2 law built from the
//! interference products
//!
//! `γ₀(i) = Π_{j=1}^{i−1} (1 − r·p_N(j))`,  `γ₁(i) = (1 − p_N(0))·γ₀(i)`.
//!
//! The product of those per-slot laws is a factorized surrogate of the true
//! channel, so the summed per-slot mutual information lower-bounds
//! `I(X^t; W^t)` (auxiliary-channel bound) and `t·I₀` with
//! `I₀ = minᵢ I(W_i; X_i)` lower-bounds capacity. For a molecule budget
//! tighter than the horizon (`α < 1`) the scheme signals only on every
//! `⌈1/α⌉`-th slot and the bound scales to `α·t·I₀`.

use rand::Rng;

use crate::arrival::FirstArrivalDist;
use crate::channel::ArrivalRecord;
use crate::num::{h2, Real};
use crate::{Error, Result};

/// Interference products for slots `1…t`: `gamma0[i−1] = γ₀(i)` is the
/// probability of seeing no arrival in slot `i` given `x_i = 0`, and
/// `gamma1[i−1] = γ₁(i)` the same given `x_i = 1`. Both are nonincreasing
/// in `i` and constant once `i` clears the delay horizon.
pub fn scheme_c_gammas<R: Real>(t: u64, r: R, dist: &FirstArrivalDist<R>) -> (Vec<R>, Vec<R>) {
    let miss_first = R::one() - dist.instant_arrival_prob();
    let mut gamma0 = Vec::with_capacity(t as usize);
    let mut gamma1 = Vec::with_capacity(t as usize);
    let mut product = R::one();
    for i in 1..=t {
        gamma0.push(product);
        gamma1.push(miss_first * product);
        // Extend the product with delay j = i for the next slot.
        product *= R::one() - r * dist.pmf(i as usize);
    }
    (gamma0, gamma1)
}

/// Thresholded output `w_i = 1{y_i ≥ 1}`.
pub fn binarize(record: &ArrivalRecord) -> Vec<bool> {
    record.counts().iter().map(|&c| c > 0).collect()
}

/// Bernoulli-release scheme over `t` slots with budget ratio `α = m/t`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeCParams<R: Real> {
    t: u64,
    r: R,
    alpha: R,
    gamma0: Vec<R>,
    gamma1: Vec<R>,
    per_slot_mi: Vec<R>,
    i0: R,
}

/// Per-slot analysis plus the resulting lower bound.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeCBound<R> {
    /// Exact binary-channel mutual information of each slot, in bits.
    pub per_slot_mi: Vec<R>,
    /// `I₀ = minᵢ I(W_i; X_i)`; positive whenever `p_N(0) > 0`.
    pub i0: R,
    /// `t·I₀` for `α ≥ 1`, else `α·t·I₀`.
    pub lb: R,
}

/// A Monte-Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate<R> {
    pub mean_bits: R,
    pub std_err: R,
    pub trials: u64,
}

impl<R: Real> SchemeCParams<R> {
    pub fn new(t: u64, alpha: R, r: R, dist: &FirstArrivalDist<R>) -> Result<Self> {
        if t < 1 {
            return Err(Error::InvalidParameter("scheme needs t ≥ 1".to_string()));
        }
        if alpha.is_nan() || alpha <= R::zero() || !alpha.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "budget ratio must be positive, got {alpha}"
            )));
        }
        if r.is_nan() || r <= R::zero() || r >= R::one() {
            return Err(Error::InvalidParameter(format!(
                "release probability must lie strictly inside (0, 1), got {r}"
            )));
        }
        let (gamma0, gamma1) = scheme_c_gammas(t, r, dist);
        let per_slot_mi: Vec<R> = gamma0
            .iter()
            .zip(&gamma1)
            .map(|(&g0, &g1)| slot_mi(r, g0, g1))
            .collect();
        let i0 = per_slot_mi.iter().copied().fold(R::infinity(), R::min);
        Ok(Self {
            t,
            r,
            alpha,
            gamma0,
            gamma1,
            per_slot_mi,
            i0,
        })
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn r(&self) -> R {
        self.r
    }

    pub fn alpha(&self) -> R {
        self.alpha
    }

    pub fn gamma0(&self) -> &[R] {
        &self.gamma0
    }

    pub fn gamma1(&self) -> &[R] {
        &self.gamma1
    }

    pub fn per_slot_mi(&self) -> &[R] {
        &self.per_slot_mi
    }

    pub fn i0(&self) -> R {
        self.i0
    }

    /// `t·I₀`, scaled by `α` when the budget covers only part of the
    /// horizon.
    pub fn lower_bound(&self) -> R {
        let base = R::cast_u64(self.t) * self.i0;
        if self.alpha >= R::one() {
            base
        } else {
            self.alpha * base
        }
    }

    pub fn bound(&self) -> SchemeCBound<R> {
        SchemeCBound {
            per_slot_mi: self.per_slot_mi.clone(),
            i0: self.i0,
            lb: self.lower_bound(),
        }
    }

    /// For `α < 1` the scheme signals on every `⌈1/α⌉`-th slot only.
    pub fn slot_stride(&self) -> u64 {
        if self.alpha >= R::one() {
            1
        } else {
            (R::one() / self.alpha)
                .ceil()
                .to_u64()
                .expect("stride fits in u64")
        }
    }

    /// Active-slot mask (1-based slot `i` is active iff
    /// `(i−1) mod stride == 0`); never marks more slots than the budget
    /// `round(α·t)` allows.
    pub fn slot_mask(&self) -> Vec<bool> {
        let stride = self.slot_stride() as usize;
        (0..self.t as usize).map(|i| i % stride == 0).collect()
    }
}

/// Exact mutual information of the 2×2 law with `P(w=0|x) = γ_x` and input
/// `Bernoulli(r)`.
fn slot_mi<R: Real>(r: R, g0: R, g1: R) -> R {
    let w0 = r * g1 + (R::one() - r) * g0;
    (h2(w0) - r * h2(g1) - (R::one() - r) * h2(g0)).max(R::zero())
}

/// Monte-Carlo estimate of the factorized-law information rate
/// `E[log₂ Π g_i(w_i|x_i) / Π g_i(w_i)]` from simulated `(x^t, w^t)` pairs,
/// whose expectation is exactly `Σᵢ I(W_i; X_i)`. Needs at least 10⁴ trials.
pub fn scheme_c_mc_validate<R: Real, G: Rng + ?Sized>(
    t: u64,
    r: R,
    dist: &FirstArrivalDist<R>,
    trials: u64,
    rng: &mut G,
) -> Result<McEstimate<R>> {
    if trials < 10_000 {
        return Err(Error::InvalidParameter(format!(
            "Monte-Carlo validation needs at least 10^4 trials, got {trials}"
        )));
    }
    if r.is_nan() || r <= R::zero() || r >= R::one() {
        return Err(Error::InvalidParameter(format!(
            "release probability must lie strictly inside (0, 1), got {r}"
        )));
    }
    let (gamma0, gamma1) = scheme_c_gammas(t, r, dist);
    let tn = t as usize;
    // term[i][x][w] = log2(g_i(w|x) / g_i(w)). Zero-probability pairs map
    // to −∞ and are never sampled.
    let mut term = vec![[[R::zero(); 2]; 2]; tn];
    for i in 0..tn {
        let cond = [
            [gamma0[i], R::one() - gamma0[i]],
            [gamma1[i], R::one() - gamma1[i]],
        ];
        for (x, row) in cond.iter().enumerate() {
            for w in 0..2 {
                let marginal = r * cond[1][w] + (R::one() - r) * cond[0][w];
                term[i][x][w] = (row[w] / marginal).log2();
            }
        }
    }

    let r_f64 = r.to_f64().expect("release probability is finite");
    let mut released = vec![false; tn];
    let mut hit = vec![false; tn];
    let mut sum = R::zero();
    let mut sum_sq = R::zero();
    for _ in 0..trials {
        released.iter_mut().for_each(|v| *v = false);
        hit.iter_mut().for_each(|v| *v = false);
        for i in 0..tn {
            if rng.random_bool(r_f64) {
                released[i] = true;
                if let Some(n) = dist.sample_delay(rng) {
                    if i + n < tn {
                        hit[i + n] = true;
                    }
                }
            }
        }
        let mut total = R::zero();
        for i in 0..tn {
            total += term[i][released[i] as usize][hit[i] as usize];
        }
        sum += total;
        sum_sq += total * total;
    }
    let n = R::cast_u64(trials);
    let mean = sum / n;
    let variance = ((sum_sq / n) - mean * mean).max(R::zero());
    Ok(McEstimate {
        mean_bits: mean,
        std_err: (variance / n).sqrt(),
        trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::worker_rng;
    use proptest::prelude::*;

    fn instant() -> FirstArrivalDist<f64> {
        FirstArrivalDist::from_table(&[1.0], 0.0).unwrap()
    }

    #[test]
    fn gamma_examples() {
        let dist: FirstArrivalDist<f64> = FirstArrivalDist::geometric(0.5, 8).unwrap();
        let (g0, g1) = scheme_c_gammas(3, 0.5, &dist);
        // Empty product at the first slot.
        assert_eq!(g0[0], 1.0);
        assert!((g1[0] - 0.5).abs() < 1e-15);
        // i = 3: (1 − 0.5·p(1))·(1 − 0.5·p(2)).
        assert!((g0[2] - 0.8203125).abs() < 1e-15);
        assert!((g1[2] - 0.41015625).abs() < 1e-15);

        let (g0, g1) = scheme_c_gammas(4, 0.3, &instant());
        assert!(g0.iter().all(|&g| g == 1.0));
        assert!(g1.iter().all(|&g| g == 0.0));
    }

    #[test]
    fn gammas_converge_past_the_horizon() {
        let dist: FirstArrivalDist<f64> = FirstArrivalDist::geometric(0.5, 8).unwrap();
        let (g0, _) = scheme_c_gammas(40, 0.5, &dist);
        // Factors are 1 for delays beyond n_max, so the product freezes.
        assert_eq!(g0[9], g0[39]);
        assert!(g0[8] > g0[9] || (g0[8] - g0[9]).abs() < 1e-18);
    }

    #[test]
    fn binarize_thresholds_counts() {
        let rec = ArrivalRecord::new(vec![0, 3, 1], 0);
        assert_eq!(binarize(&rec), vec![false, true, true]);
        let rec = ArrivalRecord::new(vec![0, 0], 2);
        assert_eq!(binarize(&rec), vec![false, false]);
        let rec = ArrivalRecord::new(vec![1, 0, 2, 0], 0);
        assert_eq!(binarize(&rec), vec![true, false, true, false]);
    }

    #[test]
    fn instant_channel_gives_one_bit_per_slot() {
        let params = SchemeCParams::new(6, 1.0, 0.5, &instant()).unwrap();
        for &mi in params.per_slot_mi() {
            assert!((mi - 1.0).abs() < 1e-12);
        }
        assert!((params.i0() - 1.0).abs() < 1e-12);
        assert!((params.lower_bound() - 6.0).abs() < 1e-12);
    }

    #[test]
    fn first_slot_mi_matches_closed_form() {
        let dist = FirstArrivalDist::geometric(0.5, 8).unwrap();
        let params = SchemeCParams::new(3, 1.0, 0.5, &dist).unwrap();
        // Slot 1 is a Z-like channel with γ₀ = 1, γ₁ = 0.5:
        // I = H(0.75) − 0.5·H(0.5).
        let expected = crate::num::h2(0.75f64) - 0.5;
        assert!((params.per_slot_mi()[0] - expected).abs() < 1e-12);
        assert!((params.per_slot_mi()[0] - 0.311278).abs() < 1e-6);
    }

    #[test]
    fn alpha_scales_the_bound() {
        let dist: FirstArrivalDist<f64> = FirstArrivalDist::geometric(0.5, 8).unwrap();
        let full = SchemeCParams::new(10, 1.0, 0.5, &dist).unwrap();
        let half = SchemeCParams::new(10, 0.5, 0.5, &dist).unwrap();
        assert!((half.lower_bound() - 0.5 * full.lower_bound()).abs() < 1e-12);
        assert_eq!(full.slot_stride(), 1);
        assert_eq!(half.slot_stride(), 2);
        assert_eq!(half.slot_mask().iter().filter(|&&a| a).count(), 5);

        let sparse = SchemeCParams::new(4, 0.75, 0.5, &dist).unwrap();
        assert_eq!(sparse.slot_stride(), 2);
        assert_eq!(sparse.slot_mask(), vec![true, false, true, false]);
    }

    #[test]
    fn i0_positive_when_instant_arrival_possible() {
        for rho in [0.2, 0.5, 0.8] {
            let dist = FirstArrivalDist::geometric(rho, 16).unwrap();
            let params = SchemeCParams::new(30, 1.0, 0.5, &dist).unwrap();
            assert!(params.i0() > 0.0, "rho={rho}");
        }
        // No same-slot arrivals: the thresholded channel can die.
        let delayed = FirstArrivalDist::from_table(&[0.0, 1.0], 0.0).unwrap();
        let params = SchemeCParams::new(3, 1.0, 0.5, &delayed).unwrap();
        assert!(params.i0() >= 0.0);
        assert_eq!(params.per_slot_mi()[0], 0.0);
    }

    #[test]
    fn parameter_validation() {
        let dist = FirstArrivalDist::geometric(0.5, 4).unwrap();
        assert!(SchemeCParams::new(0, 1.0, 0.5, &dist).is_err());
        assert!(SchemeCParams::new(4, 0.0, 0.5, &dist).is_err());
        assert!(SchemeCParams::new(4, 1.0, 0.0, &dist).is_err());
        assert!(SchemeCParams::new(4, 1.0, 1.0, &dist).is_err());
    }

    #[test]
    fn mc_noiseless_is_exact() {
        let mut rng = worker_rng(29, 0);
        let est = scheme_c_mc_validate(10, 0.5, &instant(), 10_000, &mut rng).unwrap();
        assert!((est.mean_bits - 10.0).abs() < 1e-9);
        assert!(est.std_err < 1e-9);
    }

    #[test]
    fn mc_matches_analytic_sum() {
        let dist = FirstArrivalDist::geometric(0.5, 8).unwrap();
        let params = SchemeCParams::new(10, 1.0, 0.5, &dist).unwrap();
        let analytic: f64 = params.per_slot_mi().iter().sum();
        let mut rng = worker_rng(31, 0);
        let est = scheme_c_mc_validate(10, 0.5, &dist, 100_000, &mut rng).unwrap();
        assert!(
            (est.mean_bits - analytic).abs() <= 3.0 * est.std_err,
            "mc={} analytic={analytic} se={}",
            est.mean_bits,
            est.std_err
        );
    }

    #[test]
    fn mc_vanishes_as_release_probability_shrinks() {
        let dist: FirstArrivalDist<f64> = FirstArrivalDist::geometric(0.5, 8).unwrap();
        let mut rng = worker_rng(37, 0);
        let est = scheme_c_mc_validate(10, 1e-4, &dist, 10_000, &mut rng).unwrap();
        assert!(est.mean_bits.abs() < 0.01, "mean={}", est.mean_bits);
    }

    #[test]
    fn mc_enforces_trial_floor() {
        let dist = FirstArrivalDist::geometric(0.5, 4).unwrap();
        let mut rng = worker_rng(41, 0);
        assert!(scheme_c_mc_validate(4, 0.5, &dist, 9_999, &mut rng).is_err());
    }

    proptest! {
        #[test]
        fn gammas_are_nonincreasing_probabilities(
            rho in 0.1f64..0.9,
            r in 0.05f64..0.95,
            t in 1u64..40,
        ) {
            let dist = FirstArrivalDist::geometric(rho, 12).unwrap();
            let (g0, g1) = scheme_c_gammas(t, r, &dist);
            for i in 0..t as usize {
                prop_assert!(g1[i] >= 0.0 && g1[i] <= g0[i] && g0[i] <= 1.0);
                if i > 0 {
                    prop_assert!(g0[i] <= g0[i - 1] + 1e-15);
                    prop_assert!(g1[i] <= g1[i - 1] + 1e-15);
                }
            }
        }
    }
}
