//! The discrete-time molecular channel.
//!
//! A release pattern `x` (molecules per slot, total within a budget `m`) is
//! pushed through the channel: every molecule independently draws a delay
//! from the first-arrival distribution and lands `delay` slots after its
//! release, or is lost past the horizon. The receiver sees only the per-slot
//! arrival counts `y`; lost molecules are tracked in the exact law but are
//! not observable to decoders.
//!
//! Besides stochastic forward simulation, small instances (guarded at
//! [`MAX_EXACT_SLOTS`] slots and [`MAX_EXACT_MOLECULES`] molecules) support
//! the exact conditional law, exact mutual information, and capacity via
//! alternating maximization over the input distribution.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arrival::FirstArrivalDist;
use crate::num::Real;
use crate::{Error, Result};

/// Largest slot count for exact enumeration.
pub const MAX_EXACT_SLOTS: u64 = 6;
/// Largest molecule total for exact enumeration.
pub const MAX_EXACT_MOLECULES: u64 = 6;

/// Iteration cap for the capacity maximization.
pub const CAPACITY_MAX_ITERATIONS: usize = 100_000;
/// Default convergence tolerance for the capacity maximization, in bits.
pub const CAPACITY_DEFAULT_TOL: f64 = 1e-9;

/// Molecule counts released per slot, with a hard molecule budget.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ReleasePattern {
    x: Vec<u64>,
    m_budget: u64,
}

impl ReleasePattern {
    pub fn new(x: Vec<u64>, m_budget: u64) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::InvalidParameter(
                "release pattern needs at least one slot".to_string(),
            ));
        }
        if m_budget == 0 {
            return Err(Error::InvalidParameter(
                "molecule budget must be positive".to_string(),
            ));
        }
        let total: u64 = x.iter().sum();
        if total > m_budget {
            return Err(Error::InvalidParameter(format!(
                "pattern releases {total} molecules, over the budget of {m_budget}"
            )));
        }
        Ok(Self { x, m_budget })
    }

    /// Session length `t`.
    pub fn slots(&self) -> u64 {
        self.x.len() as u64
    }

    pub fn counts(&self) -> &[u64] {
        &self.x
    }

    pub fn budget(&self) -> u64 {
        self.m_budget
    }

    pub fn total_released(&self) -> u64 {
        self.x.iter().sum()
    }

    /// Every pattern of length `t` with total at most `m_budget`, in
    /// lexicographic order. The count equals `C(t + m_budget, t)`, so keep
    /// the arguments small.
    pub fn enumerate_all(t: u64, m_budget: u64) -> Result<Vec<ReleasePattern>> {
        if t == 0 || m_budget == 0 {
            return Err(Error::InvalidParameter(
                "enumeration needs t ≥ 1 and m_budget ≥ 1".to_string(),
            ));
        }
        let mut out = Vec::new();
        let mut current = vec![0u64; t as usize];
        fn rec(
            slot: usize,
            budget_left: u64,
            current: &mut Vec<u64>,
            budget: u64,
            out: &mut Vec<ReleasePattern>,
        ) {
            if slot == current.len() {
                out.push(ReleasePattern {
                    x: current.clone(),
                    m_budget: budget,
                });
                return;
            }
            for used in 0..=budget_left {
                current[slot] = used;
                rec(slot + 1, budget_left - used, current, budget, out);
            }
            current[slot] = 0;
        }
        rec(0, m_budget, &mut current, m_budget, &mut out);
        Ok(out)
    }
}

/// Per-slot arrival counts plus the molecules that never arrived in session.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArrivalRecord {
    y: Vec<u64>,
    lost: u64,
}

impl ArrivalRecord {
    pub fn new(y: Vec<u64>, lost: u64) -> Self {
        Self { y, lost }
    }

    pub fn slots(&self) -> u64 {
        self.y.len() as u64
    }

    pub fn counts(&self) -> &[u64] {
        &self.y
    }

    /// Molecules that did not arrive by the end of the session.
    pub fn lost(&self) -> u64 {
        self.lost
    }

    pub fn total_arrived(&self) -> u64 {
        self.y.iter().sum()
    }
}

/// A distribution over release patterns (all sharing `t` and the budget).
#[derive(Debug, Clone, PartialEq)]
pub struct InputEnsemble<R: Real> {
    patterns: Vec<ReleasePattern>,
    probs: Vec<R>,
}

impl<R: Real> InputEnsemble<R> {
    pub fn new(patterns: Vec<ReleasePattern>, probs: Vec<R>) -> Result<Self> {
        if patterns.is_empty() {
            return Err(Error::InvalidParameter(
                "ensemble needs at least one pattern".to_string(),
            ));
        }
        if patterns.len() != probs.len() {
            return Err(Error::InvalidParameter(format!(
                "{} patterns but {} probabilities",
                patterns.len(),
                probs.len()
            )));
        }
        let t = patterns[0].slots();
        let budget = patterns[0].budget();
        if patterns
            .iter()
            .any(|p| p.slots() != t || p.budget() != budget)
        {
            return Err(Error::InvalidParameter(
                "ensemble patterns must share slot count and budget".to_string(),
            ));
        }
        if probs
            .iter()
            .any(|&p| p.is_nan() || p < R::zero() || !p.is_finite())
        {
            return Err(Error::InvalidParameter(
                "ensemble probabilities must be nonnegative".to_string(),
            ));
        }
        let total: R = probs.iter().copied().sum();
        if (total - R::one()).abs() > R::NORM_TOL {
            return Err(Error::InvalidParameter(format!(
                "ensemble probabilities sum to {total}, not 1"
            )));
        }
        Ok(Self { patterns, probs })
    }

    pub fn uniform(patterns: Vec<ReleasePattern>) -> Result<Self> {
        let n = patterns.len();
        if n == 0 {
            return Err(Error::InvalidParameter(
                "ensemble needs at least one pattern".to_string(),
            ));
        }
        let p = R::one() / R::cast_usize(n);
        let mut probs = vec![p; n];
        // Absorb rounding into the last entry so the sum is exact.
        let partial: R = probs[..n - 1].iter().copied().sum();
        probs[n - 1] = R::one() - partial;
        Self::new(patterns, probs)
    }

    pub fn patterns(&self) -> &[ReleasePattern] {
        &self.patterns
    }

    pub fn probs(&self) -> &[R] {
        &self.probs
    }

    /// Input entropy `H(X^t)` in bits.
    pub fn entropy(&self) -> R {
        let mut h = R::zero();
        for &p in &self.probs {
            if p > R::zero() {
                h -= p * p.log2();
            }
        }
        h
    }
}

/// Random source for worker `worker_index` derived from a master seed.
///
/// The splitting rule is master seed + worker index: the master seed keys the
/// cipher and the worker index selects its stream, so workers draw from
/// independent streams and any partition of trials over a fixed worker count
/// reproduces exactly.
pub fn worker_rng(master_seed: u64, worker_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(worker_index);
    rng
}

/// Pushes one pattern through the channel. Each molecule draws an
/// independent delay; arrivals past slot `t` and lost draws are counted in
/// `lost`. Deterministic given the RNG state.
pub fn transmit<R: Real, G: Rng + ?Sized>(
    pattern: &ReleasePattern,
    dist: &FirstArrivalDist<R>,
    rng: &mut G,
) -> ArrivalRecord {
    let t = pattern.counts().len();
    let mut y = vec![0u64; t];
    let mut lost = 0u64;
    for (i, &xi) in pattern.counts().iter().enumerate() {
        for _ in 0..xi {
            match dist.sample_delay(rng) {
                Some(n) if i + n < t => y[i + n] += 1,
                _ => lost += 1,
            }
        }
    }
    ArrivalRecord::new(y, lost)
}

/// Exact conditional distribution over arrival records for one pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalLaw<R: Real> {
    outcomes: BTreeMap<ArrivalRecord, R>,
}

impl<R: Real> ConditionalLaw<R> {
    /// Every reachable `(y, lost)` outcome with its exact probability.
    pub fn outcomes(&self) -> &BTreeMap<ArrivalRecord, R> {
        &self.outcomes
    }

    pub fn prob(&self, record: &ArrivalRecord) -> R {
        self.outcomes.get(record).copied().unwrap_or_else(R::zero)
    }

    /// Law of the observable output alone: `lost` marginalized away. For a
    /// fixed pattern the lost count is determined by `y`, so this is a
    /// relabeling, but distinct patterns can share a `y`.
    pub fn observable(&self) -> BTreeMap<Vec<u64>, R> {
        let mut out = BTreeMap::new();
        for (rec, &p) in &self.outcomes {
            *out.entry(rec.counts().to_vec()).or_insert_with(R::zero) += p;
        }
        out
    }

    /// Total variation distance to an empirical histogram of records.
    pub fn total_variation(&self, counts: &BTreeMap<ArrivalRecord, u64>, trials: u64) -> R {
        let trials = R::cast_u64(trials);
        let mut tv = R::zero();
        for (rec, &p) in &self.outcomes {
            let emp = R::cast_u64(counts.get(rec).copied().unwrap_or(0)) / trials;
            tv += (p - emp).abs();
        }
        // Mass the law assigns nowhere (can only come from float dust).
        for (rec, &c) in counts {
            if !self.outcomes.contains_key(rec) {
                tv += R::cast_u64(c) / trials;
            }
        }
        tv * R::half()
    }
}

fn check_guard_rails(pattern: &ReleasePattern) -> Result<()> {
    let slots = pattern.slots();
    let molecules = pattern.total_released();
    if slots > MAX_EXACT_SLOTS || molecules > MAX_EXACT_MOLECULES {
        return Err(Error::TooLarge {
            slots,
            molecules,
            max_slots: MAX_EXACT_SLOTS,
            max_molecules: MAX_EXACT_MOLECULES,
        });
    }
    Ok(())
}

fn choose(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1u64;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// All ways to allocate `n` identical molecules over destinations with the
/// given probabilities, with multinomial weights. Zero-probability
/// destinations are pruned, so every returned outcome is reachable.
fn multinomial_allocations<R: Real>(n: u64, probs: &[R]) -> Vec<(Vec<u64>, R)> {
    let mut out = Vec::new();
    let mut counts = vec![0u64; probs.len()];
    fn rec<R: Real>(
        dest: usize,
        remaining: u64,
        weight: R,
        counts: &mut Vec<u64>,
        probs: &[R],
        out: &mut Vec<(Vec<u64>, R)>,
    ) {
        if dest + 1 == probs.len() {
            if remaining > 0 && probs[dest] == R::zero() {
                return;
            }
            counts[dest] = remaining;
            let w = weight * probs[dest].powi(remaining as i32);
            out.push((counts.clone(), w));
            counts[dest] = 0;
            return;
        }
        let max_here = if probs[dest] == R::zero() {
            0
        } else {
            remaining
        };
        for c in 0..=max_here {
            counts[dest] = c;
            let w = weight * R::cast_u64(choose(remaining, c)) * probs[dest].powi(c as i32);
            rec(dest + 1, remaining - c, w, counts, probs, out);
        }
        counts[dest] = 0;
    }
    rec(0, n, R::one(), &mut counts, probs, &mut out);
    out
}

/// Exact law of the channel for one pattern, by convolving the multinomial
/// allocation of each slot's molecules over their reachable arrival slots
/// (or loss past the horizon). Guarded by the enumeration limits.
pub fn conditional_law<R: Real>(
    pattern: &ReleasePattern,
    dist: &FirstArrivalDist<R>,
) -> Result<ConditionalLaw<R>> {
    check_guard_rails(pattern)?;
    let t = pattern.counts().len();
    let mut acc: BTreeMap<ArrivalRecord, R> = BTreeMap::new();
    acc.insert(ArrivalRecord::new(vec![0; t], 0), R::one());

    for (i, &xi) in pattern.counts().iter().enumerate() {
        if xi == 0 {
            continue;
        }
        // Destinations for a molecule released in slot i: delays 0..=horizon
        // stay observable, everything else is lost.
        let horizon = t - 1 - i;
        let mut dest_probs: Vec<R> = (0..=horizon).map(|d| dist.pmf(d)).collect();
        dest_probs.push((R::one() - dist.cdf(horizon as i64)).max(R::zero()));
        let allocations = multinomial_allocations(xi, &dest_probs);

        let mut next: BTreeMap<ArrivalRecord, R> = BTreeMap::new();
        for (rec, &p) in &acc {
            for (alloc, ap) in &allocations {
                let mut y = rec.counts().to_vec();
                let mut lost = rec.lost();
                for (d, &c) in alloc.iter().enumerate() {
                    if d <= horizon {
                        y[i + d] += c;
                    } else {
                        lost += c;
                    }
                }
                *next
                    .entry(ArrivalRecord::new(y, lost))
                    .or_insert_with(R::zero) += p * *ap;
            }
        }
        acc = next;
    }

    let total: R = acc.values().copied().sum();
    debug_assert!(
        (total - R::one()).abs() < R::NORM_TOL * R::cast_f64(100.0),
        "law mass {total}"
    );
    Ok(ConditionalLaw { outcomes: acc })
}

/// Exact mutual information `I(X^t; Y^t)` in bits for a fixed input
/// ensemble. The receiver-side variable is the observable `y` alone.
pub fn exact_mi<R: Real>(ensemble: &InputEnsemble<R>, dist: &FirstArrivalDist<R>) -> Result<R> {
    let laws: Vec<BTreeMap<Vec<u64>, R>> = ensemble
        .patterns()
        .iter()
        .map(|p| conditional_law(p, dist).map(|l| l.observable()))
        .collect::<Result<_>>()?;

    let mut output_marginal: BTreeMap<Vec<u64>, R> = BTreeMap::new();
    for (law, &px) in laws.iter().zip(ensemble.probs()) {
        for (y, &w) in law {
            *output_marginal.entry(y.clone()).or_insert_with(R::zero) += px * w;
        }
    }

    let mut mi = R::zero();
    for (law, &px) in laws.iter().zip(ensemble.probs()) {
        if px <= R::zero() {
            continue;
        }
        for (y, &w) in law {
            if w > R::zero() {
                mi += px * w * (w / output_marginal[y]).log2();
            }
        }
    }
    Ok(mi.max(R::zero()))
}

/// Result of the capacity maximization.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityResult<R> {
    /// Capacity estimate in bits (a lower estimate, within `tol` of the
    /// maximum once `converged`).
    pub bits: R,
    /// Maximizing input distribution over the supplied patterns.
    pub probs: Vec<R>,
    pub iterations: usize,
    /// False when the iteration cap was hit first; `bits` then carries the
    /// best value reached so far.
    pub converged: bool,
}

/// Capacity of the small instance spanned by `patterns`: maximizes exact
/// mutual information over input distributions by alternating maximization.
/// The lower/upper capacity estimates bracket the maximum, so the returned
/// value is within `tol` of it at convergence, and it never falls below the
/// uniform-ensemble mutual information.
pub fn capacity_small<R: Real>(
    patterns: &[ReleasePattern],
    dist: &FirstArrivalDist<R>,
    tol: R,
) -> Result<CapacityResult<R>> {
    if tol.is_nan() || tol <= R::zero() {
        return Err(Error::InvalidParameter(format!(
            "capacity tolerance must be positive, got {tol}"
        )));
    }
    // Validates shape compatibility (shared t, budget) as a side effect.
    let _ = InputEnsemble::<R>::uniform(patterns.to_vec())?;

    let mut y_index: BTreeMap<Vec<u64>, usize> = BTreeMap::new();
    let mut rows: Vec<Vec<(usize, R)>> = Vec::with_capacity(patterns.len());
    for pattern in patterns {
        let law = conditional_law(pattern, dist)?.observable();
        let mut row = Vec::with_capacity(law.len());
        for (y, w) in law {
            let next = y_index.len();
            let idx = *y_index.entry(y).or_insert(next);
            row.push((idx, w));
        }
        rows.push(row);
    }
    let n_outputs = y_index.len();
    let n_inputs = patterns.len();

    let mut probs = vec![R::one() / R::cast_usize(n_inputs); n_inputs];
    let mut gain = vec![R::zero(); n_inputs];
    let mut best = R::zero();

    for iteration in 1..=CAPACITY_MAX_ITERATIONS {
        let mut marginal = vec![R::zero(); n_outputs];
        for (row, &px) in rows.iter().zip(&probs) {
            for &(yi, w) in row {
                marginal[yi] += px * w;
            }
        }
        let mut lower = R::zero();
        let mut upper = R::neg_infinity();
        for (x, row) in rows.iter().enumerate() {
            let mut d = R::zero();
            for &(yi, w) in row {
                if w > R::zero() {
                    d += w * (w / marginal[yi]).log2();
                }
            }
            gain[x] = d;
            lower += probs[x] * d;
            upper = upper.max(d);
        }
        best = best.max(lower);
        if upper - lower < tol {
            return Ok(CapacityResult {
                bits: best.max(R::zero()),
                probs,
                iterations: iteration,
                converged: true,
            });
        }
        // Multiplicative reweighting toward the information-gain maximizers.
        let mut total = R::zero();
        for x in 0..n_inputs {
            probs[x] = (probs[x] * (gain[x] - upper).exp2()).max(R::min_positive_value());
            total += probs[x];
        }
        for p in &mut probs {
            *p /= total;
        }
    }

    Ok(CapacityResult {
        bits: best.max(R::zero()),
        probs,
        iterations: CAPACITY_MAX_ITERATIONS,
        converged: false,
    })
}
