//! Closed-form capacity upper bounds and the combinatorics behind them.
//!
//! Each bound comes in two flavors: the `asymptotic` form (`m·log₂t`,
//! `t·log₂m`) whose per-coordinate entropy step ignores the zero/abstain
//! outcome, and a `safe` form (`m·log₂(t+1)`, `t·log₂(m+1)`) that counts it. The safe forms
//! are valid upper bounds at every finite size (the noiseless `m=1, t=2`
//! instance has capacity log₂3, above `log₂2`) while the asymptotic order
//! is the same. Tests assert against the safe forms; reports carry
//! both.

use std::collections::BTreeMap;

use num_bigint::BigUint;

use crate::num::{h2, Real};
use crate::{Error, Result};

/// Binary entropy `H(λ)` in bits, with `0·log(1/0) := 0`.
pub fn binary_entropy<R: Real>(lambda: R) -> Result<R> {
    if !(lambda >= R::zero() && lambda <= R::one()) {
        return Err(Error::InvalidParameter(format!(
            "binary entropy argument must lie in [0, 1], got {lambda}"
        )));
    }
    Ok(h2(lambda))
}

/// `n·H(k/n)`, the classic entropy cap on `log₂ C(n, k)`.
pub fn binomial_entropy_bound<R: Real>(n: u64, k: u64) -> Result<R> {
    if n < 1 || k > n {
        return Err(Error::InvalidParameter(format!(
            "binomial entropy bound needs 1 ≤ n and k ≤ n, got n={n} k={k}"
        )));
    }
    Ok(R::cast_u64(n) * h2(R::cast_u64(k) / R::cast_u64(n)))
}

/// Exact binomial coefficient `C(n, k)`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let k = k.min(n - k);
    let mut acc = BigUint::from(1u32);
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Number of release patterns of length `t` using at most `m_cap` molecules:
/// `m_cap` indistinct molecules over `t+1` bins (`t` slots plus "unsent"),
/// i.e. `C(t + m_cap, t)`.
pub fn arrangements(t: u64, m_cap: u64) -> BigUint {
    assert!(t >= 1, "arrangements needs at least one slot");
    binomial(t + m_cap, t)
}

/// A bound in its loose asymptotic form and its finite-size-safe form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualBound<R> {
    pub asymptotic: R,
    pub safe: R,
}

/// Time-scaling upper bound for budget `m` over `t` slots:
/// asymptotic `m·log₂t`, safe `m·log₂(t+1)` (each molecule picks one of `t`
/// slots or abstains).
pub fn ub_time<R: Real>(m: u64, t: u64) -> DualBound<R> {
    assert!(m >= 1 && t >= 1, "ub_time needs m ≥ 1 and t ≥ 1");
    let m = R::cast_u64(m);
    DualBound {
        asymptotic: m * R::cast_u64(t).log2(),
        safe: m * R::cast_u64(t + 1).log2(),
    }
}

/// Molecule-scaling upper bound: asymptotic `t·log₂m`, safe `t·log₂(m+1)`
/// (each per-slot arrival count takes one of `m+1` values).
pub fn ub_molecules<R: Real>(t: u64, m: u64) -> DualBound<R> {
    assert!(t >= 1 && m >= 1, "ub_molecules needs t ≥ 1 and m ≥ 1");
    let t = R::cast_u64(t);
    DualBound {
        asymptotic: t * R::cast_u64(m).log2(),
        safe: t * R::cast_u64(m + 1).log2(),
    }
}

/// Joint-scaling upper bound for budget `m ≤ αt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointBound<R> {
    /// `(t + αt)·H(t / (t + αt))`, the entropy cap on `log₂ C(t+αt, t)`.
    pub entropy_form: R,
    /// `(1 + α)·t`, the linear relaxation (`H ≤ 1`).
    pub linear_form: R,
}

/// Both joint-scaling forms, evaluated with the real-valued `α`. Counting
/// comparisons against [`arrangements`] use [`rounded_budget`]; the forms
/// dominate that count whenever `αt` is integral.
pub fn ub_joint<R: Real>(t: u64, alpha: R) -> JointBound<R> {
    assert!(t >= 1, "ub_joint needs t ≥ 1");
    assert!(alpha > R::zero(), "ub_joint needs α > 0");
    let t = R::cast_u64(t);
    let total = t + alpha * t;
    JointBound {
        entropy_form: total * h2(t / total),
        linear_form: total,
    }
}

/// `round(α·t)`, the molecule budget used in counting contexts.
pub fn rounded_budget<R: Real>(t: u64, alpha: R) -> u64 {
    (alpha * R::cast_u64(t))
        .round()
        .to_u64()
        .expect("rounded budget fits in u64")
}

/// Named bound values a report row can carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundName {
    UbTime,
    UbTimeSafe,
    UbMolecules,
    UbMoleculesSafe,
    UbJointEntropy,
    UbJointLinear,
    LbSchemeA,
    LbSchemeB,
    LbSchemeC,
}

impl BoundName {
    pub const ALL: [BoundName; 9] = [
        BoundName::UbTime,
        BoundName::UbTimeSafe,
        BoundName::UbMolecules,
        BoundName::UbMoleculesSafe,
        BoundName::UbJointEntropy,
        BoundName::UbJointLinear,
        BoundName::LbSchemeA,
        BoundName::LbSchemeB,
        BoundName::LbSchemeC,
    ];

    /// Stable label used in report output and CSV headers.
    pub fn label(self) -> &'static str {
        match self {
            BoundName::UbTime => "UB_time",
            BoundName::UbTimeSafe => "UB_time_safe",
            BoundName::UbMolecules => "UB_molecules",
            BoundName::UbMoleculesSafe => "UB_molecules_safe",
            BoundName::UbJointEntropy => "UB_joint_entropy",
            BoundName::UbJointLinear => "UB_joint_linear",
            BoundName::LbSchemeA => "LB_schemeA",
            BoundName::LbSchemeB => "LB_schemeB",
            BoundName::LbSchemeC => "LB_schemeC",
        }
    }

    pub fn is_upper(self) -> bool {
        matches!(
            self,
            BoundName::UbTime
                | BoundName::UbTimeSafe
                | BoundName::UbMolecules
                | BoundName::UbMoleculesSafe
                | BoundName::UbJointEntropy
                | BoundName::UbJointLinear
        )
    }
}

impl std::fmt::Display for BoundName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// A named bound value in bits together with the inputs that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport<R> {
    pub name: BoundName,
    pub value: R,
    pub params: BTreeMap<String, String>,
}

impl<R: Real> BoundReport<R> {
    pub fn new(name: BoundName, value: R) -> Self {
        debug_assert!(
            !name.is_upper() || value >= R::zero(),
            "upper bounds are nonnegative"
        );
        Self {
            name,
            value,
            params: BTreeMap::new(),
        }
    }

    pub fn with_param(mut self, key: &str, value: impl std::fmt::Display) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }
}
