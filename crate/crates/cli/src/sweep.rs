//! Sweep execution: one row of bound values per grid point.

use rayon::prelude::*;

use molcap_core::bounds::{ub_joint, ub_molecules, ub_time};
use molcap_core::channel::{
    capacity_small, exact_mi, worker_rng, InputEnsemble, ReleasePattern, MAX_EXACT_MOLECULES,
    MAX_EXACT_SLOTS,
};
use molcap_core::schemes::{scheme_b_bound, scheme_c_mc_validate};
use molcap_core::{FirstArrivalDist, SchemeAParams, SchemeBParams, SchemeCParams};

use crate::config::{SweepMode, SweepSpec};
use crate::{Error, Result};

/// One grid point's results. Bound columns are `None` when the scheme or
/// computation does not apply at that point (e.g. no `k` configured, or
/// `t < 4` for the interval scheme).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepRow {
    pub t: u64,
    pub m: u64,
    pub seed: u64,
    pub ub_time: f64,
    pub ub_time_safe: f64,
    pub ub_molecules: f64,
    pub ub_molecules_safe: f64,
    pub ub_joint_entropy: f64,
    pub ub_joint_linear: f64,
    pub lb_scheme_a: Option<f64>,
    pub lb_scheme_b: Option<f64>,
    pub lb_scheme_c: Option<f64>,
    pub exact_mi_uniform: Option<f64>,
    pub capacity: Option<f64>,
    pub mc_scheme_a_err: Option<f64>,
    pub mc_scheme_b_err: Option<f64>,
    pub mc_scheme_c_mi: Option<f64>,
    pub mc_scheme_c_se: Option<f64>,
}

/// Float column labels, in CSV order after `t,m,seed`.
pub const VALUE_COLUMNS: [&str; 15] = [
    "UB_time",
    "UB_time_safe",
    "UB_molecules",
    "UB_molecules_safe",
    "UB_joint_entropy",
    "UB_joint_linear",
    "LB_schemeA",
    "LB_schemeB",
    "LB_schemeC",
    "exact_MI_uniform",
    "capacity",
    "MC_schemeA_err",
    "MC_schemeB_err",
    "MC_schemeC_mi",
    "MC_schemeC_se",
];

impl SweepRow {
    /// Value of a named column; `None` for an unknown name.
    pub fn get(&self, column: &str) -> Option<Option<f64>> {
        let v = match column {
            "UB_time" => Some(self.ub_time),
            "UB_time_safe" => Some(self.ub_time_safe),
            "UB_molecules" => Some(self.ub_molecules),
            "UB_molecules_safe" => Some(self.ub_molecules_safe),
            "UB_joint_entropy" => Some(self.ub_joint_entropy),
            "UB_joint_linear" => Some(self.ub_joint_linear),
            "LB_schemeA" => self.lb_scheme_a,
            "LB_schemeB" => self.lb_scheme_b,
            "LB_schemeC" => self.lb_scheme_c,
            "exact_MI_uniform" => self.exact_mi_uniform,
            "capacity" => self.capacity,
            "MC_schemeA_err" => self.mc_scheme_a_err,
            "MC_schemeB_err" => self.mc_scheme_b_err,
            "MC_schemeC_mi" => self.mc_scheme_c_mi,
            "MC_schemeC_se" => self.mc_scheme_c_se,
            _ => return None,
        };
        Some(v)
    }

    pub(crate) fn set(&mut self, column: &str, value: Option<f64>) -> Result<()> {
        fn required(slot: &mut f64, column: &str, value: Option<f64>) -> Result<()> {
            match value {
                Some(v) => {
                    *slot = v;
                    Ok(())
                }
                None => Err(Error::Csv(format!("column {column:?} cannot be empty"))),
            }
        }
        match column {
            "UB_time" => required(&mut self.ub_time, column, value),
            "UB_time_safe" => required(&mut self.ub_time_safe, column, value),
            "UB_molecules" => required(&mut self.ub_molecules, column, value),
            "UB_molecules_safe" => required(&mut self.ub_molecules_safe, column, value),
            "UB_joint_entropy" => required(&mut self.ub_joint_entropy, column, value),
            "UB_joint_linear" => required(&mut self.ub_joint_linear, column, value),
            "LB_schemeA" => {
                self.lb_scheme_a = value;
                Ok(())
            }
            "LB_schemeB" => {
                self.lb_scheme_b = value;
                Ok(())
            }
            "LB_schemeC" => {
                self.lb_scheme_c = value;
                Ok(())
            }
            "exact_MI_uniform" => {
                self.exact_mi_uniform = value;
                Ok(())
            }
            "capacity" => {
                self.capacity = value;
                Ok(())
            }
            "MC_schemeA_err" => {
                self.mc_scheme_a_err = value;
                Ok(())
            }
            "MC_schemeB_err" => {
                self.mc_scheme_b_err = value;
                Ok(())
            }
            "MC_schemeC_mi" => {
                self.mc_scheme_c_mi = value;
                Ok(())
            }
            "MC_schemeC_se" => {
                self.mc_scheme_c_se = value;
                Ok(())
            }
            _ => Err(Error::Csv(format!("unknown column {column:?}"))),
        }
    }
}

/// Budget ratio used for the α-parameterized bounds on one row.
fn row_alpha(spec: &SweepSpec, t: u64, m: u64) -> f64 {
    match spec.mode {
        SweepMode::JointLinear => spec.scheme.alpha.expect("validated"),
        _ => m as f64 / t as f64,
    }
}

fn compute_row(
    spec: &SweepSpec,
    dist: &FirstArrivalDist<f64>,
    index: u64,
    t: u64,
    m: u64,
) -> Result<SweepRow> {
    let alpha = row_alpha(spec, t, m);
    let time = ub_time::<f64>(m, t);
    let mols = ub_molecules::<f64>(t, m);
    let joint = ub_joint::<f64>(t, alpha);

    let mut row = SweepRow {
        t,
        m,
        seed: spec.seed,
        ub_time: time.asymptotic,
        ub_time_safe: time.safe,
        ub_molecules: mols.asymptotic,
        ub_molecules_safe: mols.safe,
        ub_joint_entropy: joint.entropy_form,
        ub_joint_linear: joint.linear_form,
        ..SweepRow::default()
    };

    let scheme_a = if t >= 4 {
        let params = SchemeAParams::new(t, m)?;
        let bound = params.bound(dist)?;
        row.lb_scheme_a = Some(bound.lb_sqrt);
        Some(params)
    } else {
        None
    };

    let scheme_b = match spec.scheme.k {
        Some(k) => {
            // Level collisions abort the sweep: the configured scheme cannot
            // signal at this grid point.
            row.lb_scheme_b = Some(scheme_b_bound(t, m, k, dist)?.lb);
            SchemeBParams::new(t, m, k, dist).ok()
        }
        None => None,
    };

    let scheme_c = match spec.scheme.r {
        Some(r) => {
            let params = SchemeCParams::new(t, alpha, r, dist)?;
            row.lb_scheme_c = Some(params.lower_bound());
            Some(params)
        }
        None => None,
    };

    if spec.exact {
        if t > MAX_EXACT_SLOTS || m > MAX_EXACT_MOLECULES {
            return Err(Error::Core(molcap_core::Error::TooLarge {
                slots: t,
                molecules: m,
                max_slots: MAX_EXACT_SLOTS,
                max_molecules: MAX_EXACT_MOLECULES,
            }));
        }
        let patterns = ReleasePattern::enumerate_all(t, m)?;
        let uniform = InputEnsemble::uniform(patterns.clone())?;
        row.exact_mi_uniform = Some(exact_mi(&uniform, dist)?);
        row.capacity = Some(capacity_small(&patterns, dist, spec.tol)?.bits);
    }

    if spec.trials > 0 {
        // One stream per row, consumed in a fixed scheme order, keeps the
        // output independent of how rows are scheduled.
        let mut rng = worker_rng(spec.seed, index);
        if let Some(params) = &scheme_a {
            row.mc_scheme_a_err = Some(params.simulate_error_rate(dist, spec.trials, &mut rng));
        }
        if let Some(params) = &scheme_b {
            row.mc_scheme_b_err = Some(params.simulate_error_rate(dist, spec.trials, &mut rng));
        }
        if let Some(params) = &scheme_c {
            let est = scheme_c_mc_validate(t, params.r(), dist, spec.trials, &mut rng)?;
            row.mc_scheme_c_mi = Some(est.mean_bits);
            row.mc_scheme_c_se = Some(est.std_err);
        }
    }

    check_sandwich(&row)?;
    Ok(row)
}

/// Every scheme lower bound must sit below every safe upper bound.
fn check_sandwich(row: &SweepRow) -> Result<()> {
    let lowers = [
        ("LB_schemeA", row.lb_scheme_a),
        ("LB_schemeB", row.lb_scheme_b),
        ("LB_schemeC", row.lb_scheme_c),
    ];
    let uppers = [
        ("UB_time_safe", row.ub_time_safe),
        ("UB_molecules_safe", row.ub_molecules_safe),
        ("UB_joint_entropy", row.ub_joint_entropy),
        ("UB_joint_linear", row.ub_joint_linear),
    ];
    for (lb_name, lb) in lowers {
        let Some(lb) = lb else { continue };
        for (ub_name, ub) in uppers {
            if lb > ub + 1e-9 {
                return Err(Error::Sandwich {
                    t: row.t,
                    m: row.m,
                    lb_name,
                    lb,
                    ub_name,
                    ub,
                });
            }
        }
    }
    Ok(())
}

/// Runs the sweep. Rows come back in grid order; grid points are evaluated
/// in parallel but each draws from its own seed-derived stream, so output
/// is identical for identical spec and seed.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let dist = spec.dist.build()?;
    spec.grid
        .par_iter()
        .enumerate()
        .map(|(index, &(t, m))| compute_row(spec, &dist, index as u64, t, m))
        .collect()
}
