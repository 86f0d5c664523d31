//! Cross-module invariants: scheme lower bounds and maximum-entropy upper
//! bounds must sandwich the exact small-instance capacity, and the interval
//! scheme's Fano bound must sit below the exact mutual information of its
//! own induced (message, decoder-output) law.

use molcap_core::bounds::{ub_joint, ub_molecules, ub_time};
use molcap_core::channel::capacity_small;
use molcap_core::schemes::scheme_b_bound;
use molcap_core::{FirstArrivalDist, ReleasePattern, SchemeAParams, SchemeCParams};

fn instant() -> FirstArrivalDist<f64> {
    FirstArrivalDist::from_table(&[1.0], 0.0).unwrap()
}

fn geometric_half() -> FirstArrivalDist<f64> {
    FirstArrivalDist::geometric(0.5, 8).unwrap()
}

#[test]
fn safe_upper_bounds_dominate_capacity() {
    for dist in [instant(), geometric_half()] {
        for t in 2..=4u64 {
            for m in 1..=2u64 {
                let patterns = ReleasePattern::enumerate_all(t, m).unwrap();
                let cap = capacity_small(&patterns, &dist, 1e-9).unwrap();
                assert!(cap.converged);
                let time = ub_time::<f64>(m, t);
                let mols = ub_molecules::<f64>(t, m);
                let joint = ub_joint::<f64>(t, m as f64 / t as f64);
                for (name, ub) in [
                    ("UB_time_safe", time.safe),
                    ("UB_molecules_safe", mols.safe),
                    ("UB_joint_entropy", joint.entropy_form),
                    ("UB_joint_linear", joint.linear_form),
                ] {
                    assert!(
                        cap.bits <= ub + 1e-9,
                        "t={t} m={m}: capacity {} above {name} {ub}",
                        cap.bits
                    );
                }
            }
        }
    }
}

#[test]
fn ub_time_safe_is_tight_on_noiseless_single_molecule() {
    // m=1, t=2 over a perfect channel: capacity is exactly log2(3), and so
    // is the safe time bound.
    let patterns = ReleasePattern::enumerate_all(2, 1).unwrap();
    let cap = capacity_small(&patterns, &instant(), 1e-10).unwrap();
    let safe = ub_time::<f64>(1, 2).safe;
    assert!((cap.bits - 3.0f64.log2()).abs() < 1e-8);
    assert!((safe - 3.0f64.log2()).abs() < 1e-12);
    assert!(cap.bits <= safe + 1e-8);
}

#[test]
fn ub_molecules_safe_dominates_geometric_instance() {
    let patterns = ReleasePattern::enumerate_all(2, 2).unwrap();
    let cap = capacity_small(&patterns, &geometric_half(), 1e-9).unwrap();
    let safe = ub_molecules::<f64>(2, 2).safe;
    assert!((safe - 2.0 * 3.0f64.log2()).abs() < 1e-12);
    assert!(cap.bits <= safe);
}

#[test]
fn scheme_bounds_stay_below_capacity() {
    let dist = geometric_half();
    for t in 2..=5u64 {
        for m in 1..=3u64 {
            let patterns = ReleasePattern::enumerate_all(t, m).unwrap();
            let cap = capacity_small(&patterns, &dist, 1e-9).unwrap().bits;

            if t >= 4 {
                let bound = SchemeAParams::new(t, m).unwrap().bound(&dist).unwrap();
                assert!(bound.lb_sqrt <= bound.lb_exact_ell);
                assert!(
                    bound.lb_exact_ell <= cap + 1e-9,
                    "t={t} m={m}: interval bound {} above capacity {cap}",
                    bound.lb_exact_ell
                );
            }

            // Level collisions mean the amplitude scheme is not applicable
            // at this size.
            if let Ok(b) = scheme_b_bound(t, m, 2.0, &dist) {
                assert!(
                    b.lb <= cap + 1e-9,
                    "t={t} m={m}: amplitude bound {} above capacity {cap}",
                    b.lb
                );
            }

            let c = SchemeCParams::new(t, m as f64 / t as f64, 0.5, &dist).unwrap();
            assert!(
                c.lower_bound() <= cap + 1e-9,
                "t={t} m={m}: release bound {} above capacity {cap}",
                c.lower_bound()
            );
        }
    }
}

#[test]
fn scheme_b_noiseless_bound_stays_below_capacity() {
    for t in 2..=4u64 {
        for m in 1..=3u64 {
            let patterns = ReleasePattern::enumerate_all(t, m).unwrap();
            let cap = capacity_small(&patterns, &instant(), 1e-9).unwrap().bits;
            let b = scheme_b_bound(t, m, 2.0, &instant()).unwrap();
            assert!(b.noiseless);
            assert!(b.lb <= cap + 1e-9, "t={t} m={m}");
        }
    }
}

/// Exact mutual information of the (message, decoded interval) pair for the
/// interval scheme with one molecule, computed from first-arrival
/// probabilities alone.
fn interval_scheme_exact_mi(params: &SchemeAParams, dist: &FirstArrivalDist<f64>) -> f64 {
    let (t, tau, ell) = (params.t(), params.tau(), params.ell());
    let outputs = (ell + 1) as usize;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for j in 1..=ell {
        let start = (j - 1) * tau + 1; // 1-based release slot
        let mut row = vec![0.0f64; outputs];
        for n in 0..=dist.n_max() {
            let arrival = start + n as u64;
            let u = if arrival <= t {
                arrival.div_ceil(tau).min(ell)
            } else {
                ell + 1
            };
            row[(u - 1) as usize] += dist.pmf(n);
        }
        // Tail mass never arrives.
        row[(ell + 1 - 1) as usize] += dist.tail_mass();
        rows.push(row);
    }
    let prior = 1.0 / ell as f64;
    let mut marginal = vec![0.0f64; outputs];
    for row in &rows {
        for (u, p) in row.iter().enumerate() {
            marginal[u] += prior * p;
        }
    }
    let mut mi = 0.0;
    for row in &rows {
        for (u, &p) in row.iter().enumerate() {
            if p > 0.0 {
                mi += prior * p * (p / marginal[u]).log2();
            }
        }
    }
    mi
}

#[test]
fn interval_scheme_fano_bound_is_consistent() {
    let dist = FirstArrivalDist::geometric(0.5, 32).unwrap();
    for t in [4u64, 9, 16, 25] {
        let params = SchemeAParams::new(t, 1).unwrap();
        let bound = params.bound(&dist).unwrap();
        let exact = interval_scheme_exact_mi(&params, &dist);
        assert!(
            exact >= bound.lb_exact_ell - 1e-12,
            "t={t}: exact MI {exact} below Fano bound {}",
            bound.lb_exact_ell
        );
    }
}
