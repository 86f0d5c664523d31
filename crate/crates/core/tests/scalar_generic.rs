//! The numeric kernel must produce consistent answers at both scalar
//! precisions; f32 tolerances are scaled to its epsilon.

use molcap_core::bounds::{binary_entropy, ub_joint, ub_time};
use molcap_core::channel::{capacity_small, exact_mi, InputEnsemble, ReleasePattern};
use molcap_core::{
    FirstArrivalDist32, FirstArrivalDist64, Real, SchemeBParams32, SchemeCParams32, SchemeCParams64,
};

#[test]
fn entropies_and_bounds_agree_across_precisions() {
    for lambda in [0.0, 0.11, 0.25, 0.5, 0.9, 1.0] {
        let wide: f64 = binary_entropy(lambda).unwrap();
        let narrow: f32 = binary_entropy(lambda as f32).unwrap();
        assert!((wide - narrow as f64).abs() < 1e-6, "lambda={lambda}");
    }
    let wide = ub_time::<f64>(3, 100);
    let narrow = ub_time::<f32>(3, 100);
    assert!((wide.safe - narrow.safe as f64).abs() < 1e-4);
    let wide = ub_joint::<f64>(10, 0.7);
    let narrow = ub_joint::<f32>(10, 0.7);
    assert!((wide.entropy_form - narrow.entropy_form as f64).abs() < 1e-4);
}

#[test]
fn channel_analysis_works_at_f32() {
    let dist = FirstArrivalDist32::geometric(0.5, 4).unwrap();
    let patterns = ReleasePattern::enumerate_all(2, 1).unwrap();
    let uniform = InputEnsemble::<f32>::uniform(patterns.clone()).unwrap();
    let mi32 = exact_mi(&uniform, &dist).unwrap();

    let dist64 = FirstArrivalDist64::geometric(0.5, 4).unwrap();
    let uniform64 = InputEnsemble::<f64>::uniform(patterns.clone()).unwrap();
    let mi64 = exact_mi(&uniform64, &dist64).unwrap();
    assert!((mi64 - mi32 as f64).abs() < 1e-5, "{mi64} vs {mi32}");

    let cap32 = capacity_small(&patterns, &dist, 1e-4f32).unwrap();
    let cap64 = capacity_small(&patterns, &dist64, 1e-9f64).unwrap();
    assert!((cap64.bits - cap32.bits as f64).abs() < 1e-3);
}

#[test]
fn schemes_work_at_f32() {
    let dist = FirstArrivalDist32::from_table(&[0.5], 0.5).unwrap();
    let params = SchemeBParams32::new(10, 64, 2.0, &dist).unwrap();
    assert_eq!(params.levels(), &[32, 64]);
    assert_eq!(params.decode(20), Some(1));

    let geo32 = FirstArrivalDist32::geometric(0.5, 8).unwrap();
    let c32 = SchemeCParams32::new(6, 1.0, 0.5, &geo32).unwrap();
    let geo64 = FirstArrivalDist64::geometric(0.5, 8).unwrap();
    let c64 = SchemeCParams64::new(6, 1.0, 0.5, &geo64).unwrap();
    assert!((c64.i0() - c32.i0() as f64).abs() < 1e-5);
    assert!((c64.lower_bound() - c32.lower_bound() as f64).abs() < 1e-4);
}

#[test]
fn per_type_tolerances_are_live() {
    // A drift of 3e-5 passes the f32 normalization gate and fails f64's.
    let drifted = [0.5f32, 0.25, 0.125, 0.125 + 3e-5];
    assert!(FirstArrivalDist32::from_table(&drifted, 0.0).is_ok());
    let drifted64 = [0.5f64, 0.25, 0.125, 0.125 + 3e-5];
    assert!(FirstArrivalDist64::from_table(&drifted64, 0.0).is_err());
    assert!(f32::NORM_TOL > f64::NORM_TOL as f32);
}
