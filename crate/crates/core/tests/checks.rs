//! Each check on correct paths, and against a wrong hypothesis as a
//! negative control.

use levyito_core::jumpmeasure::BorelRegion;
use levyito_core::measure::{DensityForm, LevyMeasure, LevyTriplet, Region, Side, Support};
use levyito_core::simulate::{simulate_batch, PathSample, SimConfig};
use levyito_core::verify::*;

fn mixed() -> LevyTriplet<f64> {
    LevyTriplet::scalar(0.0, 1.0, LevyMeasure::atoms_1d(&[(1.0, 1.0), (-1.0, 1.0)]))
}

fn paths(t: &LevyTriplet<f64>, cfg: &SimConfig<f64>, seed: u64, n: usize) -> Vec<PathSample<f64>> {
    simulate_batch(t, cfg, seed, n).unwrap()
}

fn region(s: &str) -> BorelRegion<f64> {
    s.parse().unwrap()
}

fn u_grid() -> Vec<Vec<f64>> {
    symmetric_grid(10, 0.5)
}

#[test]
fn ecf_accepts_truth_and_rejects_wrong_variance() {
    let t = mixed();
    let p = paths(&t, &SimConfig::new(1.0, 1.0), 11, 20_000);
    assert_eq!(check_ecf(&p, &t, 1.0, &u_grid()).unwrap().status, CheckStatus::Pass);
    let wrong = LevyTriplet::scalar(0.0, 1.3, t.measure.clone());
    assert_eq!(check_ecf(&p, &wrong, 1.0, &u_grid()).unwrap().status, CheckStatus::Fail);
}

#[test]
fn ecf_on_infinite_activity_density() {
    let m = LevyMeasure::density(
        DensityForm::PowerLaw {
            coefficient: 1.0,
            exponent: 1.5,
        },
        Support {
            inner: 0.0,
            outer: 2.0,
            side: Side::Both,
        },
    );
    let t = LevyTriplet::scalar(0.2, 0.0, m);
    let p = paths(&t, &SimConfig::new(1.0, 1.0), 12, 20_000);
    let r = check_ecf(&p, &t, 1.0, &u_grid()).unwrap();
    assert_eq!(r.status, CheckStatus::Pass, "{r}");
}

#[test]
fn poisson_law_rejects_wrong_rate() {
    let t = LevyTriplet::scalar(0.0, 0.0, LevyMeasure::atoms_1d(&[(1.0, 2.0)]));
    let p = paths(&t, &SimConfig::new(1.0, 1.0), 13, 50_000);
    let counts = jump_counts(&p, &region("[1,inf)"), 1.0).unwrap();
    assert_eq!(check_poisson_law(&counts, 2.0, Some(13)).unwrap().status, CheckStatus::Pass);
    assert_eq!(check_poisson_law(&counts, 2.2, Some(13)).unwrap().status, CheckStatus::Fail);
}

#[test]
fn jump_moments_reject_wrong_measure() {
    let t = LevyTriplet::scalar(0.0, 0.0, LevyMeasure::atoms_1d(&[(2.0, 3.0)]));
    let p = paths(&t, &SimConfig::new(1.0, 1.0), 14, MIN_MOMENT_REPLICATES);
    let b = region("[1,inf)");
    let ok = check_jump_moments(&p, |x| x[0], &b, 1.0, &t.measure).unwrap();
    assert_eq!(ok.status, CheckStatus::Pass, "{ok}");
    let wrong = LevyMeasure::atoms_1d(&[(2.0, 3.3)]);
    let bad = check_jump_moments(&p, |x| x[0], &b, 1.0, &wrong).unwrap();
    assert_eq!(bad.status, CheckStatus::Fail);
}

#[test]
fn residual_rejects_wrong_covariance() {
    let t = mixed();
    let p = paths(&t, &SimConfig::new(1.0, 1.0), 15, 20_000);
    let u: Vec<f64> = (1..=6).map(|k| k as f64 * 0.5).collect();
    assert_eq!(check_gaussian_residual(&p, &t, 1.0, &u).unwrap().status, CheckStatus::Pass);
    let wrong = LevyTriplet::scalar(0.0, 1.3, t.measure.clone());
    assert_eq!(check_gaussian_residual(&p, &wrong, 1.0, &u).unwrap().status, CheckStatus::Fail);
}

#[test]
fn residual_exact_without_gaussian_part() {
    let t = LevyTriplet::scalar(0.4, 0.0, LevyMeasure::atoms_1d(&[(0.5, 3.0), (-1.5, 1.0)]));
    let p = paths(&t, &SimConfig::new(2.0, 0.5), 16, 500);
    let r = check_gaussian_residual(&p, &t, 2.0, &[1.0]).unwrap();
    assert_eq!(r.status, CheckStatus::Pass, "{r}");
    let wrong = LevyTriplet::scalar(0.5, 0.0, t.measure.clone());
    assert_eq!(check_gaussian_residual(&p, &wrong, 2.0, &[1.0]).unwrap().status, CheckStatus::Fail);
}

#[test]
fn martingale_rejects_wrong_drift() {
    let t = mixed();
    let p = paths(&t, &SimConfig::new(1.0, 0.5), 17, 20_000);
    let ok = check_martingale_normalization(&p, &t, &[1.0], 0.5, 1.0).unwrap();
    assert_eq!(ok.status, CheckStatus::Pass, "{ok}");
    let wrong = LevyTriplet::scalar(0.3, 1.0, t.measure.clone());
    let bad = check_martingale_normalization(&p, &wrong, &[1.0], 0.5, 1.0).unwrap();
    assert_eq!(bad.status, CheckStatus::Fail);
}

#[test]
fn strong_markov_rejects_wrong_exponent() {
    let t = mixed();
    let cfg = SimConfig::new(10.0, 10.0).with_probe(Region::outside(1.0), vec![0.5]);
    let p = paths(&t, &cfg, 18, 20_000);
    let b = region("|x| in [1,inf)");
    let ok = check_strong_markov(&p, &t, &b, 0.5, &u_grid()).unwrap();
    assert_eq!(ok.status, CheckStatus::Pass, "{ok}");
    let wrong = LevyTriplet::scalar(0.0, 2.0, t.measure.clone());
    assert_eq!(
        check_strong_markov(&p, &wrong, &b, 0.5, &u_grid()).unwrap().status,
        CheckStatus::Fail
    );
}

#[test]
fn strong_markov_horizon_rule() {
    let t = mixed();
    let cfg = SimConfig::new(5.0, 5.0).with_probe(Region::outside(1.0), vec![0.5]);
    let p = paths(&t, &cfg, 19, 10);
    assert!(check_strong_markov(&p, &t, &region("|x| in [1,inf)"), 0.5, &u_grid()).is_err());
}

#[test]
fn jump_covariance_disjoint_regions_vanish() {
    let t = mixed();
    let p = paths(&t, &SimConfig::new(1.0, 1.0), 20, 50_000);
    let r = check_jump_covariance_identity(
        &p,
        &t.measure,
        |x| x[0],
        &region("[1,inf)"),
        &region("(-inf,-1]"),
        1.0,
        Compensation::Compensated,
    )
    .unwrap();
    assert_eq!(r.status, CheckStatus::Pass, "{r}");
    assert_eq!(r.components[1].statistic, 0.0);
}

#[test]
fn independence_control_fails_and_disjointness_is_enforced() {
    let t = mixed();
    let p = paths(&t, &SimConfig::new(1.0, 1.0), 21, 20_000);
    let g = symmetric_grid(2, 1.0);
    let b1 = region("[1,inf)");
    assert!(check_disjoint_independence(&p, &b1, &region("[0.5,2]"), 1.0, &g, &g).is_err());
    let control = check_disjoint_independence_unchecked(&p, &b1, &b1, 1.0, &g, &g).unwrap();
    assert_eq!(control.status, CheckStatus::Fail);
}

#[test]
fn small_samples_are_inconclusive() {
    let t = mixed();
    let p = paths(&t, &SimConfig::new(1.0, 1.0), 22, 500);
    let r = check_ecf(&p, &t, 1.0, &u_grid()).unwrap();
    assert_eq!(r.status, CheckStatus::Inconclusive);
    assert!(!r.pass);
}

#[test]
fn single_precision_paths_check_out() {
    let t = LevyTriplet::<f32>::scalar(0.0, 1.0, LevyMeasure::atoms_1d(&[(1.0, 1.0), (-1.0, 1.0)]));
    let p = simulate_batch(&t, &SimConfig::new(1.0f32, 1.0), 23, 20_000).unwrap();
    let r = check_ecf(&p, &t, 1.0, &symmetric_grid(10, 0.5f32)).unwrap();
    assert_eq!(r.status, CheckStatus::Pass, "{r}");
}

#[test]
fn reports_serialize_stably() {
    let t = mixed();
    let p = paths(&t, &SimConfig::new(1.0, 1.0), 24, 10_000);
    let a = check_ecf(&p, &t, 1.0, &u_grid()).unwrap();
    let json = CheckReport::to_json_array(std::slice::from_ref(&a));
    let back: Vec<CheckReport> = serde_json::from_str(&json).unwrap();
    assert_eq!(back[0], a);
    assert!(json.contains("\"N\": 10000"));
    assert!(json.contains("\"seed\": 24"));
}
