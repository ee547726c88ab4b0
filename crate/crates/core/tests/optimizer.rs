use ringpure::optimize::{optimize_ratio, schmidt_objective, sweep_ratio_with, SWEEP_FWHM_BRACKET};
use ringpure::params::sigma_from_fwhm;
use ringpure::{OptimizeOptions, ResonatorParams};

fn fast_options() -> OptimizeOptions {
    OptimizeOptions {
        base_n: 129,
        ..OptimizeOptions::default()
    }
}

#[test]
fn single_entry_sweep_equals_direct_call() {
    let options = fast_options();
    let swept = sweep_ratio_with(&[6.6], 1e-4, &options).pop().unwrap().unwrap();
    let params = ResonatorParams::<f64>::with_optimal_couplings(6.6, 1.0).unwrap();
    let direct = optimize_ratio(&params, 1e-4, &options).unwrap();
    assert_eq!(swept, direct);
}

#[test]
fn sweep_rejects_ratios_below_one_per_entry() {
    let results = sweep_ratio_with(&[0.5, 10.0], 1e-4, &fast_options());
    assert!(results[0].is_err());
    assert!(results[1].is_ok());
}

#[test]
fn optimizer_is_scale_covariant() {
    let options = fast_options();
    let params = ResonatorParams::<f64>::with_optimal_couplings(3.0, 1.0).unwrap();
    let base = optimize_ratio(&params, 1e-4, &options).unwrap();
    let a = 2.5;
    let scaled = optimize_ratio(&params.scaled(a), 1e-4, &options).unwrap();
    assert!((scaled.k_min - base.k_min).abs() < 1e-8);
    assert!((scaled.sigma_opt / (a * a) - base.sigma_opt).abs() < 1e-8 * base.sigma_opt);
    assert_eq!(scaled.n_evals, base.n_evals);
}

#[test]
fn minimum_is_non_increasing_in_ratio() {
    let ratios = [1.0, 2.0, 4.0, 6.6, 10.0];
    let k: Vec<f64> = sweep_ratio_with(&ratios, 1e-4, &fast_options())
        .into_iter()
        .map(|r| r.unwrap().k_min)
        .collect();
    for w in k.windows(2) {
        assert!(w[1] <= w[0], "{k:?}");
    }
}

#[test]
fn minimum_beats_a_dense_log_scan() {
    let options = fast_options();
    let tol = 1e-4;
    let params = ResonatorParams::<f64>::with_optimal_couplings(1.0, 1.0).unwrap();
    let record = optimize_ratio(&params, tol, &options).unwrap();
    let mut objective = schmidt_objective(params, tol, options);
    let (lo, hi) = (
        sigma_from_fwhm(SWEEP_FWHM_BRACKET.0).ln(),
        sigma_from_fwhm(SWEEP_FWHM_BRACKET.1).ln(),
    );
    let scan_min = (0..50)
        .map(|k| objective((lo + (hi - lo) * k as f64 / 49.0).exp()).unwrap())
        .fold(f64::INFINITY, f64::min);
    assert!(record.k_min <= scan_min + tol, "{} vs {scan_min}", record.k_min);
    assert!(record.k_min >= 1.0);
}
