//! End-to-end checks of the JSA construction and its Schmidt decomposition
//! against independent brute-force evaluations.

use ndarray::Array2;
use num_complex::Complex64;
use ringpure::biphoton::{jsa_from_sum_amplitude, JsaGrid};
use ringpure::params::sigma_from_fwhm;
use ringpure::schmidt::decompose_kernel;
use ringpure::{jsa, jsi_correlation, make_grid, schmidt_decompose, PumpSpec, ResonatorParams};

/// `K = (sum |A|^2)^2 / ||A^H A||_F^2`, which needs no singular values.
fn trace_identity_k(values: &Array2<Complex64>, w_i: &[f64], w_s: &[f64]) -> f64 {
    let (n, m) = values.dim();
    let a = Array2::from_shape_fn((n, m), |(j, k)| values[[j, k]] * (w_i[j] * w_s[k]).sqrt());
    let frob: f64 = a.iter().map(|v| v.norm_sqr()).sum();
    let gram = a.t().mapv(|v| v.conj()).dot(&a);
    let gram_sq: f64 = gram.iter().map(|v| v.norm_sqr()).sum();
    frob * frob / gram_sq
}

fn closed_form_transfer(kappa: f64, g: f64, detuning: f64) -> Complex64 {
    let delta = -detuning;
    Complex64::new(2.0 * g * kappa.sqrt(), 0.0)
        / Complex64::new(-2.0 * delta * delta + 2.0 * g * g, delta * kappa)
}

fn closed_form_alpha(sigma: f64, detuning: f64) -> f64 {
    (2.0 * std::f64::consts::PI * sigma).powf(-0.25) * (-detuning * detuning / (4.0 * sigma)).exp()
}

#[test]
fn correlated_gaussian_kernel_matches_dense_oracle() {
    let kernel = |n: usize| {
        let g = make_grid(0.0f64, 6.0, n).unwrap();
        let values = Array2::from_shape_fn((n, n), |(j, k)| {
            let (x, y) = (g.point(j), g.point(k));
            Complex64::new((-x * x - y * y - 1.2 * x * y).exp(), 0.0)
        });
        (g, values)
    };
    let (g, values) = kernel(129);
    let k = decompose_kernel(&values, g.weights(), g.weights()).unwrap().schmidt_number;
    let (g2, values2) = kernel(257);
    let oracle = trace_identity_k(&values2, g2.weights(), g2.weights());
    assert!((k - oracle).abs() < 1e-6, "{k} vs {oracle}");
    // Gaussian kernel exp(-x^2 - y^2 - 2 b x y) has K = 1 / sqrt(1 - b^2)
    // for its squared-modulus overlap; here b = 0.6
    assert!((k - 1.0 / (1.0f64 - 0.36).sqrt()).abs() < 1e-6, "{k}");
}

#[test]
fn two_dimensional_brute_force_matches_convolution() {
    // I_p evaluated directly as a 1-D integral at every (omega_i, omega_s)
    // from closed forms on a finer independent pump grid
    let params = ResonatorParams::<f64>::with_optimal_couplings(2.0, 1.0).unwrap();
    let pump = PumpSpec::<f64>::from_fwhm(0.9 * params.kappa_p, 0.0).unwrap();
    let grid = make_grid(0.0f64, 8.0, 65).unwrap();
    let fast = jsa(&params, &pump, &grid, &grid).unwrap();

    let extent = 8.0 * params.kappa_p.max(pump.fwhm());
    let pump_grid = make_grid(0.0f64, extent, 4 * 1024 + 1).unwrap();
    let sigma = pump.sigma();
    let f = |w: f64| closed_form_transfer(params.kappa_p, params.g_p, w) * closed_form_alpha(sigma, w);
    let mut max_rel = 0.0f64;
    let peak = fast.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    for j in 0..65 {
        for k in 0..65 {
            let (wi, ws) = (grid.point(j), grid.point(k));
            let total = wi + ws;
            let mut ip = Complex64::new(0.0, 0.0);
            for (p, &w) in pump_grid.points().iter().zip(pump_grid.weights()) {
                ip += f(total - p) * f(*p) * w;
            }
            let brute = ip
                * closed_form_transfer(params.kappa_is, params.g_is, wi)
                * closed_form_transfer(params.kappa_is, params.g_is, ws);
            max_rel = max_rel.max((brute - fast.values[[j, k]]).norm() / peak);
        }
    }
    assert!(max_rel < 1e-8, "{max_rel}");
}

#[test]
fn schmidt_invariances() {
    let params = ResonatorParams::<f64>::with_optimal_couplings(1.0, 1.0).unwrap();
    let pump = PumpSpec::<f64>::from_fwhm(0.6, 0.0).unwrap();
    let grid = make_grid(0.0f64, 8.0, 129).unwrap();
    let f = jsa(&params, &pump, &grid, &grid).unwrap();
    let base = schmidt_decompose(&f).unwrap();

    let total: f64 = base.coefficients.iter().sum();
    assert!((total - 1.0).abs() < 1e-12);
    assert!(base.schmidt_number >= 1.0);
    assert!(base.purity > 0.0 && base.purity <= 1.0);
    assert!(base.coefficients.windows(2).all(|w| w[0] >= w[1]));

    let compare = |other: &JsaGrid| {
        let r = schmidt_decompose(other).unwrap();
        let n = r.coefficients.len().min(base.coefficients.len());
        for i in 0..n {
            assert!((r.coefficients[i] - base.coefficients[i]).abs() < 1e-12);
        }
    };
    compare(&f.conjugated());
    compare(&f.transposed());
    let mut scaled = f.clone();
    let c = Complex64::new(0.3, -1.7);
    scaled.values.mapv_inplace(|v| v * c * c);
    compare(&scaled);
    let reweighted = JsaGrid::new(grid.with_weights_scaled(3.5), grid.with_weights_scaled(3.5), f.values.clone()).unwrap();
    compare(&reweighted);
}

#[test]
fn frequency_scale_covariance() {
    let params = ResonatorParams::<f64>::with_optimal_couplings(3.0, 1.0).unwrap();
    let pump = PumpSpec::<f64>::from_fwhm(1.2, 0.0).unwrap();
    let grid = make_grid(0.0f64, 8.0, 129).unwrap();
    let base = jsa(&params, &pump, &grid, &grid).unwrap();
    let base_k = schmidt_decompose(&base).unwrap();
    let base_jsi = ringpure::jsi(&base);
    for a in [0.37, 2.0, 11.0] {
        let p = params.scaled(a);
        let q = PumpSpec::<f64>::new(pump.sigma() * a * a, 0.0).unwrap();
        let g = grid.scaled(a);
        let f = jsa(&p, &q, &g, &g).unwrap();
        let r = schmidt_decompose(&f).unwrap();
        assert!((r.schmidt_number - base_k.schmidt_number).abs() < 1e-10);
        for (x, y) in r.coefficients.iter().zip(&base_k.coefficients).take(10) {
            assert!((x - y).abs() < 1e-10);
        }
        let p_jsi = ringpure::jsi(&f);
        for (x, y) in p_jsi.iter().zip(base_jsi.iter()) {
            assert!((x - y).abs() < 1e-10);
        }
    }
}

#[test]
fn outer_product_has_unit_schmidt_number() {
    let params = ResonatorParams::<f64>::with_optimal_couplings(1.0, 1.0).unwrap();
    for n in [33, 65, 257] {
        let g = make_grid(0.0f64, 8.0, n).unwrap();
        let f = jsa_from_sum_amplitude(&params, &g, &g, |_| Complex64::new(0.7, 0.2)).unwrap();
        let r = schmidt_decompose(&f).unwrap();
        assert!((r.schmidt_number - 1.0).abs() < 1e-12);
    }
}

#[test]
fn narrow_pump_is_anticorrelated_broad_ring_pump_is_not() {
    let grid = make_grid(0.0f64, 8.0, 257).unwrap();
    let narrow = ResonatorParams::<f64>::with_optimal_couplings(1.0, 1.0).unwrap();
    let pump = PumpSpec::<f64>::new(sigma_from_fwhm(0.1), 0.0).unwrap();
    let rho_narrow = jsi_correlation(&jsa(&narrow, &pump, &grid, &grid).unwrap());
    assert!(rho_narrow < -0.5, "{rho_narrow}");

    let broad = ResonatorParams::<f64>::with_optimal_couplings(10.0, 1.0).unwrap();
    let pump = PumpSpec::<f64>::new(sigma_from_fwhm(5.0 * broad.kappa_p), 0.0).unwrap();
    let rho_broad = jsi_correlation(&jsa(&broad, &pump, &grid, &grid).unwrap());
    assert!(rho_broad.abs() < 0.05, "{rho_broad}");
}
