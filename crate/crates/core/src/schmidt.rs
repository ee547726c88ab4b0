//! Schmidt decomposition of a sampled joint spectral amplitude.
//!
//! The discrete kernel `A[j, k] = sqrt(w_i[j]) F[j, k] sqrt(w_s[k])` carries
//! the quadrature weights, so its singular values approximate those of the
//! continuous integral operator with kernel `F`.

use ndarray::Array2;
use num_complex::Complex;

use crate::biphoton::{jsa_with_options, JsaGrid, JsaOptions, DEFAULT_HALFWIDTH_FACTOR};
use crate::error::{Error, Result};
use crate::params::{make_grid, PumpSpec, ResonatorParams};
use crate::scalar::{lit, to_f64, Real};

/// Singular values below this fraction of the largest are discarded.
pub const TRUNCATION: f64 = 1e-14;

/// Largest grid resolution tried by [`converged_schmidt`].
pub const MAX_RESOLUTION: usize = 8193;

/// Normalized Schmidt spectrum of a biphoton state.
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtResult<T = f64> {
    /// Schmidt coefficients `lambda_n`, descending, summing to one.
    pub coefficients: Vec<T>,
    /// `K = 1 / sum lambda_n^2`.
    pub schmidt_number: T,
    /// Heralded purity `1 / K`.
    pub purity: T,
    pub n_retained: usize,
}

/// Schmidt modes on the sampling grids: `F ~ sum_n sqrt(lambda_n) psi_n(w_i) phi_n(w_s)`.
#[derive(Debug, Clone)]
pub struct SchmidtModes<T = f64> {
    pub coefficients: Vec<T>,
    /// Idler modes as columns, unit-normalized under the idler quadrature.
    pub idler: Array2<Complex<T>>,
    /// Signal modes as columns, unit-normalized under the signal quadrature.
    pub signal: Array2<Complex<T>>,
}

fn weighted_kernel<T: Real>(values: &Array2<Complex<T>>, w_i: &[T], w_s: &[T]) -> Result<Array2<Complex<T>>> {
    let (rows, cols) = values.dim();
    if rows != w_i.len() || cols != w_s.len() {
        return Err(Error::BadGridSpec(format!(
            "kernel {rows}x{cols} does not match {}x{} weights",
            w_i.len(),
            w_s.len()
        )));
    }
    let sqrt_i: Vec<T> = w_i.iter().map(|w| w.sqrt()).collect();
    let sqrt_s: Vec<T> = w_s.iter().map(|w| w.sqrt()).collect();
    Ok(Array2::from_shape_fn((rows, cols), |(j, k)| {
        values[[j, k]] * (sqrt_i[j] * sqrt_s[k])
    }))
}

fn normalize<T: Real>(singular_values: &[T]) -> Result<SchmidtResult<T>> {
    let largest = singular_values.iter().copied().fold(T::zero(), T::max);
    if !(largest > T::zero()) {
        return Err(Error::DegenerateKernel);
    }
    let floor = largest * lit(TRUNCATION);
    let retained: Vec<T> = singular_values.iter().copied().filter(|&s| s >= floor).collect();
    let total: T = retained.iter().map(|&s| s * s).sum();
    let coefficients: Vec<T> = retained.iter().map(|&s| s * s / total).collect();
    let schmidt_number = coefficient_schmidt_number(&coefficients);
    Ok(SchmidtResult {
        n_retained: coefficients.len(),
        coefficients,
        schmidt_number,
        purity: T::one() / schmidt_number,
    })
}

fn coefficient_schmidt_number<T: Real>(coefficients: &[T]) -> T {
    let participation: T = coefficients.iter().map(|&l| l * l).sum();
    T::one() / participation
}

/// Schmidt decomposition of `jsa` using its grids' quadrature weights.
pub fn schmidt_decompose<T: Real>(jsa: &JsaGrid<T>) -> Result<SchmidtResult<T>> {
    decompose_kernel(&jsa.values, jsa.grid_i.weights(), jsa.grid_s.weights())
}

/// Schmidt decomposition of an arbitrary sampled kernel with row weights
/// `w_i` and column weights `w_s`.
pub fn decompose_kernel<T: Real>(values: &Array2<Complex<T>>, w_i: &[T], w_s: &[T]) -> Result<SchmidtResult<T>> {
    let kernel = weighted_kernel(values, w_i, w_s)?;
    normalize(&T::singular_values(&kernel)?)
}

/// Schmidt coefficients together with the mode functions.
pub fn schmidt_modes<T: Real>(jsa: &JsaGrid<T>) -> Result<SchmidtModes<T>> {
    let (w_i, w_s) = (jsa.grid_i.weights(), jsa.grid_s.weights());
    let kernel = weighted_kernel(&jsa.values, w_i, w_s)?;
    let svd = T::thin_svd(&kernel)?;
    let result = normalize(&svd.s)?;
    let n = result.n_retained;
    let idler = Array2::from_shape_fn((w_i.len(), n), |(j, m)| svd.u[[j, m]] / w_i[j].sqrt());
    let signal = Array2::from_shape_fn((w_s.len(), n), |(k, m)| svd.v[[k, m]].conj() / w_s[k].sqrt());
    Ok(SchmidtModes {
        coefficients: result.coefficients,
        idler,
        signal,
    })
}

/// `K = 1 / sum lambda_n^2` for coefficients that sum to one within 1e-9.
pub fn schmidt_number<T: Real>(coefficients: &[T]) -> Result<T> {
    let total: T = coefficients.iter().copied().sum();
    if !((total - T::one()).abs() <= lit(1e-9)) {
        return Err(Error::NotNormalized(to_f64(total)));
    }
    Ok(coefficient_schmidt_number(coefficients))
}

/// Outcome of a grid-refinement run.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport<T = f64> {
    /// `|K_N - K_{2N-1}|` for the last refinement step.
    pub achieved_error: T,
    /// Resolution of the returned result.
    pub resolution: usize,
    /// `|K_base - K_{2 base - 1}|`; exceeds `tol` when the starting grid was
    /// too coarse on its own.
    pub base_error: T,
    /// `(resolution, K)` for every evaluated grid.
    pub history: Vec<(usize, T)>,
}

impl<T: Real> ConvergenceReport<T> {
    /// True when the starting resolution already met the tolerance.
    pub fn base_sufficient(&self, tol: T) -> bool {
        self.base_error < tol
    }
}

/// Grid extents used by [`converged_schmidt_with_options`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridOptions {
    /// Signal/idler half-width in units of `kappa_is`.
    pub halfwidth_factor: f64,
    pub jsa: JsaOptions,
    pub max_resolution: usize,
}

impl Default for GridOptions {
    fn default() -> Self {
        Self {
            halfwidth_factor: DEFAULT_HALFWIDTH_FACTOR,
            jsa: JsaOptions::default(),
            max_resolution: MAX_RESOLUTION,
        }
    }
}

/// Schmidt number certified by grid refinement: resolutions `N`, `2N - 1`,
/// `4N - 3`, ... on a fixed extent until consecutive values differ by less
/// than `tol`.
pub fn converged_schmidt<T: Real>(
    params: &ResonatorParams<T>,
    pump: &PumpSpec<T>,
    base_n: usize,
    tol: T,
) -> Result<(SchmidtResult<T>, ConvergenceReport<T>)> {
    converged_schmidt_with_options(params, pump, base_n, tol, &GridOptions::default())
}

pub fn converged_schmidt_with_options<T: Real>(
    params: &ResonatorParams<T>,
    pump: &PumpSpec<T>,
    base_n: usize,
    tol: T,
    options: &GridOptions,
) -> Result<(SchmidtResult<T>, ConvergenceReport<T>)> {
    let half_width = lit::<T>(options.halfwidth_factor) * params.kappa_is;
    converged_schmidt_by(base_n, tol, options.max_resolution, |n| {
        let grid_i = make_grid(params.omega0_i, half_width, n)?;
        let grid_s = make_grid(params.omega0_s, half_width, n)?;
        jsa_with_options(params, pump, &grid_i, &grid_s, &options.jsa)
    })
}

/// Refinement driver over an arbitrary JSA builder `build(n)`.
pub fn converged_schmidt_by<T, B>(
    base_n: usize,
    tol: T,
    max_resolution: usize,
    mut build: B,
) -> Result<(SchmidtResult<T>, ConvergenceReport<T>)>
where
    T: Real,
    B: FnMut(usize) -> Result<JsaGrid<T>>,
{
    if base_n < 3 || base_n % 2 == 0 {
        return Err(Error::BadGridSpec(format!("base_n must be odd and >= 3, got {base_n}")));
    }
    if !(tol > T::zero()) {
        return Err(Error::BadGridSpec("tolerance must be positive".into()));
    }
    let mut n = base_n;
    let mut previous = schmidt_decompose(&build(n)?)?;
    let mut history = vec![(n, previous.schmidt_number)];
    let mut base_error = None;
    loop {
        let next_n = 2 * n - 1;
        if next_n > max_resolution {
            let (resolution, k) = *history.last().expect("history is never empty");
            let achieved = if history.len() > 1 {
                (history[history.len() - 1].1 - history[history.len() - 2].1).abs()
            } else {
                T::infinity()
            };
            return Err(Error::NoConvergence {
                schmidt_number: to_f64(k),
                achieved_error: to_f64(achieved),
                resolution,
            });
        }
        let current = schmidt_decompose(&build(next_n)?)?;
        let error = (current.schmidt_number - previous.schmidt_number).abs();
        history.push((next_n, current.schmidt_number));
        let base_error = *base_error.get_or_insert(error);
        if error < tol {
            return Ok((
                current,
                ConvergenceReport {
                    achieved_error: error,
                    resolution: next_n,
                    base_error,
                    history,
                },
            ));
        }
        previous = current;
        n = next_n;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::biphoton::jsa_from_sum_amplitude;
    use crate::params::FrequencyGrid;

    fn uniform(n: usize) -> Vec<f64> {
        vec![1.0; n]
    }

    #[test]
    fn rank_one_kernel() {
        let a = Array2::from_shape_fn((5, 4), |(j, k)| {
            Complex::new((j as f64 + 1.0) * 0.3, 0.1) * Complex::new(1.0, k as f64)
        });
        let r = decompose_kernel(&a, &uniform(5), &uniform(4)).unwrap();
        assert_eq!(r.n_retained, 1);
        assert!((r.coefficients[0] - 1.0).abs() < 1e-15);
        assert!((r.schmidt_number - 1.0).abs() < 1e-12);
        assert!((r.purity - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_mode_kernel() {
        // f (x) g + f' (x) g' with orthonormal factors of equal weight
        let f = [0.5, 0.5, 0.5, 0.5];
        let f2 = [0.5, -0.5, 0.5, -0.5];
        let g = [1.0, 0.0, 0.0];
        let g2 = [0.0, 0.0, 1.0];
        let a = Array2::from_shape_fn((4, 3), |(j, k)| Complex::new(f[j] * g[k] + f2[j] * g2[k], 0.0));
        let r = decompose_kernel(&a, &uniform(4), &uniform(3)).unwrap();
        assert_eq!(r.n_retained, 2);
        assert!((r.coefficients[0] - 0.5).abs() < 1e-14);
        assert!((r.coefficients[1] - 0.5).abs() < 1e-14);
        assert!((r.schmidt_number - 2.0).abs() < 1e-12);
    }

    #[test]
    fn zero_kernel_is_degenerate() {
        let a = Array2::<Complex<f64>>::zeros((3, 3));
        assert_eq!(decompose_kernel(&a, &uniform(3), &uniform(3)), Err(Error::DegenerateKernel));
    }

    #[test]
    fn schmidt_number_of_simple_spectra() {
        assert_eq!(schmidt_number(&[1.0]).unwrap(), 1.0);
        assert_eq!(schmidt_number(&[0.5, 0.5]).unwrap(), 2.0);
        for n in [3usize, 7, 20] {
            let k = schmidt_number(&vec![1.0 / n as f64; n]).unwrap();
            assert!((k - n as f64).abs() < 1e-12);
        }
        assert!(matches!(schmidt_number(&[0.7, 0.2]), Err(Error::NotNormalized(_))));
    }

    #[test]
    fn modes_reconstruct_kernel() {
        let grid: FrequencyGrid = make_grid(0.0, 3.0, 31).unwrap();
        let values = Array2::from_shape_fn((31, 31), |(j, k)| {
            let (x, y) = (grid.point(j), grid.point(k));
            Complex::new((-x * x - y * y - 1.2 * x * y).exp(), 0.2 * (x - y).sin())
        });
        let jsa = JsaGrid::new(grid.clone(), grid.clone(), values.clone()).unwrap();
        let modes = schmidt_modes(&jsa).unwrap();
        let total: f64 = values
            .indexed_iter()
            .map(|((j, k), v)| v.norm_sqr() * grid.weights()[j] * grid.weights()[k])
            .sum();
        for j in (0..31).step_by(5) {
            for k in (0..31).step_by(7) {
                let mut acc = Complex::new(0.0, 0.0);
                for (n, &l) in modes.coefficients.iter().enumerate() {
                    acc += modes.idler[[j, n]] * modes.signal[[k, n]] * (l * total).sqrt();
                }
                assert!((acc - values[[j, k]]).norm() < 1e-10);
            }
        }
        let norm: f64 = (0..31).map(|j| modes.idler[[j, 0]].norm_sqr() * grid.weights()[j]).sum();
        assert!((norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rank_one_hook_converges_immediately() {
        let params = ResonatorParams::with_optimal_couplings(1.0, 1.0).unwrap();
        let (r, report) = converged_schmidt_by(17, 1e-12, MAX_RESOLUTION, |n| {
            let g: FrequencyGrid = make_grid(0.0, 8.0, n)?;
            jsa_from_sum_amplitude(&params, &g, &g, |_| Complex::new(1.0, 0.0))
        })
        .unwrap();
        assert!(report.achieved_error < 1e-12);
        assert_eq!(report.resolution, 33);
        assert!((r.schmidt_number - 1.0).abs() < 1e-12);
    }

    #[test]
    fn refinement_cap_reports_best_estimate() {
        let mut calls = 0;
        let err = converged_schmidt_by(5, 1e-30, 17, |n| {
            calls += 1;
            // kernel whose Schmidt number drifts with resolution
            let g: FrequencyGrid = make_grid(0.0, 1.0, n)?;
            let values = Array2::from_shape_fn((n, n), |(j, k)| {
                Complex::new(if j == k || j + k == n / 2 { 1.0 } else { 0.0 }, 0.0)
            });
            JsaGrid::new(g.clone(), g, values)
        })
        .unwrap_err();
        assert_eq!(calls, 3);
        assert!(matches!(err, Error::NoConvergence { resolution: 17, .. }));
    }

    #[test]
    fn rejects_bad_refinement_arguments() {
        let params = ResonatorParams::with_optimal_couplings(1.0, 1.0).unwrap();
        let pump = PumpSpec::from_fwhm(1.0, 0.0).unwrap();
        assert!(converged_schmidt(&params, &pump, 64, 1e-3).is_err());
        assert!(converged_schmidt(&params, &pump, 65, 0.0).is_err());
    }

    #[test]
    fn single_precision_rank_one() {
        let a = Array2::from_shape_fn((6, 6), |(j, k)| Complex::new((j + 1) as f32 * (k + 2) as f32, 0.0));
        let r = decompose_kernel(&a, &[1.0f32; 6], &[1.0f32; 6]).unwrap();
        assert!((r.schmidt_number - 1.0).abs() < 1e-5);
    }
}
