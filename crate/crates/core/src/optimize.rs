//! Pump-bandwidth minimization of the Schmidt number.
//!
//! The search runs golden-section steps on `ln sigma`. Every objective value
//! is a grid-converged Schmidt number whose refinement tolerance is ten
//! times tighter than the outer tolerance.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::params::{fwhm_from_sigma, sigma_from_fwhm, PumpSpec, ResonatorParams};
use crate::scalar::{lit, to_f64, Real};
use crate::schmidt::{converged_schmidt_with_options, GridOptions};

/// Initial pump FWHM bracket of [`sweep_ratio`], in units of `kappa_p`.
pub const SWEEP_FWHM_BRACKET: (f64, f64) = (0.05, 5.0);

/// Factor applied to the FWHM bound that failed to bracket the minimum.
pub const BRACKET_EXPANSION: f64 = 4.0;

/// Number of bracket expansions tried per side before giving up.
pub const MAX_EXPANSIONS: usize = 1;

/// Best pump width found for one `kappa_p / kappa_is` ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationRecord {
    pub ratio: f64,
    pub sigma_opt: f64,
    pub fwhm_over_kappa_p: f64,
    pub k_min: f64,
    pub purity: f64,
    /// Distinct objective evaluations.
    pub n_evals: usize,
    /// Bracket shrank below the tolerance around an interior minimum.
    pub converged: bool,
    /// False when `K` kept decreasing towards a bracket endpoint; `sigma_opt`
    /// then sits on that endpoint.
    pub bracketed: bool,
}

/// Numerical settings shared by the optimizer and the sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizeOptions {
    /// Starting resolution of the Schmidt-number refinement.
    pub base_n: usize,
    pub grid: GridOptions,
    /// Inner refinement tolerance as a fraction of the outer tolerance.
    pub inner_tol_factor: f64,
    pub max_evals: usize,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        Self {
            base_n: 513,
            grid: GridOptions::default(),
            inner_tol_factor: 0.1,
            max_evals: 200,
        }
    }
}

/// Golden-section minimum of `objective` over `ln sigma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineSearchOutcome {
    pub sigma: f64,
    pub value: f64,
    pub n_evals: usize,
    pub converged: bool,
}

/// Memoizing wrapper so that repeated probes (bracket expansion reuses
/// endpoints) cost nothing.
struct Objective<F> {
    f: F,
    cache: BTreeMap<u64, f64>,
}

impl<F: FnMut(f64) -> Result<f64>> Objective<F> {
    fn new(f: F) -> Self {
        Self { f, cache: BTreeMap::new() }
    }

    fn eval_log(&mut self, x: f64) -> Result<f64> {
        let key = x.to_bits();
        if let Some(&v) = self.cache.get(&key) {
            return Ok(v);
        }
        let v = (self.f)(x.exp())?;
        self.cache.insert(key, v);
        Ok(v)
    }

    fn n_evals(&self) -> usize {
        self.cache.len()
    }
}

/// Golden-section search on `ln sigma` over `[sigma_lo, sigma_hi]` until the
/// bracket is narrower than `tol` in `ln sigma` (a relative width in sigma).
///
/// Fails with [`Error::BadBracket`] when an endpoint beats both interior
/// probes of the initial bracket.
pub fn golden_section_log<F>(objective: F, sigma_lo: f64, sigma_hi: f64, tol: f64, max_evals: usize) -> Result<LineSearchOutcome>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut objective = Objective::new(objective);
    golden_section_cached(&mut objective, sigma_lo, sigma_hi, tol, max_evals)
}

fn golden_section_cached<F>(
    objective: &mut Objective<F>,
    sigma_lo: f64,
    sigma_hi: f64,
    tol: f64,
    max_evals: usize,
) -> Result<LineSearchOutcome>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(sigma_lo > 0.0 && sigma_hi > sigma_lo) {
        return Err(Error::NonPositiveVariance(sigma_lo.min(sigma_hi)));
    }
    if !(tol > 0.0) {
        return Err(Error::BadGridSpec("tolerance must be positive".into()));
    }
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (sigma_lo.ln(), sigma_hi.ln());
    let fa = objective.eval_log(a)?;
    let fb = objective.eval_log(b)?;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = objective.eval_log(x1)?;
    let mut f2 = objective.eval_log(x2)?;
    let interior = f1.min(f2);
    if fa.min(fb) < interior {
        let at_upper = fb < fa;
        let (x, k) = if at_upper { (b, fb) } else { (a, fa) };
        return Err(Error::BadBracket {
            at_upper,
            sigma: x.exp(),
            schmidt_number: k,
        });
    }
    let mut best = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    let mut converged = true;
    while b - a > tol {
        if objective.n_evals() >= max_evals {
            converged = false;
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = objective.eval_log(x1)?;
            if f1 < best.1 {
                best = (x1, f1);
            }
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = objective.eval_log(x2)?;
            if f2 < best.1 {
                best = (x2, f2);
            }
        }
    }
    Ok(LineSearchOutcome {
        sigma: best.0.exp(),
        value: best.1,
        n_evals: objective.n_evals(),
        converged,
    })
}

/// Grid-converged Schmidt number as a function of the pump variance.
pub fn schmidt_objective<T: Real>(
    params: ResonatorParams<T>,
    tol: f64,
    options: OptimizeOptions,
) -> impl FnMut(f64) -> Result<f64> {
    let inner_tol = lit::<T>(tol * options.inner_tol_factor);
    move |sigma: f64| {
        let pump = PumpSpec::new(lit::<T>(sigma), params.omega0_p)?;
        let (result, _) =
            converged_schmidt_with_options(&params, &pump, options.base_n, inner_tol, &options.grid)?;
        Ok(to_f64(result.schmidt_number))
    }
}

fn record<T: Real>(params: &ResonatorParams<T>, outcome: LineSearchOutcome, bracketed: bool) -> OptimizationRecord {
    let kappa_p = to_f64(params.kappa_p);
    OptimizationRecord {
        ratio: kappa_p / to_f64(params.kappa_is),
        sigma_opt: outcome.sigma,
        fwhm_over_kappa_p: fwhm_from_sigma(outcome.sigma) / kappa_p,
        k_min: outcome.value,
        purity: 1.0 / outcome.value,
        n_evals: outcome.n_evals,
        converged: outcome.converged && bracketed,
        bracketed,
    }
}

/// Pump variance in `[sigma_lo, sigma_hi]` minimizing the Schmidt number for
/// fixed couplings.
pub fn optimize_pump_width<T: Real>(
    params: &ResonatorParams<T>,
    sigma_lo: f64,
    sigma_hi: f64,
    tol: f64,
) -> Result<OptimizationRecord> {
    optimize_pump_width_with(params, sigma_lo, sigma_hi, tol, &OptimizeOptions::default())
}

pub fn optimize_pump_width_with<T: Real>(
    params: &ResonatorParams<T>,
    sigma_lo: f64,
    sigma_hi: f64,
    tol: f64,
    options: &OptimizeOptions,
) -> Result<OptimizationRecord> {
    let objective = schmidt_objective(*params, tol, *options);
    let outcome = golden_section_log(objective, sigma_lo, sigma_hi, tol, options.max_evals)?;
    Ok(record(params, outcome, true))
}

/// Bracketed search that widens the failing side of the bracket up to
/// [`MAX_EXPANSIONS`] times. If the minimum is still not bracketed the best
/// endpoint is returned with `bracketed = false`.
pub fn optimize_auto_bracket<T, F>(
    params: &ResonatorParams<T>,
    sigma_lo: f64,
    sigma_hi: f64,
    tol: f64,
    max_evals: usize,
    objective: F,
) -> Result<OptimizationRecord>
where
    T: Real,
    F: FnMut(f64) -> Result<f64>,
{
    let mut objective = Objective::new(objective);
    let (mut lo, mut hi) = (sigma_lo, sigma_hi);
    let sigma_factor = BRACKET_EXPANSION * BRACKET_EXPANSION;
    let mut expansions = 0;
    loop {
        match golden_section_cached(&mut objective, lo, hi, tol, max_evals) {
            Ok(outcome) => return Ok(record(params, outcome, true)),
            Err(Error::BadBracket { at_upper, sigma, schmidt_number }) => {
                if expansions == MAX_EXPANSIONS {
                    let outcome = LineSearchOutcome {
                        sigma,
                        value: schmidt_number,
                        n_evals: objective.n_evals(),
                        converged: false,
                    };
                    return Ok(record(params, outcome, false));
                }
                expansions += 1;
                if at_upper {
                    hi *= sigma_factor;
                } else {
                    lo /= sigma_factor;
                }
            }
            Err(other) => return Err(other),
        }
    }
}

/// Optimizes the pump width for each `kappa_p / kappa_is` ratio with optimal
/// couplings on both channels. Failures are reported per entry.
pub fn sweep_ratio(ratios: &[f64], tol: f64) -> Vec<Result<OptimizationRecord>> {
    sweep_ratio_with(ratios, tol, &OptimizeOptions::default())
}

pub fn sweep_ratio_with(ratios: &[f64], tol: f64, options: &OptimizeOptions) -> Vec<Result<OptimizationRecord>> {
    ratios
        .iter()
        .map(|&ratio| {
            if !(ratio >= 1.0) {
                return Err(Error::NonPositiveRate {
                    name: "kappa_p_ratio - 1",
                    value: ratio - 1.0,
                });
            }
            let params = ResonatorParams::<f64>::with_optimal_couplings(ratio, 1.0)?;
            optimize_ratio(&params, tol, options)
        })
        .collect()
}

/// Auto-bracketed optimization for an already configured system, starting
/// from the [`SWEEP_FWHM_BRACKET`] in units of `kappa_p`.
pub fn optimize_ratio<T: Real>(
    params: &ResonatorParams<T>,
    tol: f64,
    options: &OptimizeOptions,
) -> Result<OptimizationRecord> {
    let kappa_p = to_f64(params.kappa_p);
    let sigma_lo = sigma_from_fwhm(SWEEP_FWHM_BRACKET.0 * kappa_p);
    let sigma_hi = sigma_from_fwhm(SWEEP_FWHM_BRACKET.1 * kappa_p);
    let objective = schmidt_objective(*params, tol, *options);
    optimize_auto_bracket(params, sigma_lo, sigma_hi, tol, options.max_evals, objective)
}
