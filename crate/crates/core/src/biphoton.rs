//! Pump spectrum, in-cavity pump self-convolution and the joint spectral
//! amplitude of the photon pair.
//!
//! The pump enters the joint amplitude only through
//! `h(Omega) = int f(Omega - w) f(w) dw` with `f = M_p * alpha`, a function
//! of the sum frequency `Omega = omega_i + omega_s`. It is computed once on
//! a 1-D lattice and then looked up for every (idler, signal) pair.

use ndarray::Array2;
use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::params::{Channel, FrequencyGrid, PumpSpec, ResonatorParams};
use crate::scalar::{lit, to_f64, Real};
use crate::transfer::ring_transfer;

/// Default extent of every grid in units of the relevant linewidth.
pub const DEFAULT_HALFWIDTH_FACTOR: f64 = 8.0;

/// Gaussian pump amplitude `(2 pi sigma)^(-1/4) exp(-(omega - omega0)^2 / (4 sigma))`.
pub fn pump_amplitude<T: Real>(pump: &PumpSpec<T>, omega: T) -> T {
    gaussian_amplitude(pump.sigma(), omega - pump.omega0())
}

#[inline]
fn gaussian_amplitude<T: Real>(sigma: T, offset: T) -> T {
    let norm = (lit::<T>(2.0) * T::PI() * sigma).powf(lit(-0.25));
    norm * (-(offset * offset) / (lit::<T>(4.0) * sigma)).exp()
}

fn check_centered<T: Real>(grid: &FrequencyGrid<T>, center: T, scale: T, what: &str) -> Result<()> {
    let shift = grid.center() - center;
    if shift.abs() > scale * lit(1e-9) {
        return Err(Error::BadGridSpec(format!(
            "{what} grid must be centered on its resonance (offset {})",
            to_f64(shift)
        )));
    }
    Ok(())
}

/// In-cavity pump amplitude `M_p(omega) alpha(omega)` sampled on `grid`,
/// which must be centered at `omega0_p`.
pub fn in_cavity_pump<T: Real>(
    params: &ResonatorParams<T>,
    pump: &PumpSpec<T>,
    grid: &FrequencyGrid<T>,
) -> Result<Vec<Complex<T>>> {
    check_centered(grid, params.omega0_p, params.kappa_p, "pump")?;
    let carrier_shift = grid.center() - pump.omega0();
    Ok(grid
        .offsets()
        .iter()
        .map(|&offset| {
            let m = ring_transfer(params.kappa_p, params.g_p, -offset);
            m * gaussian_amplitude(pump.sigma(), carrier_shift + offset)
        })
        .collect())
}

/// Self-convolution of the in-cavity pump on the sum-frequency lattice.
#[derive(Debug, Clone)]
pub struct PumpConvolution<T = f64> {
    /// Lattice of `Omega` values, centered at twice the pump grid center.
    pub sum_grid: FrequencyGrid<T>,
    pub values: Vec<Complex<T>>,
}

impl<T: Real> PumpConvolution<T> {
    /// `h` at a sum-frequency offset from `sum_grid.center()`, linearly
    /// interpolated between lattice samples and zero outside.
    pub fn at_offset(&self, offset: T) -> Complex<T> {
        let offsets = self.sum_grid.offsets();
        let first = offsets[0];
        let pos = (offset - first) / self.sum_grid.step();
        if pos < T::zero() || !pos.is_finite() {
            return Complex::new(T::zero(), T::zero());
        }
        let last = self.values.len() - 1;
        let base = pos.floor();
        let idx = base.to_usize().unwrap_or(usize::MAX);
        if idx > last {
            return Complex::new(T::zero(), T::zero());
        }
        let frac = pos - base;
        if idx == last {
            return if frac == T::zero() {
                self.values[last]
            } else {
                Complex::new(T::zero(), T::zero())
            };
        }
        self.values[idx] * (T::one() - frac) + self.values[idx + 1] * frac
    }

    /// `h(Omega)` at an absolute sum frequency.
    pub fn at(&self, omega_sum: T) -> Complex<T> {
        self.at_offset(omega_sum - self.sum_grid.center())
    }
}

/// Full self-convolution `h(Omega) = int f(Omega - w) f(w) dw` on a lattice of
/// doubled extent (`2n - 1` samples), by the trapezoidal rule over the
/// overlap of the two supports.
pub fn pump_convolution<T: Real>(grid: &FrequencyGrid<T>, in_cavity: &[Complex<T>]) -> Result<PumpConvolution<T>> {
    let m = grid.center_index() as i64;
    convolution_window(grid, in_cavity, -2 * m, 2 * m, 1)
}

/// Self-convolution at lattice indices `q = Q * stride` for `Q` in
/// `q_lo..=q_hi`, where index `q` stands for `Omega = 2 center + q * step`.
fn convolution_window<T: Real>(
    grid: &FrequencyGrid<T>,
    in_cavity: &[Complex<T>],
    q_lo: i64,
    q_hi: i64,
    stride: i64,
) -> Result<PumpConvolution<T>> {
    if in_cavity.len() != grid.n_points() {
        return Err(Error::BadGridSpec(format!(
            "{} samples for a {}-point grid",
            in_cavity.len(),
            grid.n_points()
        )));
    }
    let m = grid.center_index() as i64;
    let reach = (2 * m).div_euclid(stride) + 1;
    let q_lo = q_lo.max(-reach);
    let q_hi = q_hi.min(reach);
    let q_mid = (q_lo + q_hi).div_euclid(2);
    // symmetric lattice around q_mid
    let half = (q_mid - q_lo).max(q_hi - q_mid).max(1);
    let step = grid.step();
    let two = lit::<T>(2.0);
    let coarse = step * from_i64::<T>(stride);
    let sum_center = two * grid.center() + from_i64::<T>(q_mid) * coarse;
    let sum_grid = FrequencyGrid::from_step(sum_center, coarse, half as usize)?;
    let half_weight = step / two;
    let values: Vec<Complex<T>> = (q_mid - half..=q_mid + half)
        .into_par_iter()
        .map(|big_q| {
            let q = big_q * stride;
            if q < -2 * m || q > 2 * m {
                return Complex::new(T::zero(), T::zero());
            }
            let lo = (-m).max(q - m);
            let hi = m.min(q + m);
            if hi == lo {
                return Complex::new(T::zero(), T::zero());
            }
            let sample = |j: i64| {
                in_cavity[(j + m) as usize] * in_cavity[(q - j + m) as usize]
            };
            let mut acc = Complex::new(T::zero(), T::zero());
            for j in lo + 1..hi {
                acc = acc + sample(j);
            }
            acc * step + (sample(lo) + sample(hi)) * half_weight
        })
        .collect();
    Ok(PumpConvolution { sum_grid, values })
}

#[inline]
fn from_i64<T: Real>(q: i64) -> T {
    T::from_i64(q).expect("i64 is representable in every Real type")
}

/// Joint spectral amplitude `F(omega_i, omega_s)` sampled on an
/// idler x signal grid.
#[derive(Debug, Clone)]
pub struct JsaGrid<T = f64> {
    pub grid_i: FrequencyGrid<T>,
    pub grid_s: FrequencyGrid<T>,
    /// Indexed `[idler, signal]`.
    pub values: Array2<Complex<T>>,
}

impl<T: Real> JsaGrid<T> {
    pub fn new(
        grid_i: FrequencyGrid<T>,
        grid_s: FrequencyGrid<T>,
        values: Array2<Complex<T>>,
    ) -> Result<Self> {
        if values.dim() != (grid_i.n_points(), grid_s.n_points()) {
            return Err(Error::BadGridSpec(format!(
                "JSA shape {:?} does not match grids {}x{}",
                values.dim(),
                grid_i.n_points(),
                grid_s.n_points()
            )));
        }
        Ok(Self { grid_i, grid_s, values })
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.re == T::zero() && v.im == T::zero())
    }

    /// Exchanges the idler and signal axes.
    pub fn transposed(&self) -> Self {
        Self {
            grid_i: self.grid_s.clone(),
            grid_s: self.grid_i.clone(),
            values: self.values.t().to_owned(),
        }
    }

    pub fn conjugated(&self) -> Self {
        Self {
            values: self.values.mapv(|v| v.conj()),
            ..self.clone()
        }
    }
}

/// Grid-construction options for [`jsa_with_options`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JsaOptions {
    /// Pump grid half-width in units of `max(kappa_p, pump FWHM)`.
    pub pump_halfwidth_factor: f64,
    /// Minimum pump samples per `kappa_p`. The in-cavity pump has poles a
    /// quarter linewidth off the real axis, which sets the trapezoid error.
    pub pump_points_per_linewidth: f64,
    /// Minimum pump samples per `sqrt(sigma)`, for narrow pumps.
    pub pump_points_per_sqrt_variance: f64,
}

impl Default for JsaOptions {
    fn default() -> Self {
        Self {
            pump_halfwidth_factor: DEFAULT_HALFWIDTH_FACTOR,
            pump_points_per_linewidth: 24.0,
            pump_points_per_sqrt_variance: 2.0,
        }
    }
}

/// Joint spectral amplitude `F = h(omega_i + omega_s) M_i(omega_i) M_s(omega_s)`.
///
/// `grid_i` and `grid_s` must be centered at `omega0_i` and `omega0_s`, and the
/// pump carrier must sit midway between them.
pub fn jsa<T: Real>(
    params: &ResonatorParams<T>,
    pump: &PumpSpec<T>,
    grid_i: &FrequencyGrid<T>,
    grid_s: &FrequencyGrid<T>,
) -> Result<JsaGrid<T>> {
    jsa_with_options(params, pump, grid_i, grid_s, &JsaOptions::default())
}

pub fn jsa_with_options<T: Real>(
    params: &ResonatorParams<T>,
    pump: &PumpSpec<T>,
    grid_i: &FrequencyGrid<T>,
    grid_s: &FrequencyGrid<T>,
    options: &JsaOptions,
) -> Result<JsaGrid<T>> {
    check_carrier(params)?;
    // the pump step divides the signal/idler step so that omega_i + omega_s
    // lands on the convolution lattice
    let coarse = grid_i.step().min(grid_s.step());
    let target = (params.kappa_p / lit(options.pump_points_per_linewidth))
        .min(pump.sigma().sqrt() * lit::<T>(options.pump_points_per_sqrt_variance).recip());
    let stride = (coarse / target).ceil().to_i64().unwrap_or(1).max(1);
    let step = coarse / from_i64::<T>(stride);
    let extent = lit::<T>(options.pump_halfwidth_factor) * params.kappa_p.max(pump.fwhm());
    let half_count = (extent / step).ceil().to_usize().unwrap_or(1).max(1);
    let pump_grid = FrequencyGrid::from_step(params.omega0_p, step, half_count)?;
    let in_cavity = in_cavity_pump(params, pump, &pump_grid)?;

    let lo = grid_i.offsets()[0] + grid_s.offsets()[0];
    let hi = grid_i.offsets()[grid_i.n_points() - 1] + grid_s.offsets()[grid_s.n_points() - 1];
    let q_lo = (lo / coarse).floor().to_i64().unwrap_or(0) - 1;
    let q_hi = (hi / coarse).ceil().to_i64().unwrap_or(0) + 1;
    let conv = convolution_window(&pump_grid, &in_cavity, q_lo, q_hi, stride)?;
    let sum_shift = conv.sum_grid.center() - lit::<T>(2.0) * params.omega0_p;
    jsa_from_sum_amplitude(params, grid_i, grid_s, |offset| conv.at_offset(offset - sum_shift))
}

/// Joint amplitude for an arbitrary pump factor `h`, given as a function of
/// the sum-frequency offset `(omega_i - omega0_i) + (omega_s - omega0_s)`.
pub fn jsa_from_sum_amplitude<T, H>(
    params: &ResonatorParams<T>,
    grid_i: &FrequencyGrid<T>,
    grid_s: &FrequencyGrid<T>,
    h: H,
) -> Result<JsaGrid<T>>
where
    T: Real,
    H: Fn(T) -> Complex<T> + Sync,
{
    check_centered(grid_i, params.omega0_i, params.kappa_is, "idler")?;
    check_centered(grid_s, params.omega0_s, params.kappa_is, "signal")?;
    let (kappa, g) = params.rates(Channel::Idler);
    let m_i: Vec<Complex<T>> = grid_i.offsets().iter().map(|&d| ring_transfer(kappa, g, -d)).collect();
    let m_s: Vec<Complex<T>> = grid_s.offsets().iter().map(|&d| ring_transfer(kappa, g, -d)).collect();
    let off_s = grid_s.offsets();
    let rows: Vec<Vec<Complex<T>>> = grid_i
        .offsets()
        .par_iter()
        .zip(m_i.par_iter())
        .map(|(&d_i, &mi)| {
            off_s
                .iter()
                .zip(&m_s)
                .map(|(&d_s, &ms)| h(d_i + d_s) * mi * ms)
                .collect()
        })
        .collect();
    let flat: Vec<Complex<T>> = rows.into_iter().flatten().collect();
    let values = Array2::from_shape_vec((grid_i.n_points(), grid_s.n_points()), flat)
        .expect("row lengths match the signal grid");
    JsaGrid::new(grid_i.clone(), grid_s.clone(), values)
}

fn check_carrier<T: Real>(params: &ResonatorParams<T>) -> Result<()> {
    let offset = lit::<T>(2.0) * params.omega0_p - params.omega0_i - params.omega0_s;
    if offset.abs() > params.kappa_is * lit(1e-9) {
        return Err(Error::CarrierMismatch { offset: to_f64(offset) });
    }
    Ok(())
}

/// Joint spectral intensity `|F|^2`, normalized to unit peak.
pub fn jsi<T: Real>(jsa: &JsaGrid<T>) -> Array2<T> {
    let intensity = jsa.values.mapv(|v| v.norm_sqr());
    let peak = intensity.iter().copied().fold(T::zero(), T::max);
    if peak > T::zero() {
        intensity.mapv(|p| p / peak)
    } else {
        intensity
    }
}

/// Pearson correlation of idler and signal detunings under the JSI taken as
/// a 2-D distribution. Zero for a factorable JSI; tends to `-1` for strong
/// energy anticorrelation.
pub fn jsi_correlation<T: Real>(jsa: &JsaGrid<T>) -> T {
    let p = jsa.values.mapv(|v| v.norm_sqr());
    let (wi, ws) = (jsa.grid_i.weights(), jsa.grid_s.weights());
    let (xi, xs) = (jsa.grid_i.offsets(), jsa.grid_s.offsets());
    let mut moments = [T::zero(); 6];
    for ((j, k), &pjk) in p.indexed_iter() {
        let w = pjk * wi[j] * ws[k];
        moments[0] = moments[0] + w;
        moments[1] = moments[1] + w * xi[j];
        moments[2] = moments[2] + w * xs[k];
        moments[3] = moments[3] + w * xi[j] * xi[j];
        moments[4] = moments[4] + w * xs[k] * xs[k];
        moments[5] = moments[5] + w * xi[j] * xs[k];
    }
    let [z, mi, ms, mii, mss, mis] = moments;
    let (mi, ms) = (mi / z, ms / z);
    let var_i = mii / z - mi * mi;
    let var_s = mss / z - ms * ms;
    (mis / z - mi * ms) / (var_i * var_s).sqrt()
}
