//! Parameter model of the three-channel coupled-ring system and the uniform
//! frequency grids on which every spectral quantity is sampled.
//!
//! Frequencies are dimensionless throughout; the conventional scale is
//! `kappa_is = 1`.

use crate::error::{Error, Result};
use crate::scalar::{from_usize, lit, to_f64, Real};

/// One of the three resonant channels of the central ring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Channel {
    Pump,
    Idler,
    Signal,
}

impl Channel {
    pub fn name(self) -> &'static str {
        match self {
            Channel::Pump => "pump",
            Channel::Idler => "idler",
            Channel::Signal => "signal",
        }
    }
}

/// Coupling rates and mode centers of the coupled-ring source.
///
/// `kappa_*` are bus-to-ring decay rates, `g_*` are ring-to-ring exchange
/// rates. Signal and idler share one pair of rates. Each channel has a single
/// center frequency, common to every ring it passes through.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonatorParams<T = f64> {
    pub kappa_p: T,
    pub kappa_is: T,
    pub g_p: T,
    pub g_is: T,
    pub omega0_p: T,
    pub omega0_i: T,
    pub omega0_s: T,
}

impl<T: Real> ResonatorParams<T> {
    /// System with the given bus couplings, optimal inter-ring couplings and
    /// every mode center at zero detuning.
    pub fn with_optimal_couplings(kappa_p: T, kappa_is: T) -> Result<Self> {
        let g_p = crate::transfer::optimal_coupling(kappa_p)?;
        let g_is = crate::transfer::optimal_coupling(kappa_is)?;
        validate_params(Self {
            kappa_p,
            kappa_is,
            g_p,
            g_is,
            omega0_p: T::zero(),
            omega0_i: T::zero(),
            omega0_s: T::zero(),
        })
    }

    /// `(kappa, g)` governing the given channel.
    pub fn rates(&self, channel: Channel) -> (T, T) {
        match channel {
            Channel::Pump => (self.kappa_p, self.g_p),
            Channel::Idler | Channel::Signal => (self.kappa_is, self.g_is),
        }
    }

    pub fn center(&self, channel: Channel) -> T {
        match channel {
            Channel::Pump => self.omega0_p,
            Channel::Idler => self.omega0_i,
            Channel::Signal => self.omega0_s,
        }
    }

    /// Multiplies every rate and center frequency by `a`.
    pub fn scaled(&self, a: T) -> Self {
        Self {
            kappa_p: self.kappa_p * a,
            kappa_is: self.kappa_is * a,
            g_p: self.g_p * a,
            g_is: self.g_is * a,
            omega0_p: self.omega0_p * a,
            omega0_i: self.omega0_i * a,
            omega0_s: self.omega0_s * a,
        }
    }
}

/// Returns `raw` unchanged if every coupling rate is strictly positive.
pub fn validate_params<T: Real>(raw: ResonatorParams<T>) -> Result<ResonatorParams<T>> {
    let rates = [
        ("kappa_p", raw.kappa_p),
        ("kappa_is", raw.kappa_is),
        ("g_p", raw.g_p),
        ("g_is", raw.g_is),
    ];
    for (name, value) in rates {
        // NaN fails this comparison as well
        if !(value > T::zero()) {
            return Err(Error::NonPositiveRate {
                name,
                value: to_f64(value),
            });
        }
    }
    let centers = [raw.omega0_p, raw.omega0_i, raw.omega0_s];
    if centers.iter().any(|c| !c.is_finite()) {
        return Err(Error::BadGridSpec("mode centers must be finite".into()));
    }
    Ok(raw)
}

/// Uniform sampling of `[center - half_width, center + half_width]` with
/// trapezoidal quadrature weights.
///
/// Samples are stored as offsets from `center`; the middle sample has offset
/// exactly zero and the offsets are exactly antisymmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyGrid<T = f64> {
    center: T,
    half_width: T,
    step: T,
    offsets: Vec<T>,
    weights: Vec<T>,
}

/// Builds a uniform grid of `n_points` samples (odd, at least 3).
pub fn make_grid<T: Real>(center: T, half_width: T, n_points: usize) -> Result<FrequencyGrid<T>> {
    if n_points < 3 || n_points % 2 == 0 {
        return Err(Error::BadGridSpec(format!(
            "n_points must be odd and >= 3, got {n_points}"
        )));
    }
    if !(half_width > T::zero()) || !half_width.is_finite() {
        return Err(Error::BadGridSpec(format!(
            "half_width must be positive, got {}",
            to_f64(half_width)
        )));
    }
    let half_count = (n_points - 1) / 2;
    let step = half_width / from_usize(half_count);
    Ok(FrequencyGrid::build(center, half_width, step, half_count))
}

impl<T: Real> FrequencyGrid<T> {
    /// Grid with a prescribed `step` and `2 * half_count + 1` samples.
    pub fn from_step(center: T, step: T, half_count: usize) -> Result<Self> {
        if half_count == 0 {
            return Err(Error::BadGridSpec("half_count must be at least 1".into()));
        }
        if !(step > T::zero()) || !step.is_finite() {
            return Err(Error::BadGridSpec(format!(
                "step must be positive, got {}",
                to_f64(step)
            )));
        }
        let half_width = step * from_usize(half_count);
        Ok(Self::build(center, half_width, step, half_count))
    }

    fn build(center: T, half_width: T, step: T, half_count: usize) -> Self {
        let n = 2 * half_count + 1;
        let offsets: Vec<T> = (0..n)
            .map(|k| {
                if k >= half_count {
                    from_usize::<T>(k - half_count) * step
                } else {
                    -(from_usize::<T>(half_count - k) * step)
                }
            })
            .collect();
        let mut weights = vec![step; n];
        weights[0] = step * lit(0.5);
        weights[n - 1] = step * lit(0.5);
        Self {
            center,
            half_width,
            step,
            offsets,
            weights,
        }
    }

    pub fn center(&self) -> T {
        self.center
    }

    pub fn half_width(&self) -> T {
        self.half_width
    }

    pub fn step(&self) -> T {
        self.step
    }

    pub fn n_points(&self) -> usize {
        self.offsets.len()
    }

    /// Index of the center sample.
    pub fn center_index(&self) -> usize {
        self.offsets.len() / 2
    }

    /// Sample positions relative to `center`.
    pub fn offsets(&self) -> &[T] {
        &self.offsets
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn point(&self, k: usize) -> T {
        if k == self.center_index() {
            self.center
        } else {
            self.center + self.offsets[k]
        }
    }

    /// Absolute sample positions.
    pub fn points(&self) -> Vec<T> {
        (0..self.n_points()).map(|k| self.point(k)).collect()
    }

    /// Same sampling pattern with every coordinate multiplied by `a`.
    pub fn scaled(&self, a: T) -> Self {
        Self::build(
            self.center * a,
            self.half_width * a,
            self.step * a,
            self.center_index(),
        )
    }

    /// Same offsets around a different center.
    pub fn recentered(&self, center: T) -> Self {
        Self { center, ..self.clone() }
    }

    /// Multiplies every quadrature weight by `c`.
    pub fn with_weights_scaled(&self, c: T) -> Self {
        Self {
            weights: self.weights.iter().map(|&w| w * c).collect(),
            ..self.clone()
        }
    }

    /// True when both grids have the same offsets from their centers.
    pub fn is_congruent(&self, other: &Self) -> bool {
        self.offsets == other.offsets
    }
}

/// Gaussian pump spectral amplitude
/// `alpha(omega) = (2 pi sigma)^(-1/4) exp(-(omega - omega0)^2 / (4 sigma))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpSpec<T = f64> {
    sigma: T,
    omega0: T,
}

impl<T: Real> PumpSpec<T> {
    pub fn new(sigma: T, omega0: T) -> Result<Self> {
        if !(sigma > T::zero()) || !sigma.is_finite() {
            return Err(Error::NonPositiveVariance(to_f64(sigma)));
        }
        Ok(Self { sigma, omega0 })
    }

    /// Pump with the given intensity full width at half maximum.
    pub fn from_fwhm(fwhm: T, omega0: T) -> Result<Self> {
        Self::new(sigma_from_fwhm(fwhm), omega0)
    }

    pub fn sigma(&self) -> T {
        self.sigma
    }

    pub fn omega0(&self) -> T {
        self.omega0
    }

    /// Intensity FWHM, `sqrt(8 sigma ln 2)`.
    pub fn fwhm(&self) -> T {
        fwhm_from_sigma(self.sigma)
    }
}

pub fn fwhm_from_sigma<T: Real>(sigma: T) -> T {
    (lit::<T>(8.0) * sigma * T::LN_2()).sqrt()
}

pub fn sigma_from_fwhm<T: Real>(fwhm: T) -> T {
    fwhm * fwhm / (lit::<T>(8.0) * T::LN_2())
}
