//! Steady-state transfer functions of the coupled-ring system and their
//! phase and group-delay analysis.
//!
//! For bus coupling `kappa`, inter-ring coupling `g` and detuning
//! `delta = omega0 - omega` the cavity response of a channel is
//!
//! ```text
//! M(omega) = 2 g sqrt(kappa) / (-2 delta^2 + 2 g^2 + i delta kappa)
//! ```
//!
//! The phase of `M` is exactly odd in the detuning, so all even derivatives
//! vanish at resonance. The cubic term vanishes at `g = kappa / sqrt(12)`,
//! which makes the phase linear to fifth order.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::params::{Channel, FrequencyGrid, ResonatorParams};
use crate::scalar::{lit, to_f64, Real};

/// Relative step of the finite-difference stencil, in units of the channel
/// linewidth.
pub const DERIVATIVE_STEP: f64 = 1e-3;

/// Response of a single channel at detuning `delta = omega0 - omega`.
#[inline]
pub fn ring_transfer<T: Real>(kappa: T, g: T, delta: T) -> Complex<T> {
    let two = lit::<T>(2.0);
    let numerator = two * g * kappa.sqrt();
    let denominator = Complex::new(two * (g * g - delta * delta), delta * kappa);
    Complex::new(numerator, T::zero()) / denominator
}

/// Pump-channel response `M_p(omega)`.
pub fn pump_transfer<T: Real>(params: &ResonatorParams<T>, omega: T) -> Complex<T> {
    ring_transfer(params.kappa_p, params.g_p, params.omega0_p - omega)
}

/// Signal or idler response `M_m(omega)`. Passing [`Channel::Pump`] yields
/// the pump response.
pub fn mode_transfer<T: Real>(
    params: &ResonatorParams<T>,
    omega: T,
    channel: Channel,
) -> Complex<T> {
    let (kappa, g) = params.rates(channel);
    ring_transfer(kappa, g, params.center(channel) - omega)
}

/// Largest value of `|M|` over all detunings.
///
/// For `g^2 <= kappa^2 / 8` the maximum sits on resonance (`sqrt(kappa)/g`);
/// above that the response splits into two peaks.
pub fn peak_magnitude<T: Real>(kappa: T, g: T) -> T {
    let eighth = kappa * kappa / lit(8.0);
    if g * g <= eighth {
        kappa.sqrt() / g
    } else {
        lit::<T>(2.0) * g * kappa.sqrt()
            / (g * g * kappa * kappa - kappa.powi(4) / lit(16.0)).sqrt()
    }
}

/// Optimal inter-ring coupling `kappa / sqrt(12)`, at which the third phase
/// derivative vanishes on resonance.
pub fn optimal_coupling<T: Real>(kappa: T) -> Result<T> {
    if !(kappa > T::zero()) {
        return Err(Error::NonPositiveRate {
            name: "kappa",
            value: to_f64(kappa),
        });
    }
    Ok(kappa / lit::<T>(12.0).sqrt())
}

/// Sampled transfer function with its unwrapped phase.
#[derive(Debug, Clone)]
pub struct TransferTrace<T = f64> {
    pub grid: FrequencyGrid<T>,
    pub values: Vec<Complex<T>>,
    /// Unwrapped argument of `values`, zero at the center sample.
    pub phase: Vec<T>,
    pub channel: Channel,
    pub kappa: T,
    pub coupling: T,
}

/// Samples the response of `channel` on `grid`, which must be centered on
/// the channel's resonance.
pub fn trace<T: Real>(
    params: &ResonatorParams<T>,
    grid: &FrequencyGrid<T>,
    channel: Channel,
) -> Result<TransferTrace<T>> {
    let (kappa, g) = params.rates(channel);
    let shift = params.center(channel) - grid.center();
    if shift.abs() > kappa * lit(1e-9) {
        return Err(Error::BadGridSpec(format!(
            "{} trace grid must be centered on its resonance (offset {})",
            channel.name(),
            to_f64(shift)
        )));
    }
    let values: Vec<Complex<T>> = grid
        .offsets()
        .iter()
        .map(|&offset| ring_transfer(kappa, g, shift - offset))
        .collect();
    let phase = unwrap_from_center(&values, grid.center_index());
    Ok(TransferTrace {
        grid: grid.clone(),
        values,
        phase,
        channel,
        kappa,
        coupling: g,
    })
}

fn unwrap_from_center<T: Real>(values: &[Complex<T>], mid: usize) -> Vec<T> {
    let pi = T::PI();
    let tau = pi + pi;
    let wrap = |mut d: T| {
        while d > pi {
            d = d - tau;
        }
        while d <= -pi {
            d = d + tau;
        }
        d
    };
    let raw: Vec<T> = values.iter().map(|v| v.arg()).collect();
    let mut phase = vec![T::zero(); values.len()];
    for k in mid + 1..values.len() {
        phase[k] = phase[k - 1] + wrap(raw[k] - raw[k - 1]);
    }
    for k in (0..mid).rev() {
        phase[k] = phase[k + 1] + wrap(raw[k] - raw[k + 1]);
    }
    // anchored at the center sample, where the response is real and positive
    phase
}

/// Delay function `T(omega) = phase(omega) / (omega - omega0)`.
///
/// The center sample takes the analytic limit `kappa / (2 g^2)`.
pub fn delay_function<T: Real>(trace: &TransferTrace<T>) -> Vec<T> {
    let mid = trace.grid.center_index();
    let center_value = trace.kappa / (lit::<T>(2.0) * trace.coupling * trace.coupling);
    trace
        .grid
        .offsets()
        .iter()
        .zip(&trace.phase)
        .enumerate()
        .map(|(k, (&offset, &phase))| {
            if k == mid {
                center_value
            } else {
                phase / offset
            }
        })
        .collect()
}

/// `order`-th derivative with respect to `omega` of the transfer phase at
/// resonance, by central finite differences with step
/// `DERIVATIVE_STEP * kappa`.
///
/// The stencils are fourth-order accurate (5 points for order 2, 7 for
/// orders 3 and 4, 9 for order 5).
pub fn phase_derivative_at_center<T: Real>(
    params: &ResonatorParams<T>,
    channel: Channel,
    order: usize,
) -> Result<T> {
    let (kappa, g) = params.rates(channel);
    phase_derivative_with_step(kappa, g, order, kappa * lit(DERIVATIVE_STEP))
}

/// Same as [`phase_derivative_at_center`] with an explicit step.
pub fn phase_derivative_with_step<T: Real>(kappa: T, g: T, order: usize, step: T) -> Result<T> {
    if !(2..=5).contains(&order) {
        return Err(Error::UnsupportedOrder(order));
    }
    let half = (order + 1) / 2 + 1;
    let nodes: Vec<f64> = (-(half as i64)..=half as i64).map(|j| j as f64).collect();
    let weights = finite_difference_weights(0.0, &nodes, order);
    let mut acc = T::zero();
    for (&node, &w) in nodes.iter().zip(&weights) {
        if w == 0.0 {
            continue;
        }
        // omega - omega0 = node * step, so delta = -node * step
        let phase = ring_transfer(kappa, g, -(lit::<T>(node) * step)).arg();
        acc = acc + lit::<T>(w) * phase;
    }
    Ok(acc / step.powi(order as i32))
}

/// Fornberg's recursion for finite-difference weights of the `order`-th
/// derivative at `x0` on arbitrary `nodes`.
pub fn finite_difference_weights(x0: f64, nodes: &[f64], order: usize) -> Vec<f64> {
    let n = nodes.len();
    let mut c = vec![vec![0.0; order + 1]; n];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - x0;
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[order]).collect()
}
