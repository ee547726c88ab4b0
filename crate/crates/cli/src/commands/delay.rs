use std::path::Path;

use ringpure::{delay_function, make_grid, trace, Channel};

use crate::config::RunConfig;
use crate::error::Result;
use crate::format::Table;

/// Pump couplings of the three delay curves, relative to `kappa_p / sqrt(12)`.
pub const COUPLING_FACTORS: [f64; 3] = [0.9, 1.0, 1.1];

/// Relative delay `T(omega) / T(omega0)` of the pump channel for each of
/// [`COUPLING_FACTORS`].
#[derive(Debug, Clone)]
pub struct DelayCurves {
    pub kappa_p: f64,
    pub detuning_over_kappa_p: Vec<f64>,
    pub relative: [Vec<f64>; 3],
    /// `T(omega0)` for each curve, in units of `1 / kappa_is`.
    pub center_delay: [f64; 3],
}

impl DelayCurves {
    /// `max |T / T(omega0) - 1|` over `|detuning| <= window * kappa_p`.
    pub fn max_deviation(&self, curve: usize, window: f64) -> f64 {
        self.detuning_over_kappa_p
            .iter()
            .zip(&self.relative[curve])
            .filter(|(d, _)| d.abs() <= window * (1.0 + 1e-12))
            .map(|(_, r)| (r - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn table(&self) -> Table {
        let mut table = Table::new(&[
            "detuning_over_kappa_p",
            "relative_delay_g0.9",
            "relative_delay_g1.0",
            "relative_delay_g1.1",
        ]);
        for (k, &d) in self.detuning_over_kappa_p.iter().enumerate() {
            table.push_numbers(&[d, self.relative[0][k], self.relative[1][k], self.relative[2][k]]);
        }
        table
    }
}

pub fn compute_delay(config: &RunConfig) -> Result<DelayCurves> {
    let base = config.params()?;
    let kappa_p = base.kappa_p;
    let grid = make_grid(0.0, config.delay_halfwidth_over_kappa_p * kappa_p, config.delay_points)?;
    let g_opt = ringpure::optimal_coupling(kappa_p)?;
    let mut relative: [Vec<f64>; 3] = Default::default();
    let mut center_delay = [0.0; 3];
    for (slot, &factor) in COUPLING_FACTORS.iter().enumerate() {
        let mut params = base;
        params.g_p = factor * g_opt;
        let delay = delay_function(&trace(&params, &grid, Channel::Pump)?);
        let t0 = delay[grid.center_index()];
        center_delay[slot] = t0;
        relative[slot] = delay.iter().map(|t| t / t0).collect();
    }
    Ok(DelayCurves {
        kappa_p,
        detuning_over_kappa_p: grid.offsets().iter().map(|d| d / kappa_p).collect(),
        relative,
        center_delay,
    })
}

/// Writes `delay.tsv` into `out`.
pub fn cmd_delay(config: &RunConfig, out: &Path) -> Result<DelayCurves> {
    let curves = compute_delay(config)?;
    curves.table().write(&out.join("delay.tsv"))?;
    Ok(curves)
}
