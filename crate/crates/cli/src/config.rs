//! Run configuration, read from a TOML document.
//!
//! Every rate is stored in units of the signal/idler linewidth, so
//! `kappa_is = 1` after loading. An optional `[physical]` table accepts rates
//! in arbitrary (consistent) units and is normalized on load; it is never
//! written back.

use ringpure::{optimal_coupling, PumpSpec, ResonatorParams};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

const TOP_LEVEL_KEYS: &[&str] = &[
    "kappa_p_ratio",
    "g_p_over_opt",
    "g_is_over_opt",
    "pump_fwhm_over_kappa_p",
    "grid_n",
    "grid_halfwidth_factor",
    "tol_k",
    "ratios",
    "delay_points",
    "delay_halfwidth_over_kappa_p",
    "physical",
];
const PHYSICAL_KEYS: &[&str] = &["kappa_p", "kappa_is", "pump_fwhm"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// `kappa_p / kappa_is`.
    pub kappa_p_ratio: f64,
    /// Pump-channel inter-ring coupling relative to `kappa_p / sqrt(12)`.
    pub g_p_over_opt: f64,
    /// Signal/idler inter-ring coupling relative to `kappa_is / sqrt(12)`.
    pub g_is_over_opt: f64,
    /// Pump FWHM in units of `kappa_p`; optimized when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pump_fwhm_over_kappa_p: Option<f64>,
    /// Signal/idler grid points per axis (odd).
    pub grid_n: usize,
    /// Signal/idler grid half-width in units of `kappa_is`.
    pub grid_halfwidth_factor: f64,
    /// Tolerance on the Schmidt number.
    pub tol_k: f64,
    /// Ratios for the `optimize` sweep.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratios: Option<Vec<f64>>,
    /// Rows of the delay table (odd).
    pub delay_points: usize,
    /// Delay table half-width in units of `kappa_p`.
    pub delay_halfwidth_over_kappa_p: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            kappa_p_ratio: 1.0,
            g_p_over_opt: 1.0,
            g_is_over_opt: 1.0,
            pump_fwhm_over_kappa_p: None,
            grid_n: 513,
            grid_halfwidth_factor: 8.0,
            tol_k: 1e-4,
            ratios: None,
            delay_points: 401,
            delay_halfwidth_over_kappa_p: 1.0,
        }
    }
}

#[derive(Debug, Deserialize)]
struct PhysicalRates {
    kappa_p: f64,
    kappa_is: f64,
    pump_fwhm: Option<f64>,
}

#[derive(Debug, Deserialize)]
struct RawConfig {
    kappa_p_ratio: Option<f64>,
    g_p_over_opt: Option<f64>,
    g_is_over_opt: Option<f64>,
    pump_fwhm_over_kappa_p: Option<f64>,
    grid_n: Option<usize>,
    grid_halfwidth_factor: Option<f64>,
    tol_k: Option<f64>,
    ratios: Option<Vec<f64>>,
    delay_points: Option<usize>,
    delay_halfwidth_over_kappa_p: Option<f64>,
    physical: Option<PhysicalRates>,
}

/// Parses and validates a configuration document, applying defaults.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| CliError::Parse(e.message().to_string()))?;
    for (key, value) in &table {
        if !TOP_LEVEL_KEYS.contains(&key.as_str()) {
            return Err(CliError::UnknownKey(key.clone()));
        }
        if key == "physical" {
            let inner = value
                .as_table()
                .ok_or_else(|| CliError::Parse("`physical` must be a table".into()))?;
            if let Some(k) = inner.keys().find(|k| !PHYSICAL_KEYS.contains(&k.as_str())) {
                return Err(CliError::UnknownKey(format!("physical.{k}")));
            }
        }
    }
    let raw: RawConfig = toml::Value::Table(table)
        .try_into()
        .map_err(|e: toml::de::Error| CliError::Parse(e.message().to_string()))?;

    let defaults = RunConfig::default();
    let (ratio, fwhm) = match raw.physical {
        Some(phys) => {
            if raw.kappa_p_ratio.is_some() || (raw.pump_fwhm_over_kappa_p.is_some() && phys.pump_fwhm.is_some()) {
                return Err(CliError::Config(
                    "`physical` rates conflict with the dimensionless keys they replace".into(),
                ));
            }
            positive("physical.kappa_p", phys.kappa_p)?;
            positive("physical.kappa_is", phys.kappa_is)?;
            let fwhm = match phys.pump_fwhm {
                Some(w) => Some(positive("physical.pump_fwhm", w)? / phys.kappa_p),
                None => raw.pump_fwhm_over_kappa_p,
            };
            (phys.kappa_p / phys.kappa_is, fwhm)
        }
        None => (raw.kappa_p_ratio.unwrap_or(defaults.kappa_p_ratio), raw.pump_fwhm_over_kappa_p),
    };
    let config = RunConfig {
        kappa_p_ratio: ratio,
        g_p_over_opt: raw.g_p_over_opt.unwrap_or(defaults.g_p_over_opt),
        g_is_over_opt: raw.g_is_over_opt.unwrap_or(defaults.g_is_over_opt),
        pump_fwhm_over_kappa_p: fwhm,
        grid_n: raw.grid_n.unwrap_or(defaults.grid_n),
        grid_halfwidth_factor: raw.grid_halfwidth_factor.unwrap_or(defaults.grid_halfwidth_factor),
        tol_k: raw.tol_k.unwrap_or(defaults.tol_k),
        ratios: raw.ratios,
        delay_points: raw.delay_points.unwrap_or(defaults.delay_points),
        delay_halfwidth_over_kappa_p: raw
            .delay_halfwidth_over_kappa_p
            .unwrap_or(defaults.delay_halfwidth_over_kappa_p),
    };
    config.validate()?;
    Ok(config)
}

/// TOML text that [`parse_config`] maps back to `config`.
pub fn serialize_config(config: &RunConfig) -> Result<String> {
    toml::to_string(config).map_err(|e| CliError::Config(e.to_string()))
}

fn positive(name: &'static str, value: f64) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(CliError::NonPositiveRate { name, value })
    }
}

fn odd_at_least_3(name: &str, n: usize) -> Result<()> {
    if n < 3 || n % 2 == 0 {
        return Err(CliError::Config(format!("{name} must be odd and at least 3, got {n}")));
    }
    Ok(())
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        positive("kappa_p_ratio", self.kappa_p_ratio)?;
        positive("g_p_over_opt", self.g_p_over_opt)?;
        positive("g_is_over_opt", self.g_is_over_opt)?;
        if let Some(w) = self.pump_fwhm_over_kappa_p {
            positive("pump_fwhm_over_kappa_p", w)?;
        }
        if let Some(ratios) = &self.ratios {
            for &r in ratios {
                positive("ratios", r)?;
            }
        }
        if !(self.grid_halfwidth_factor > 0.0 && self.grid_halfwidth_factor.is_finite()) {
            return Err(CliError::Config(format!(
                "grid_halfwidth_factor must be positive, got {}",
                self.grid_halfwidth_factor
            )));
        }
        if !(self.tol_k > 0.0 && self.tol_k.is_finite()) {
            return Err(CliError::Config(format!("tol_k must be positive, got {}", self.tol_k)));
        }
        if !(self.delay_halfwidth_over_kappa_p > 0.0 && self.delay_halfwidth_over_kappa_p.is_finite()) {
            return Err(CliError::Config(format!(
                "delay_halfwidth_over_kappa_p must be positive, got {}",
                self.delay_halfwidth_over_kappa_p
            )));
        }
        odd_at_least_3("grid_n", self.grid_n)?;
        odd_at_least_3("delay_points", self.delay_points)?;
        Ok(())
    }

    /// Dimensionless resonator parameters for `kappa_p / kappa_is = ratio`.
    pub fn params_for_ratio(&self, ratio: f64) -> Result<ResonatorParams> {
        positive("kappa_p_ratio", ratio)?;
        let mut params = ResonatorParams::<f64>::with_optimal_couplings(ratio, 1.0)?;
        params.g_p = self.g_p_over_opt * optimal_coupling(ratio)?;
        params.g_is = self.g_is_over_opt * optimal_coupling(1.0)?;
        Ok(params)
    }

    pub fn params(&self) -> Result<ResonatorParams> {
        self.params_for_ratio(self.kappa_p_ratio)
    }

    /// Fixed pump, if the width is configured.
    pub fn pump(&self) -> Result<Option<PumpSpec>> {
        self.pump_fwhm_over_kappa_p
            .map(|w| PumpSpec::from_fwhm(w * self.kappa_p_ratio, 0.0).map_err(CliError::from))
            .transpose()
    }

    /// Ratio list for the `optimize` command, falling back to the single
    /// configured ratio.
    pub fn sweep_ratios(&self) -> Result<Vec<f64>> {
        let ratios = self.ratios.clone().unwrap_or_else(|| vec![self.kappa_p_ratio]);
        if ratios.is_empty() {
            return Err(CliError::Config("the ratio list is empty".into()));
        }
        Ok(ratios)
    }
}

/// Parses a comma-separated ratio list such as `1,6.6,10`. An empty string
/// gives an empty list.
pub fn parse_ratio_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| CliError::Config(format!("`{s}` is not a number")))
                .and_then(|r| positive("ratios", r))
        })
        .collect()
}
