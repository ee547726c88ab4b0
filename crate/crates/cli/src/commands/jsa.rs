use std::fs;
use std::path::Path;

use ringpure::schmidt::{converged_schmidt_with_options, GridOptions};
use ringpure::{jsa_with_options, jsi, make_grid, schmidt_decompose, Error, PumpSpec};
use serde::Serialize;

use super::optimize::{optimize_options, OptimizationSummary};
use crate::config::RunConfig;
use crate::error::{io_error, CliError, Result};
use crate::format::{write_json, Table};
use crate::heatmap::render_svg;

/// Leading Schmidt coefficients kept in the sidecar.
const SIDECAR_COEFFICIENTS: usize = 10;

#[derive(Debug, Clone, Serialize)]
pub struct ParamsMeta {
    pub kappa_p_ratio: f64,
    pub kappa_p: f64,
    pub kappa_is: f64,
    pub g_p: f64,
    pub g_is: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PumpMeta {
    pub sigma: f64,
    pub fwhm: f64,
    pub fwhm_over_kappa_p: f64,
    /// `config` or `optimized`.
    pub source: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct GridMeta {
    pub n_i: usize,
    pub n_s: usize,
    pub idler_halfwidth: f64,
    pub signal_halfwidth: f64,
    pub step: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceMeta {
    pub converged: bool,
    pub tolerance: f64,
    /// `|K(n) - K(2n - 1)|` at the last refinement.
    pub achieved_error: f64,
    pub resolution: usize,
    /// `|K(n) - K(2n - 1)|` at the configured base resolution.
    pub base_error: f64,
    pub base_sufficient: bool,
    pub history: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct JsaMeta {
    pub schmidt_number: f64,
    pub purity: f64,
    pub base_schmidt_number: f64,
    pub coefficients: Vec<f64>,
    pub params: ParamsMeta,
    pub pump: PumpMeta,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optimization: Option<OptimizationSummary>,
    pub grid: GridMeta,
    pub convergence: ConvergenceMeta,
    pub warnings: Vec<String>,
}

/// Computes the JSA on the configured grid, writes `jsi.tsv`, `jsi.meta.json`
/// and optionally `jsi.svg` into `out`. Without a configured pump width the
/// width is optimized first.
pub fn cmd_jsa(config: &RunConfig, out: &Path, heatmap: bool) -> Result<JsaMeta> {
    let params = config.params()?;
    let (pump, optimization) = match config.pump()? {
        Some(pump) => (pump, None),
        None => {
            let record = super::optimize::optimize_one(config, config.kappa_p_ratio).map_err(CliError::Config)?;
            (PumpSpec::new(record.sigma_opt, 0.0)?, Some(record))
        }
    };
    let grid_options = GridOptions {
        halfwidth_factor: config.grid_halfwidth_factor,
        ..GridOptions::default()
    };
    let half_width = config.grid_halfwidth_factor * params.kappa_is;
    let grid = make_grid(0.0, half_width, config.grid_n)?;
    let amplitude = jsa_with_options(&params, &pump, &grid, &grid, &grid_options.jsa)?;
    let base = schmidt_decompose(&amplitude)?;

    let tolerance = config.tol_k * optimize_options(config).inner_tol_factor;
    let mut warnings = Vec::new();
    let (schmidt_number, coefficients, convergence) =
        match converged_schmidt_with_options(&params, &pump, config.grid_n, tolerance, &grid_options) {
            Ok((result, report)) => {
                if !report.base_sufficient(tolerance) {
                    warnings.push(format!(
                        "base resolution {} is insufficient: |K({}) - K({})| = {:e} exceeds {:e}",
                        config.grid_n,
                        config.grid_n,
                        2 * config.grid_n - 1,
                        report.base_error,
                        tolerance
                    ));
                }
                let meta = ConvergenceMeta {
                    converged: true,
                    tolerance,
                    achieved_error: report.achieved_error,
                    resolution: report.resolution,
                    base_error: report.base_error,
                    base_sufficient: report.base_sufficient(tolerance),
                    history: report.history,
                };
                (result.schmidt_number, result.coefficients, meta)
            }
            Err(Error::NoConvergence { schmidt_number, achieved_error, resolution }) => {
                warnings.push(format!(
                    "Schmidt number not converged to {tolerance:e}: error {achieved_error:e} at resolution {resolution}"
                ));
                let meta = ConvergenceMeta {
                    converged: false,
                    tolerance,
                    achieved_error,
                    resolution,
                    base_error: f64::NAN,
                    base_sufficient: false,
                    history: vec![(config.grid_n, base.schmidt_number)],
                };
                (schmidt_number, base.coefficients.clone(), meta)
            }
            Err(other) => return Err(other.into()),
        };

    let intensity = jsi(&amplitude);
    let mut table = Table::new(&["idler_detuning", "signal_detuning", "jsi"]);
    for ((a, b), &v) in intensity.indexed_iter() {
        table.push_numbers(&[grid.point(a), grid.point(b), v]);
    }
    table.write(&out.join("jsi.tsv"))?;

    if heatmap {
        let title = format!("JSI, kappa_p/kappa_is = {}, K = {:.6}", config.kappa_p_ratio, schmidt_number);
        let range = (-half_width, half_width);
        let svg = render_svg(&intensity, range, range, &title);
        let path = out.join("jsi.svg");
        fs::write(&path, svg).map_err(io_error(&path))?;
    }

    let meta = JsaMeta {
        schmidt_number,
        purity: 1.0 / schmidt_number,
        base_schmidt_number: base.schmidt_number,
        coefficients: coefficients.into_iter().take(SIDECAR_COEFFICIENTS).collect(),
        params: ParamsMeta {
            kappa_p_ratio: config.kappa_p_ratio,
            kappa_p: params.kappa_p,
            kappa_is: params.kappa_is,
            g_p: params.g_p,
            g_is: params.g_is,
        },
        pump: PumpMeta {
            sigma: pump.sigma(),
            fwhm: pump.fwhm(),
            fwhm_over_kappa_p: pump.fwhm() / params.kappa_p,
            source: if optimization.is_some() { "optimized" } else { "config" },
        },
        optimization,
        grid: GridMeta {
            n_i: grid.n_points(),
            n_s: grid.n_points(),
            idler_halfwidth: half_width,
            signal_halfwidth: half_width,
            step: grid.step(),
        },
        convergence,
        warnings,
    };
    write_json(&out.join("jsi.meta.json"), &meta)?;
    Ok(meta)
}
