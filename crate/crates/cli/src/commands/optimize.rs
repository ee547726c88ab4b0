use std::path::Path;

use ringpure::optimize::optimize_ratio;
use ringpure::schmidt::GridOptions;
use ringpure::{OptimizationRecord, OptimizeOptions};
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::Result;
use crate::format::{fmt_num, Table};

/// Serializable copy of [`OptimizationRecord`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizationSummary {
    pub ratio: f64,
    pub sigma_opt: f64,
    pub fwhm_over_kappa_p: f64,
    pub k_min: f64,
    pub purity: f64,
    pub n_evals: usize,
    pub converged: bool,
    pub bracketed: bool,
}

impl From<OptimizationRecord> for OptimizationSummary {
    fn from(r: OptimizationRecord) -> Self {
        Self {
            ratio: r.ratio,
            sigma_opt: r.sigma_opt,
            fwhm_over_kappa_p: r.fwhm_over_kappa_p,
            k_min: r.k_min,
            purity: r.purity,
            n_evals: r.n_evals,
            converged: r.converged,
            bracketed: r.bracketed,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub ratio: f64,
    pub result: std::result::Result<OptimizationSummary, String>,
}

impl SweepRow {
    pub fn status(&self) -> String {
        match &self.result {
            Ok(r) if !r.bracketed => "unbracketed".into(),
            Ok(r) if !r.converged => "max-evals".into(),
            Ok(_) => "ok".into(),
            Err(e) => format!("error: {}", e.replace(['\t', '\n'], " ")),
        }
    }
}

pub fn optimize_options(config: &RunConfig) -> OptimizeOptions {
    let defaults = OptimizeOptions::default();
    OptimizeOptions {
        base_n: config.grid_n,
        grid: GridOptions {
            halfwidth_factor: config.grid_halfwidth_factor,
            ..defaults.grid
        },
        ..defaults
    }
}

/// Optimizes the pump width for one ratio with the configured couplings.
pub fn optimize_one(config: &RunConfig, ratio: f64) -> std::result::Result<OptimizationSummary, String> {
    let params = config.params_for_ratio(ratio).map_err(|e| e.to_string())?;
    optimize_ratio(&params, config.tol_k, &optimize_options(config))
        .map(OptimizationSummary::from)
        .map_err(|e| e.to_string())
}

pub fn run_sweep(config: &RunConfig, ratios: &[f64]) -> Vec<SweepRow> {
    ratios
        .iter()
        .map(|&ratio| SweepRow {
            ratio,
            result: optimize_one(config, ratio),
        })
        .collect()
}

pub fn sweep_table(rows: &[SweepRow]) -> Table {
    let mut table = Table::new(&["ratio", "fwhm_over_kappa_p", "schmidt_number", "purity", "evals", "converged", "status"]);
    for row in rows {
        let cells = match &row.result {
            Ok(r) => vec![
                fmt_num(row.ratio),
                fmt_num(r.fwhm_over_kappa_p),
                fmt_num(r.k_min),
                fmt_num(r.purity),
                r.n_evals.to_string(),
                r.converged.to_string(),
                row.status(),
            ],
            Err(_) => vec![
                fmt_num(row.ratio),
                "nan".into(),
                "nan".into(),
                "nan".into(),
                "0".into(),
                "false".into(),
                row.status(),
            ],
        };
        table.push_cells(&cells);
    }
    table
}

/// Writes `optimize.tsv` into `out` for the configured ratio list.
pub fn cmd_optimize(config: &RunConfig, out: &Path) -> Result<Vec<SweepRow>> {
    let ratios = config.sweep_ratios()?;
    let rows = run_sweep(config, &ratios);
    sweep_table(&rows).write(&out.join("optimize.tsv"))?;
    Ok(rows)
}
