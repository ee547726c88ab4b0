//! Command-line front end for `ringpure`: configuration parsing, the
//! `delay`, `jsa`, `optimize` and `reproduce` commands, and table, JSON and
//! SVG export.

pub mod commands;
pub mod config;
pub mod error;
pub mod format;
pub mod heatmap;

use std::fs;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use config::{parse_config, parse_ratio_list, serialize_config, RunConfig};
pub use error::{CliError, Result};

#[derive(Debug, Parser)]
#[command(name = "ringpure", version, about = "Coupled-microring heralded single-photon source designer")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML configuration file; defaults apply when absent.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Also write an SVG heatmap of the JSI.
    #[arg(long, global = true)]
    pub heatmap: bool,
    /// Comma-separated kappa_p / kappa_is ratios, overriding the config list.
    #[arg(long, global = true)]
    pub ratios: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Relative pump delay for 0.9, 1.0 and 1.1 times the optimal coupling.
    Delay,
    /// Joint spectral intensity, Schmidt number and purity.
    Jsa,
    /// Pump-width optimization for each ratio.
    Optimize,
    /// Recompute the reference results and compare against them.
    Reproduce,
}

pub fn load_config(cli: &Cli) -> Result<RunConfig> {
    let mut config = match &cli.config {
        Some(path) => parse_config(&fs::read_to_string(path).map_err(error::io_error(path))?)?,
        None => RunConfig::default(),
    };
    if let Some(list) = &cli.ratios {
        config.ratios = Some(parse_ratio_list(list)?);
    }
    Ok(config)
}

/// Runs the selected command. Returns `false` when `reproduce` finds a
/// failed comparison.
pub fn run(cli: &Cli) -> Result<bool> {
    let config = load_config(cli)?;
    fs::create_dir_all(&cli.out).map_err(error::io_error(&cli.out))?;
    match cli.command {
        Command::Delay => {
            commands::cmd_delay(&config, &cli.out)?;
        }
        Command::Jsa => {
            let meta = commands::cmd_jsa(&config, &cli.out, cli.heatmap)?;
            println!("K = {:.10}  purity = {:.6}", meta.schmidt_number, meta.purity);
            for w in &meta.warnings {
                eprintln!("warning: {w}");
            }
        }
        Command::Optimize => {
            for row in commands::cmd_optimize(&config, &cli.out)? {
                match &row.result {
                    Ok(r) => println!(
                        "ratio {}: K = {:.10}  FWHM/kappa_p = {:.4}  [{}]",
                        row.ratio,
                        r.k_min,
                        r.fwhm_over_kappa_p,
                        row.status()
                    ),
                    Err(_) => println!("ratio {}: {}", row.ratio, row.status()),
                }
            }
        }
        Command::Reproduce => {
            let report = commands::cmd_reproduce(&config, &cli.out, cli.heatmap)?;
            for c in &report.comparisons {
                println!(
                    "{} {}: computed {} in [{}, {}]",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.computed.map_or("none".into(), |k| format!("{k:.8}")),
                    c.lower,
                    c.upper
                );
            }
            if let Some(f) = &report.flatness {
                println!(
                    "{} delay flatness: deviation ratios {:.3} and {:.3} (need >= {})",
                    if f.passed { "PASS" } else { "FAIL" },
                    f.ratio_to_optimal[0],
                    f.ratio_to_optimal[1],
                    f.required_ratio
                );
            }
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            for e in &report.errors {
                eprintln!("error: {e}");
            }
            return Ok(report.passed);
        }
    }
    Ok(true)
}
