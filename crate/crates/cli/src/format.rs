//! Locale-independent number formatting and table writing.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{io_error, Result};

pub const SIGNIFICANT_DIGITS: usize = 12;

/// `x` with twelve significant digits, in the style of C's `%.12g`.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..SIGNIFICANT_DIGITS as i32).contains(&exp) {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_fraction(format!("{x:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_fraction(mantissa.to_string()), sign, exp.abs())
    }
}

fn trim_fraction(mut s: String) -> String {
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    s
}

/// A tab-separated table with a `#`-prefixed header line.
#[derive(Debug, Clone, Default)]
pub struct Table {
    text: String,
    rows: usize,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            text: format!("# {}\n", columns.join("\t")),
            rows: 0,
        }
    }

    pub fn push_numbers(&mut self, row: &[f64]) {
        let cells: Vec<String> = row.iter().map(|&x| fmt_num(x)).collect();
        self.push_cells(&cells);
    }

    pub fn push_cells(&mut self, cells: &[String]) {
        let _ = writeln!(self.text, "{}", cells.join("\t"));
        self.rows += 1;
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, &self.text).map_err(io_error(path))
    }
}

pub fn write_json<S: serde::Serialize>(path: &Path, value: &S) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(io_error(path))
}
