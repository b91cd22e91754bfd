//! CSV and JSON rendering of command records.

use serde::Serialize;

use super::scenario::Format;
use crate::error::Result;

/// Significant digits for floats in CSV output.
pub const SIGNIFICANT_DIGITS: usize = 9;

/// Marker written in analytic columns when a value is undefined because a
/// success probability is outside its valid range.
pub const INFEASIBLE: &str = "infeasible";

/// Formats `x` with [`SIGNIFICANT_DIGITS`] significant digits, trimming
/// trailing zeros. Magnitudes outside [1e-5, 1e9) use exponent notation.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-5..9).contains(&exp) {
        return format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    }
    let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_sig).unwrap_or_else(|| INFEASIBLE.to_string())
}

/// A command result that can be emitted as CSV or JSON.
pub trait Artifact: Serialize {
    /// Comment lines (without the leading `# `) placed before the header.
    fn preamble(&self) -> Vec<String> {
        Vec::new()
    }

    fn header(&self) -> Vec<&'static str>;

    fn rows(&self) -> Vec<Vec<String>>;
}

pub fn render<A: Artifact>(artifact: &A, format: Format) -> Result<String> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(artifact)?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => {
            let mut out = String::new();
            for line in artifact.preamble() {
                out.push_str("# ");
                out.push_str(&line);
                out.push('\n');
            }
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(artifact.header())?;
            for row in artifact.rows() {
                w.write_record(&row)?;
            }
            let bytes = w.into_inner().map_err(|e| e.into_error())?;
            out.push_str(&String::from_utf8_lossy(&bytes));
            Ok(out)
        }
    }
}
