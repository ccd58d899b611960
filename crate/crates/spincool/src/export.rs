//! Surface files.
//!
//! CSV: header `t1_s,t2_s,value,bias_<spin>...`, one row per cell in t1-major
//! order, numbers with 9 significant digits, LF line endings. JSON: the
//! [`Surface`] itself (grid metadata, summary and cell array).

use spincool_core::optimizer::Surface;
use thiserror::Error;

pub const SIGNIFICANT_DIGITS: usize = 9;

#[derive(Debug, Error)]
pub enum ExportError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("malformed surface file: {0}")]
    Malformed(String),
}

/// `v` with `digits` significant digits, in the shortest of fixed or
/// scientific notation (like C's `%g`), trailing zeros removed.
pub fn format_sig(v: f64, digits: usize) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v == 0.0 { "0".into() } else { v.to_string() };
    }
    let sci = format!("{:.*e}", digits - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        return format!("{}e{}", trim_zeros(mantissa), exp);
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{:.*}", decimals, v)).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn surface_csv(surface: &Surface) -> Result<String, ExportError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let mut header = vec!["t1_s".to_string(), "t2_s".into(), "value".into()];
    header.extend(surface.spins.iter().map(|s| format!("bias_{s}")));
    w.write_record(&header)?;
    for c in &surface.cells {
        let mut row = vec![
            format_sig(c.t1, SIGNIFICANT_DIGITS),
            format_sig(c.t2, SIGNIFICANT_DIGITS),
            format_sig(c.value, SIGNIFICANT_DIGITS),
        ];
        row.extend(c.biases.iter().map(|b| format_sig(*b, SIGNIFICANT_DIGITS)));
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| ExportError::Malformed(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is ASCII"))
}

/// One parsed CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub t1: f64,
    pub t2: f64,
    pub value: f64,
    pub biases: Vec<f64>,
}

pub fn parse_surface_csv(text: &str) -> Result<Vec<CsvRow>, ExportError> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let width = r.headers()?.len();
    if width < 3 {
        return Err(ExportError::Malformed(format!("{width} columns")));
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let nums = rec
            .iter()
            .map(|f| f.parse::<f64>().map_err(|e| ExportError::Malformed(format!("{f:?}: {e}"))))
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(CsvRow {
            t1: nums[0],
            t2: nums[1],
            value: nums[2],
            biases: nums[3..].to_vec(),
        });
    }
    Ok(rows)
}

/// Index of the first row holding the largest value.
pub fn csv_argmax(rows: &[CsvRow]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (k, r) in rows.iter().enumerate() {
        if best.is_none_or(|b| r.value > rows[b].value) {
            best = Some(k);
        }
    }
    best
}

pub fn surface_json(surface: &Surface) -> Result<String, ExportError> {
    let mut s = serde_json::to_string_pretty(surface)?;
    s.push('\n');
    Ok(s)
}

pub fn surface_from_json(text: &str) -> Result<Surface, ExportError> {
    Ok(serde_json::from_str(text)?)
}
