//! Output formatting shared by every CSV and JSON writer.

use std::io::Write;

use num_complex::Complex64;

use crate::error::{io_error, Result};

/// Shortest decimal string that reads back to the same `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

/// Formats `a+bi` / `a-bi` with round-trip components.
pub fn fmt_complex(z: Complex64) -> String {
    if z.im.is_sign_negative() {
        format!("{}-{}i", fmt_f64(z.re), fmt_f64(-z.im))
    } else {
        format!("{}+{}i", fmt_f64(z.re), fmt_f64(z.im))
    }
}

/// Writes a header and rows as CSV.
pub fn write_csv<W, I, R>(out: W, header: &[&str], rows: I) -> Result<()>
where
    W: Write,
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header).map_err(io_error)?;
    for row in rows {
        w.write_record(row).map_err(io_error)?;
    }
    w.flush().map_err(io_error)?;
    Ok(())
}

/// Largest element of the last quarter of `values` (at least one element).
pub fn last_quartile_max(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let start = values.len() - values.len().div_ceil(4);
    values[start..]
        .iter()
        .fold(f64::NEG_INFINITY, |m, x| m.max(*x))
}
