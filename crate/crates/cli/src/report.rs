//! Deterministic output emission: CSV curve files and JSON run summaries.
//!
//! CSV cells use the shortest decimal that round-trips the binary value
//! (Rust's default float `Display`), `.` as the decimal separator, `,` as
//! the delimiter, and `\n` line endings. CSV content never includes
//! timestamps, so identical configurations produce bit-identical files;
//! wall-clock information lives only in the JSON summary.

use std::fs;

use crate::config::CliError;

/// One data row rendered from its numeric cells.
pub fn fmt_row(values: &[f64]) -> String {
    let mut out = String::with_capacity(values.len() * 24);
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        // Shortest round-trip decimal form of the binary value.
        out.push_str(&format!("{v}"));
    }
    out
}

/// Assemble the full CSV text: header line then one line per row.
pub fn csv_text(header: &str, rows: &[Vec<f64>]) -> String {
    let mut out = String::with_capacity(header.len() + 1 + rows.len() * 128);
    out.push_str(header);
    out.push('\n');
    for row in rows {
        out.push_str(&fmt_row(row));
        out.push('\n');
    }
    out
}

/// Write `<base>.csv` and `<base>.summary.json`.
pub fn write_outputs(
    base: &str,
    csv: &str,
    summary: &serde_json::Value,
) -> Result<(), CliError> {
    let csv_path = format!("{base}.csv");
    let json_path = format!("{base}.summary.json");
    fs::write(&csv_path, csv).map_err(|e| CliError::Io(format!("cannot write {csv_path}: {e}")))?;
    let mut text = serde_json::to_string_pretty(summary)
        .map_err(|e| CliError::Io(format!("cannot serialize summary: {e}")))?;
    text.push('\n');
    fs::write(&json_path, text)
        .map_err(|e| CliError::Io(format!("cannot write {json_path}: {e}")))?;
    Ok(())
}
