//! Report emission: metadata headers, 17-significant-digit reals, and
//! stdout-or-file plumbing.
//!
//! Every CSV starts with a `# {json}` metadata comment line followed by the
//! documented header row. Bodies are byte-deterministic for identical
//! configurations; the only varying field is `generated_unix` inside the
//! metadata line.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::{json, Value};

/// Fixed-width scientific notation with 17 significant digits, round-trip
/// safe for f64.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

/// Optional CSV cell.
pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_real).unwrap_or_default()
}

/// Common metadata object for every report.
pub fn metadata(command: &str, extra: Value) -> Value {
    let mut meta = json!({
        "tool": "jspec",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "generated_unix": SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        "constants": {
            "solver_tolerance_factor": jacobi_spectra::eigensolve::DEFAULT_TOLERANCE_FACTOR,
            "sturm_pivot_guard": jacobi_spectra::eigensolve::STURM_PIVOT_GUARD,
            "curve_panels": jacobi_spectra::measures::CURVE_PANELS,
            "default_cdf_grid": jacobi_spectra::distribution::DEFAULT_CDF_GRID,
        },
    });
    if let (Some(obj), Some(extra)) = (meta.as_object_mut(), extra.as_object()) {
        for (k, v) in extra {
            obj.insert(k.clone(), v.clone());
        }
    }
    meta
}

/// Assembles a CSV document: metadata comment, header, rows.
pub fn csv_document(meta: &Value, header: &str, rows: &[String]) -> String {
    let mut doc = String::new();
    doc.push_str("# ");
    doc.push_str(&meta.to_string());
    doc.push('\n');
    doc.push_str(header);
    doc.push('\n');
    for row in rows {
        doc.push_str(row);
        doc.push('\n');
    }
    doc
}

/// Writes to the given path, or stdout when no path is given.
pub fn emit(out: Option<&Path>, content: &str) -> std::io::Result<()> {
    match out {
        Some(path) => fs::write(path, content),
        None => std::io::stdout().write_all(content.as_bytes()),
    }
}
