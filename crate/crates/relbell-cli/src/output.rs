//! Deterministic CSV rendering and writing.
//!
//! Files are UTF-8 with LF line endings, comma separators, and `.` decimals.
//! The first line is a `# relbell v1` comment carrying the scenario name and
//! the SHA-256 of the effective config; the second line names the columns.
//! Float formatting is fixed so identical configs yield byte-identical files.

use std::fs;
use std::io::Write;

use crate::config::ScenarioConfig;
use crate::error::CliError;

/// Format a value with twelve digits after the decimal point, the precision
/// used for every angle, direction component, and S value. Values that round
/// to zero are canonicalized so `-0.000000000000` never appears.
pub fn fmt12(x: f64) -> String {
    let v = if x.abs() < 0.5e-12 { 0.0 } else { x };
    format!("{v:.12}")
}

/// Format a small magnitude (a residual) with twelve significant digits in
/// scientific notation, where fixed-point formatting would collapse to zero.
pub fn fmt_residual(x: f64) -> String {
    let v = if x == 0.0 { 0.0 } else { x };
    format!("{v:.11e}")
}

/// Assemble a complete CSV document: traceability header, column names, rows.
pub fn render(config: &ScenarioConfig, columns: &str, rows: &[String]) -> String {
    let scenario = config
        .scenario
        .expect("finalize() tags the config with its scenario")
        .name();
    let mut doc = String::new();
    doc.push_str(&format!(
        "# relbell v1 scenario={scenario} config-sha256={}\n",
        config.sha256()
    ));
    doc.push_str(columns);
    doc.push('\n');
    for row in rows {
        doc.push_str(row);
        doc.push('\n');
    }
    doc
}

/// Write the document to the configured path, or to stdout when no path is
/// set. Filesystem failures carry the path and map to exit code 4.
pub fn write(config: &ScenarioConfig, doc: &str) -> Result<(), CliError> {
    match &config.output.path {
        Some(path) => fs::write(path, doc).map_err(|e| CliError::io(path.clone(), e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(doc.as_bytes())
                .and_then(|()| stdout.flush())
                .map_err(|e| CliError::io("<stdout>", e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Overrides, Scenario};

    #[test]
    fn fixed_formatting_pins_twelve_decimals() {
        assert_eq!(fmt12(2.0 * std::f64::consts::SQRT_2), "2.828427124746");
        assert_eq!(fmt12(0.0), "0.000000000000");
        assert_eq!(fmt12(-1.5), "-1.500000000000");
    }

    #[test]
    fn negative_zero_is_canonicalized() {
        assert_eq!(fmt12(-0.0), "0.000000000000");
        assert_eq!(fmt12(-1e-15), "0.000000000000");
    }

    #[test]
    fn residual_formatting_keeps_twelve_significant_digits() {
        assert_eq!(fmt_residual(1.5e-16), "1.50000000000e-16");
        assert_eq!(fmt_residual(0.0), "0.00000000000e0");
    }

    #[test]
    fn rendered_document_has_header_columns_and_lf_rows() {
        let cfg = ScenarioConfig::default()
            .finalize(Scenario::SphereSweep, &Overrides::default())
            .unwrap();
        let doc = render(&cfg, "a,b", &["1,2".into(), "3,4".into()]);
        let lines: Vec<&str> = doc.split('\n').collect();
        assert!(lines[0].starts_with("# relbell v1 scenario=sphere-sweep config-sha256="));
        assert_eq!(
            lines[0].len(),
            "# relbell v1 scenario=sphere-sweep config-sha256=".len() + 64
        );
        assert_eq!(lines[1], "a,b");
        assert_eq!(lines[2], "1,2");
        assert_eq!(lines[3], "3,4");
        assert_eq!(lines[4], "");
        assert!(!doc.contains('\r'));
    }
}
