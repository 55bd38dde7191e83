//! Rendering and persistence of risk reports as CSV or JSON.

use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::risk::RiskReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl ReportFormat {
    pub fn as_str(&self) -> &'static str {
        match self {
            ReportFormat::Csv => "csv",
            ReportFormat::Json => "json",
        }
    }
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(Error::InvalidParameter(format!(
                "unknown report format {other:?}; expected csv or json"
            ))),
        }
    }
}

pub const CSV_HEADER: &str = "pattern,nu,estimator,risk,std_error,n_rep";

/// Shortest decimal that parses back to the same f64; integral values keep
/// a trailing ".0" so the column reads as real-valued.
fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

/// CSV rendering: header plus one line per row, eigenvalue pattern
/// pipe-separated largest first. The replicate count comes from the report
/// metadata and repeats on every line.
pub fn render_csv(report: &RiskReport) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in &report.rows {
        let pattern = row
            .lambda
            .iter()
            .map(|v| fmt_f64(*v))
            .collect::<Vec<_>>()
            .join("|");
        out.push_str(&pattern);
        out.push(',');
        out.push_str(&fmt_f64(row.nu));
        out.push(',');
        out.push_str(row.estimator.as_str());
        out.push(',');
        out.push_str(&fmt_f64(row.risk));
        out.push(',');
        out.push_str(&fmt_f64(row.std_error));
        out.push(',');
        out.push_str(&report.metadata.n_rep.to_string());
        out.push('\n');
    }
    out
}

/// Pretty-printed JSON with a trailing newline. Serialization is pure, so
/// equal reports render to identical bytes.
pub fn render_json(report: &RiskReport) -> Result<String> {
    let mut s = serde_json::to_string_pretty(report)
        .map_err(|e| Error::InvalidInput(format!("report serialization failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

pub fn write_report(report: &RiskReport, path: &Path, format: ReportFormat) -> Result<()> {
    let body = match format {
        ReportFormat::Csv => render_csv(report),
        ReportFormat::Json => render_json(report)?,
    };
    std::fs::write(path, body).map_err(|e| Error::io(path, e))
}

pub fn read_report_json(path: &Path) -> Result<RiskReport> {
    let body = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&body)
        .map_err(|e| Error::InvalidInput(format!("invalid report JSON in {}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::risk::{EstimatorKind, ReportMetadata, ReportRow};

    fn sample_report() -> RiskReport {
        RiskReport {
            metadata: ReportMetadata {
                seed: 42,
                n_points: 1000,
                n_rep: 100,
                version: "0.1.0".into(),
                wall_ms: None,
                heavy_tail: Vec::new(),
            },
            rows: vec![
                ReportRow {
                    lambda: vec![1.0, 0.8],
                    nu: 5.0,
                    estimator: EstimatorKind::PhiStar,
                    risk: 0.5,
                    std_error: 0.25,
                },
                ReportRow {
                    lambda: vec![1.0, 0.8],
                    nu: 5.0,
                    estimator: EstimatorKind::PsiStar,
                    risk: 0.1875,
                    std_error: 0.03125,
                },
            ],
        }
    }

    #[test]
    fn csv_layout() {
        let csv = render_csv(&sample_report());
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], "pattern,nu,estimator,risk,std_error,n_rep");
        assert_eq!(lines[1], "1.0|0.8,5.0,phi_star,0.5,0.25,100");
        assert_eq!(lines[2], "1.0|0.8,5.0,psi_star,0.1875,0.03125,100");
        assert!(csv.ends_with('\n'));
    }

    #[test]
    fn empty_report_renders_header_only() {
        let mut report = sample_report();
        report.rows.clear();
        assert_eq!(render_csv(&report), "pattern,nu,estimator,risk,std_error,n_rep\n");
    }

    #[test]
    fn csv_numbers_round_trip() {
        let mut report = sample_report();
        report.rows[0].risk = 0.1 + 0.2;
        report.rows[0].std_error = 1.0 / 3.0;
        let csv = render_csv(&report);
        let fields: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
        assert_eq!(fields[3].parse::<f64>().unwrap(), 0.1 + 0.2);
        assert_eq!(fields[4].parse::<f64>().unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn json_round_trips_to_equal_report() {
        let report = sample_report();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("report.json");
        write_report(&report, &path, ReportFormat::Json).unwrap();
        let back = read_report_json(&path).unwrap();
        assert_eq!(report, back);
    }

    #[test]
    fn write_errors_carry_the_path() {
        let report = sample_report();
        let path = Path::new("/nonexistent-dir/report.csv");
        let err = write_report(&report, path, ReportFormat::Csv).unwrap_err();
        assert!(err.to_string().contains("/nonexistent-dir/report.csv"));
        let err = read_report_json(Path::new("/nonexistent-dir/missing.json")).unwrap_err();
        assert!(err.to_string().contains("missing.json"));
    }

    #[test]
    fn format_parsing() {
        assert_eq!("csv".parse::<ReportFormat>().unwrap(), ReportFormat::Csv);
        assert_eq!("json".parse::<ReportFormat>().unwrap(), ReportFormat::Json);
        assert!("yaml".parse::<ReportFormat>().is_err());
    }
}
