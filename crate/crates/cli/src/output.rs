use std::path::{Path, PathBuf};

use graphstate::claims::ClaimReport;
use serde::Serialize;

use crate::error::CliError;

/// Column order of the CSV summary. Kept fixed so tables diff cleanly
/// across versions.
pub const CSV_COLUMNS: [&str; 5] = ["claim", "instance", "verdict", "residual", "certificate-path"];

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    text
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// Writes to `path`, or to stdout when there is none.
pub fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => write_text(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// One row per instance; `certificate-path` is a JSON pointer into the
/// report file, empty when the instance has no certificate.
pub fn report_csv(report: &ClaimReport, json_name: &str) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_COLUMNS)?;
    for (i, inst) in report.instances.iter().enumerate() {
        let residual = inst.residual.map(|r| format!("{r:e}")).unwrap_or_default();
        let cert =
            if inst.certificate.is_some() { format!("{json_name}#/instances/{i}/certificate") } else { String::new() };
        w.write_record([report.claim.as_str(), &inst.key, &inst.verdict.to_string(), &residual, &cert])?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Usage(format!("CSV buffer: {e}")))?;
    Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
}

/// Writes `<dir>/<stem>.json` and `<dir>/<stem>.csv`; returns both paths.
pub fn write_report(report: &ClaimReport, dir: &Path, stem: &str) -> Result<(PathBuf, PathBuf), CliError> {
    let json_path = dir.join(format!("{stem}.json"));
    let csv_path = dir.join(format!("{stem}.csv"));
    write_text(&json_path, &to_json(report))?;
    write_text(&csv_path, &report_csv(report, &format!("{stem}.json"))?)?;
    Ok((json_path, csv_path))
}
