//! Prediction-log CSV: `example_id,true_label,p_healthy,p_diseased`.
//! Labels are the literal strings `healthy` / `diseased`.

use std::fs::File;
use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};
use crate::metrics::{Label, PredictionRecord};

pub const PREDICTIONS_HEADER: [&str; 4] = ["example_id", "true_label", "p_healthy", "p_diseased"];

/// Parse prediction records from a reader; `label` names the source in
/// errors.
pub fn parse_predictions<R: Read>(reader: R, label: &str) -> Result<Vec<PredictionRecord>> {
    let mut csv_reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);
    let headers = csv_reader.headers().map_err(|e| Error::Format {
        path: label.to_string(),
        reason: e.to_string(),
    })?;
    let found: Vec<&str> = headers.iter().collect();
    if found != PREDICTIONS_HEADER {
        return Err(Error::HeaderMismatch {
            path: label.to_string(),
            expected: PREDICTIONS_HEADER.join(","),
            found: found.join(","),
        });
    }

    let mut records = Vec::new();
    for row in csv_reader.records() {
        let row = row.map_err(|e| Error::Format {
            path: label.to_string(),
            reason: e.to_string(),
        })?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        let parse_err = |reason: String| Error::Parse {
            path: label.to_string(),
            line,
            reason,
        };
        if row.len() != PREDICTIONS_HEADER.len() {
            return Err(parse_err(format!(
                "expected {} fields, found {}",
                PREDICTIONS_HEADER.len(),
                row.len()
            )));
        }
        let true_label: Label = row[1]
            .parse()
            .map_err(|e: Error| parse_err(e.to_string()))?;
        let p_healthy: f64 = row[2]
            .trim()
            .parse()
            .map_err(|_| parse_err(format!("invalid p_healthy: `{}`", &row[2])))?;
        let p_diseased: f64 = row[3]
            .trim()
            .parse()
            .map_err(|_| parse_err(format!("invalid p_diseased: `{}`", &row[3])))?;
        let record = PredictionRecord::new(row[0].to_string(), true_label, p_healthy, p_diseased)
            .map_err(|e| parse_err(e.to_string()))?;
        records.push(record);
    }
    if records.is_empty() {
        return Err(Error::NoRecords);
    }
    Ok(records)
}

/// Load prediction records from a CSV file.
pub fn load_predictions(path: &Path) -> Result<Vec<PredictionRecord>> {
    let file = File::open(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    parse_predictions(file, &path.display().to_string())
}
