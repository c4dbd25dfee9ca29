//! Generalization-triple CSV: `split,accuracy,sensitivity,specificity` with
//! one `val` row and one `test` row.

use std::fs::File;
use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};
use crate::metrics::MetricTriple;

pub const GENERALIZATION_HEADER: [&str; 4] = ["split", "accuracy", "sensitivity", "specificity"];

/// Parse the (val, test) metric triples; `label` names the source in errors.
pub fn parse_triples<R: Read>(reader: R, label: &str) -> Result<(MetricTriple, MetricTriple)> {
    let mut csv_reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);
    let headers = csv_reader.headers().map_err(|e| Error::Format {
        path: label.to_string(),
        reason: e.to_string(),
    })?;
    let found: Vec<&str> = headers.iter().collect();
    if found != GENERALIZATION_HEADER {
        return Err(Error::HeaderMismatch {
            path: label.to_string(),
            expected: GENERALIZATION_HEADER.join(","),
            found: found.join(","),
        });
    }

    let mut val = None;
    let mut test = None;
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
        if row.len() != GENERALIZATION_HEADER.len() {
            return Err(parse_err(format!(
                "expected {} fields, found {}",
                GENERALIZATION_HEADER.len(),
                row.len()
            )));
        }
        let number = |i: usize, what: &str| -> Result<f64> {
            row[i]
                .trim()
                .parse()
                .map_err(|_| parse_err(format!("invalid {what}: `{}`", &row[i])))
        };
        let triple = MetricTriple::new(
            number(1, "accuracy")?,
            number(2, "sensitivity")?,
            number(3, "specificity")?,
        )
        .map_err(|e| parse_err(e.to_string()))?;
        match &row[0] {
            "val" => val = Some(triple),
            "test" => test = Some(triple),
            other => {
                return Err(parse_err(format!(
                    "invalid split `{other}`: expected one of val, test"
                )))
            }
        }
    }
    match (val, test) {
        (Some(val), Some(test)) => Ok((val, test)),
        _ => Err(Error::Format {
            path: label.to_string(),
            reason: "expected one `val` row and one `test` row".to_string(),
        }),
    }
}

/// Load the (val, test) triples from a CSV file.
pub fn load_triples(path: &Path) -> Result<(MetricTriple, MetricTriple)> {
    let file = File::open(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    parse_triples(file, &path.display().to_string())
}
