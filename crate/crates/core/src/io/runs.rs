//! Run-record CSV: `model,overfitting,val_accuracy,val_loss,sensitivity,specificity,params`.
//!
//! Model names containing commas are quoted per standard CSV rules; `params`
//! may be empty. Floats are written in shortest round-trip form, so
//! `parse(write(records)) == records` exactly.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::metrics::MetricSet;
use crate::ranking::RunRecord;

pub const RUNS_HEADER: [&str; 7] = [
    "model",
    "overfitting",
    "val_accuracy",
    "val_loss",
    "sensitivity",
    "specificity",
    "params",
];

fn parse_field(raw: &str, what: &str, label: &str, line: u64) -> Result<f64> {
    raw.trim().parse::<f64>().map_err(|_| Error::Parse {
        path: label.to_string(),
        line,
        reason: format!("invalid {what}: `{raw}`"),
    })
}

/// Parse run records from a reader; `label` names the source in errors.
pub fn parse_runs<R: Read>(reader: R, label: &str) -> Result<Vec<RunRecord>> {
    let mut csv_reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);
    let headers = csv_reader.headers().map_err(|e| Error::Format {
        path: label.to_string(),
        reason: e.to_string(),
    })?;
    let found: Vec<&str> = headers.iter().collect();
    if found != RUNS_HEADER {
        return Err(Error::HeaderMismatch {
            path: label.to_string(),
            expected: RUNS_HEADER.join(","),
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
        if row.len() != RUNS_HEADER.len() {
            return Err(Error::Parse {
                path: label.to_string(),
                line,
                reason: format!("expected {} fields, found {}", RUNS_HEADER.len(), row.len()),
            });
        }
        let metrics = MetricSet::new(
            parse_field(&row[1], "overfitting", label, line)?,
            parse_field(&row[2], "val_accuracy", label, line)?,
            parse_field(&row[3], "val_loss", label, line)?,
            parse_field(&row[4], "sensitivity", label, line)?,
            parse_field(&row[5], "specificity", label, line)?,
        )
        .map_err(|e| Error::Parse {
            path: label.to_string(),
            line,
            reason: e.to_string(),
        })?;
        let params_raw = row[6].trim();
        let param_count = if params_raw.is_empty() {
            None
        } else {
            Some(params_raw.parse::<u64>().map_err(|_| Error::Parse {
                path: label.to_string(),
                line,
                reason: format!("invalid params: `{params_raw}`"),
            })?)
        };
        let record =
            RunRecord::new(row[0].to_string(), metrics, param_count).map_err(|e| Error::Parse {
                path: label.to_string(),
                line,
                reason: e.to_string(),
            })?;
        records.push(record);
    }
    if records.is_empty() {
        return Err(Error::NoRecords);
    }
    Ok(records)
}

/// Load run records from a CSV file.
pub fn load_runs(path: &Path) -> Result<Vec<RunRecord>> {
    let file = File::open(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    parse_runs(file, &path.display().to_string())
}

/// Write run records as CSV, full float precision.
pub fn write_runs<W: Write>(writer: W, records: &[RunRecord]) -> Result<()> {
    let mut csv_writer = csv::Writer::from_writer(writer);
    let io_err = |e: csv::Error| Error::Format {
        path: "<runs csv>".to_string(),
        reason: e.to_string(),
    };
    csv_writer.write_record(RUNS_HEADER).map_err(io_err)?;
    for record in records {
        let m = &record.metrics;
        let row = [
            record.model_name.clone(),
            m.overfitting.to_string(),
            m.val_accuracy.to_string(),
            m.val_loss.to_string(),
            m.sensitivity.to_string(),
            m.specificity.to_string(),
            record
                .param_count
                .map(|p| p.to_string())
                .unwrap_or_default(),
        ];
        csv_writer.write_record(&row).map_err(io_err)?;
    }
    csv_writer.flush().map_err(|e| Error::Format {
        path: "<runs csv>".to_string(),
        reason: e.to_string(),
    })?;
    Ok(())
}

/// Save run records to a CSV file.
pub fn save_runs(path: &Path, records: &[RunRecord]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    write_runs(file, records)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(name: &str, overfitting: f64) -> RunRecord {
        RunRecord::new(
            name,
            MetricSet::new(overfitting, 0.8, 0.3, 0.9, 0.7).unwrap(),
            None,
        )
        .unwrap()
    }

    #[test]
    fn parses_quoted_model_names() {
        let csv = "model,overfitting,val_accuracy,val_loss,sensitivity,specificity,params\n\
                   \"RMS, CCE\",0.1395,0.8098,0.6115,0.9587,0.6588,\n";
        let records = parse_runs(csv.as_bytes(), "test.csv").unwrap();
        assert_eq!(records.len(), 1);
        assert_eq!(records[0].model_name, "RMS, CCE");
        assert_eq!(records[0].metrics.overfitting, 0.1395);
        assert_eq!(records[0].param_count, None);
    }

    #[test]
    fn header_mismatch_lists_expected_and_found() {
        let csv = "model,overfit,acc\nx,0.1,0.2\n";
        let err = parse_runs(csv.as_bytes(), "bad.csv").unwrap_err();
        match err {
            Error::HeaderMismatch {
                expected, found, ..
            } => {
                assert!(expected.starts_with("model,overfitting"));
                assert_eq!(found, "model,overfit,acc");
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn empty_data_section_is_an_error() {
        let csv = "model,overfitting,val_accuracy,val_loss,sensitivity,specificity,params\n";
        assert!(matches!(
            parse_runs(csv.as_bytes(), "empty.csv"),
            Err(Error::NoRecords)
        ));
    }

    #[test]
    fn range_violation_names_the_row() {
        let csv = "model,overfitting,val_accuracy,val_loss,sensitivity,specificity,params\n\
                   ok,0.1,0.8,0.3,0.9,0.7,\n\
                   bad,0.1,1.3,0.3,0.9,0.7,\n";
        let err = parse_runs(csv.as_bytes(), "range.csv").unwrap_err();
        match err {
            Error::Parse { line, reason, .. } => {
                assert_eq!(line, 3);
                assert!(reason.contains("val_accuracy"));
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn bad_number_names_the_row() {
        let csv = "model,overfitting,val_accuracy,val_loss,sensitivity,specificity,params\n\
                   x,zero,0.8,0.3,0.9,0.7,\n";
        let err = parse_runs(csv.as_bytes(), "num.csv").unwrap_err();
        assert!(err.to_string().contains("line 2"));
    }

    #[test]
    fn params_parse_and_survive() {
        let mut record = record("with-params", 0.1);
        record.param_count = Some(22_910_480);
        let mut buffer = Vec::new();
        write_runs(&mut buffer, &[record.clone()]).unwrap();
        let parsed = parse_runs(buffer.as_slice(), "rt.csv").unwrap();
        assert_eq!(parsed, vec![record]);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_record() -> impl Strategy<Value = RunRecord> {
            (
                "[A-Za-z][A-Za-z0-9 ,._-]{0,14}",
                -1.0..=1.0f64,
                0.0..=1.0f64,
                0.0..=100.0f64,
                0.0..=1.0f64,
                0.0..=1.0f64,
                prop::option::of(0..u64::MAX / 2),
            )
                .prop_map(|(name, of, acc, loss, sens, spec, params)| {
                    RunRecord::new(
                        name,
                        MetricSet::new(of, acc, loss, sens, spec).unwrap(),
                        params,
                    )
                    .unwrap()
                })
        }

        proptest! {
            #[test]
            fn csv_round_trip_is_exact(records in prop::collection::vec(arb_record(), 1..20)) {
                let mut buffer = Vec::new();
                write_runs(&mut buffer, &records).unwrap();
                let parsed = parse_runs(buffer.as_slice(), "prop.csv").unwrap();
                prop_assert_eq!(parsed, records);
            }
        }
    }
}
