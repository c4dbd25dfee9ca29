//! Leaderboard rendering: aligned text table, CSV, or JSON. Output is
//! byte-stable for fixed inputs: no timestamps, no locale formatting.
//! Tables and CSV show 4-decimal values; JSON keeps full precision.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::ranking::StageResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    Table,
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "table" => Ok(ReportFormat::Table),
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(Error::InvalidValue {
                what: "report format",
                value: other.to_string(),
                expected: "table, csv, json",
            }),
        }
    }
}

const BASE_HEADERS: [&str; 7] = [
    "Model",
    "Overfitting",
    "Validation acc.",
    "Loss",
    "Sensitivity",
    "Specificity",
    "Rank",
];

const BREAKDOWN_HEADERS: [&str; 6] = [
    "Score",
    "Overfit term",
    "Accuracy term",
    "Loss term",
    "Sensitivity term",
    "Specificity term",
];

fn four(v: f64) -> String {
    format!("{v:.4}")
}

/// Rows in input order, mirroring how the source tables list their models.
fn table_rows(result: &StageResult, breakdown: bool) -> Vec<Vec<String>> {
    let mut by_input: Vec<_> = result.rows.iter().collect();
    by_input.sort_by_key(|row| row.input_index);
    by_input
        .into_iter()
        .map(|row| {
            let m = &row.record.metrics;
            let mut cells = vec![
                row.record.model_name.clone(),
                four(m.overfitting),
                four(m.val_accuracy),
                four(m.val_loss),
                four(m.sensitivity),
                four(m.specificity),
                row.final_rank.to_string(),
            ];
            if breakdown {
                let s = &row.score;
                cells.extend([
                    four(s.total),
                    four(s.overfit_term),
                    four(s.accuracy_term),
                    four(s.loss_term),
                    four(s.sensitivity_term),
                    four(s.specificity_term),
                ]);
            }
            cells
        })
        .collect()
}

fn render_table(result: &StageResult, breakdown: bool) -> String {
    let mut headers: Vec<&str> = BASE_HEADERS.to_vec();
    if breakdown {
        headers.extend(BREAKDOWN_HEADERS);
    }
    let rows = table_rows(result, breakdown);
    let widths: Vec<usize> = headers
        .iter()
        .enumerate()
        .map(|(i, h)| {
            rows.iter()
                .map(|r| r[i].len())
                .chain(std::iter::once(h.len()))
                .max()
                .unwrap_or(0)
        })
        .collect();

    let mut out = String::new();
    let render_line = |cells: &[String], out: &mut String| {
        for (i, cell) in cells.iter().enumerate() {
            if i > 0 {
                out.push_str("  ");
            }
            if i == 0 {
                // Model column left-aligned, numbers right-aligned.
                let _ = write!(out, "{:<width$}", cell, width = widths[i]);
            } else {
                let _ = write!(out, "{:>width$}", cell, width = widths[i]);
            }
        }
        while out.ends_with(' ') {
            out.pop();
        }
        out.push('\n');
    };
    let header_cells: Vec<String> = headers.iter().map(|h| h.to_string()).collect();
    render_line(&header_cells, &mut out);
    for row in &rows {
        render_line(row, &mut out);
    }
    let _ = writeln!(out, "\nwinner: {}", result.winner);
    let _ = writeln!(out, "stage size: {}", result.stage_size());
    let _ = writeln!(out, "tie policy: {}", result.tie_policy);
    let _ = writeln!(out, "weights: {}", result.weights());
    out
}

fn render_csv(result: &StageResult, breakdown: bool) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let mut headers = vec![
        "model",
        "overfitting",
        "val_accuracy",
        "val_loss",
        "sensitivity",
        "specificity",
        "rank",
    ];
    if breakdown {
        headers.extend([
            "score",
            "overfit_term",
            "accuracy_term",
            "loss_term",
            "sensitivity_term",
            "specificity_term",
        ]);
    }
    writer.write_record(&headers).expect("write to vec");
    for row in table_rows(result, breakdown) {
        writer.write_record(&row).expect("write to vec");
    }
    String::from_utf8(writer.into_inner().expect("flush to vec")).expect("csv output is UTF-8")
}

/// Render a stage leaderboard. `breakdown` adds the overall score and its
/// five weighted terms as extra columns.
pub fn render_report(
    result: &StageResult,
    format: ReportFormat,
    breakdown: bool,
) -> Result<String> {
    match format {
        ReportFormat::Table => Ok(render_table(result, breakdown)),
        ReportFormat::Csv => Ok(render_csv(result, breakdown)),
        ReportFormat::Json => Ok(serde_json::to_string_pretty(result)? + "\n"),
    }
}

/// Parse a JSON report back into a stage result.
pub fn parse_report_json(text: &str) -> Result<StageResult> {
    Ok(serde_json::from_str(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::MetricSet;
    use crate::ranking::{rank_stage, RunRecord, TiePolicy, Weights};

    fn sample_result() -> StageResult {
        let records = vec![
            RunRecord::new(
                "alpha, plain",
                MetricSet::new(0.2, 0.9, 0.3, 0.8, 0.7).unwrap(),
                Some(1000),
            )
            .unwrap(),
            RunRecord::new(
                "beta",
                MetricSet::new(0.1, 0.7, 0.6, 0.9, 0.6).unwrap(),
                Some(2000),
            )
            .unwrap(),
        ];
        rank_stage(&records, TiePolicy::Ordinal, &Weights::default()).unwrap()
    }

    #[test]
    fn table_has_headers_rank_column_and_footer() {
        let text = render_report(&sample_result(), ReportFormat::Table, false).unwrap();
        let mut lines = text.lines();
        let header = lines.next().unwrap();
        assert!(header.starts_with("Model"));
        assert!(header.contains("Validation acc."));
        assert!(header.trim_end().ends_with("Rank"));
        assert!(text.contains("tie policy: ordinal"));
        assert!(text.contains("weights: overfitting=3"));
        assert!(text.contains("stage size: 2"));
    }

    #[test]
    fn table_breakdown_adds_score_columns() {
        let text = render_report(&sample_result(), ReportFormat::Table, true).unwrap();
        assert!(text.lines().next().unwrap().contains("Score"));
        assert!(text.contains("Specificity term"));
    }

    #[test]
    fn csv_quotes_model_names_with_commas() {
        let text = render_report(&sample_result(), ReportFormat::Csv, false).unwrap();
        assert!(text.starts_with("model,overfitting"));
        assert!(text.contains("\"alpha, plain\""));
    }

    #[test]
    fn table_rank_column_follows_input_order() {
        let records = crate::fixtures::table2_runs().unwrap();
        let result = rank_stage(&records, TiePolicy::Ordinal, &Weights::default()).unwrap();
        let text = render_report(&result, ReportFormat::Table, false).unwrap();
        let ranks: Vec<&str> = text
            .lines()
            .skip(1)
            .take(records.len())
            .map(|line| line.split_whitespace().last().unwrap())
            .collect();
        assert_eq!(ranks, ["9", "3", "7", "4", "1", "2", "5", "8", "6"]);
        // Single-model result renders one row with rank 1.
        let solo = rank_stage(&records[..1], TiePolicy::Ordinal, &Weights::default()).unwrap();
        let text = render_report(&solo, ReportFormat::Table, false).unwrap();
        assert!(text.lines().nth(1).unwrap().trim_end().ends_with('1'));
    }

    #[test]
    fn render_is_deterministic() {
        let result = sample_result();
        for format in [ReportFormat::Table, ReportFormat::Csv, ReportFormat::Json] {
            let a = render_report(&result, format, true).unwrap();
            let b = render_report(&result, format, true).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn json_round_trips_names_totals_ranks() {
        let result = sample_result();
        let text = render_report(&result, ReportFormat::Json, false).unwrap();
        let parsed = parse_report_json(&text).unwrap();
        assert_eq!(parsed, result);
    }
}
