//! Two-stage selection protocol: stage 1 picks a base architecture, stage 2
//! picks an optimizer/loss configuration on top of it, and a final check
//! verifies that validation metrics generalize to the test split.
//!
//! Training happens elsewhere; this module consumes externally produced run
//! records and carries the training configuration as descriptive metadata
//! only.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{abs_deltas, MetricTriple};
use crate::ranking::{rank_stage, RunRecord, StageResult, TiePolicy, Weights};

/// Verification deltas at or below this tolerance count as generalizing.
pub const DEFAULT_GENERALIZATION_TOLERANCE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StageId {
    Stage1,
    Stage2,
}

impl fmt::Display for StageId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StageId::Stage1 => "stage1",
            StageId::Stage2 => "stage2",
        })
    }
}

/// Training conditions shared by every candidate of a stage. Descriptive
/// metadata echoed into reports; nothing here is executed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingDefaults {
    pub input_dims: [u32; 3],
    pub batch_size: u32,
    pub epochs: u32,
    pub dropout: f64,
    pub head: String,
    pub batch_norm_unfrozen: bool,
    /// `None` when the optimizer varies per candidate.
    pub optimizer: Option<String>,
    /// `None` when the loss function varies per candidate.
    pub loss: Option<String>,
}

impl TrainingDefaults {
    fn base() -> Self {
        Self {
            input_dims: [128, 128, 3],
            batch_size: 32,
            epochs: 15,
            dropout: 0.5,
            head: "flatten, dropout 0.5, dense-2 softmax".to_string(),
            batch_norm_unfrozen: true,
            optimizer: None,
            loss: None,
        }
    }

    /// Stage-1 defaults: rmsprop with categorical cross-entropy.
    pub fn stage1() -> Self {
        Self {
            optimizer: Some("rmsprop".to_string()),
            loss: Some("categorical cross-entropy".to_string()),
            ..Self::base()
        }
    }

    /// Stage-2 defaults: optimizer and loss vary per candidate.
    pub fn stage2() -> Self {
        Self::base()
    }
}

/// One stage's identity, candidate roster, and training defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageConfig {
    pub stage_id: StageId,
    pub candidates: Vec<String>,
    pub defaults: TrainingDefaults,
}

impl StageConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// A ranked stage annotated with the configuration it ran under.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRun {
    pub config: StageConfig,
    pub result: StageResult,
}

/// Validate the records against the stage roster and delegate to
/// [`rank_stage`]. Exactly one record per candidate is required.
pub fn run_stage(
    config: &StageConfig,
    records: &[RunRecord],
    tie_policy: TiePolicy,
    weights: &Weights,
) -> Result<StageRun> {
    let stage = config.stage_id.to_string();
    let mut roster = HashSet::new();
    for candidate in &config.candidates {
        if !roster.insert(candidate.as_str()) {
            return Err(Error::DuplicateModel {
                name: candidate.clone(),
            });
        }
    }
    if records.len() != config.candidates.len() {
        return Err(Error::CandidateCountMismatch {
            stage,
            expected: config.candidates.len(),
            actual: records.len(),
        });
    }
    for record in records {
        if !roster.contains(record.model_name.as_str()) {
            return Err(Error::UnknownCandidate {
                name: record.model_name.clone(),
                stage,
            });
        }
    }
    // Counts match, candidates are unique, and every record names a
    // candidate; rank_stage rejects duplicate records, so the records are
    // exactly one per candidate.
    let result = rank_stage(records, tie_policy, weights)?;
    Ok(StageRun {
        config: config.clone(),
        result,
    })
}

/// Per-metric validation/test deltas and the pass verdict.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub val: MetricTriple,
    pub test: MetricTriple,
    pub deltas: MetricTriple,
    pub tolerance: f64,
    pub passed: bool,
}

/// Compare validation metrics against test metrics; passes iff every
/// absolute delta is at most `tolerance`.
pub fn verify_generalization(
    val: &MetricTriple,
    test: &MetricTriple,
    tolerance: f64,
) -> Result<VerificationReport> {
    if !tolerance.is_finite() || tolerance <= 0.0 {
        return Err(Error::NonPositiveTolerance { tolerance });
    }
    let deltas = abs_deltas(val, test);
    let passed = deltas.accuracy <= tolerance
        && deltas.sensitivity <= tolerance
        && deltas.specificity <= tolerance;
    Ok(VerificationReport {
        val: *val,
        test: *test,
        deltas,
        tolerance,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::MetricSet;

    fn config(candidates: &[&str]) -> StageConfig {
        StageConfig {
            stage_id: StageId::Stage1,
            candidates: candidates.iter().map(|s| s.to_string()).collect(),
            defaults: TrainingDefaults::stage1(),
        }
    }

    /// `quality` in (0, 1]: higher is strictly better on every metric, so
    /// the expected winner is unambiguous under any tie policy.
    fn record(name: &str, quality: f64) -> RunRecord {
        RunRecord::new(
            name,
            MetricSet::new(
                0.2 - 0.1 * quality,
                quality,
                1.0 - quality,
                quality,
                quality,
            )
            .unwrap(),
            None,
        )
        .unwrap()
    }

    #[test]
    fn stage1_defaults_pin_optimizer_and_loss() {
        let d = TrainingDefaults::stage1();
        assert_eq!(d.optimizer.as_deref(), Some("rmsprop"));
        assert_eq!(d.loss.as_deref(), Some("categorical cross-entropy"));
        assert_eq!(d.input_dims, [128, 128, 3]);
        assert_eq!(d.batch_size, 32);
        assert_eq!(d.epochs, 15);
        assert_eq!(d.dropout, 0.5);
        assert!(d.batch_norm_unfrozen);
    }

    #[test]
    fn run_stage_delegates_and_annotates() {
        let config = config(&["a", "b"]);
        let records = vec![record("a", 0.9), record("b", 0.8)];
        let run = run_stage(&config, &records, TiePolicy::Ordinal, &Weights::default()).unwrap();
        assert_eq!(run.config, config);
        assert_eq!(run.result.winner, "a");
        let direct = rank_stage(&records, TiePolicy::Ordinal, &Weights::default()).unwrap();
        assert_eq!(run.result, direct);
    }

    #[test]
    fn single_candidate_stage_wins_trivially() {
        let config = config(&["only"]);
        let run = run_stage(
            &config,
            &[record("only", 0.5)],
            TiePolicy::Ordinal,
            &Weights::default(),
        )
        .unwrap();
        assert_eq!(run.result.winner, "only");
        assert_eq!(run.result.rows[0].final_rank, 1);
    }

    #[test]
    fn fixture_pipeline_reproduces_the_selection_chain() {
        let weights = Weights::default();
        let stage1 = run_stage(
            &crate::fixtures::stage1_config().unwrap(),
            &crate::fixtures::table1_runs().unwrap(),
            TiePolicy::Ordinal,
            &weights,
        )
        .unwrap();
        assert_eq!(stage1.result.winner, "Xception");

        let stage2 = run_stage(
            &crate::fixtures::stage2_config().unwrap(),
            &crate::fixtures::table2_runs().unwrap(),
            TiePolicy::Ordinal,
            &weights,
        )
        .unwrap();
        assert_eq!(stage2.result.winner, "Adam, MSE");

        let (val, test) = crate::fixtures::generalization_triples().unwrap();
        let report = verify_generalization(&val, &test, DEFAULT_GENERALIZATION_TOLERANCE).unwrap();
        assert!(report.passed);
    }

    #[test]
    fn run_stage_rejects_unknown_and_mismatched() {
        let config = config(&["a", "b"]);
        let err = run_stage(
            &config,
            &[record("a", 0.9), record("zzz", 0.8)],
            TiePolicy::Ordinal,
            &Weights::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::UnknownCandidate { .. }));

        let err = run_stage(
            &config,
            &[record("a", 0.9)],
            TiePolicy::Ordinal,
            &Weights::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::CandidateCountMismatch { .. }));
    }

    #[test]
    fn verify_published_triples_pass_at_default_tolerance() {
        let val = MetricTriple::new(0.9015, 0.9413, 0.8560).unwrap();
        let test = MetricTriple::new(0.8748, 0.8952, 0.8561).unwrap();
        let report = verify_generalization(&val, &test, DEFAULT_GENERALIZATION_TOLERANCE).unwrap();
        assert!(report.passed);
        assert!((report.deltas.accuracy - 0.0267).abs() < 1e-9);
        assert!((report.deltas.sensitivity - 0.0461).abs() < 1e-9);
        assert!((report.deltas.specificity - 0.0001).abs() < 1e-9);
    }

    #[test]
    fn verify_identical_triples_pass() {
        let t = MetricTriple::new(0.5, 0.5, 0.5).unwrap();
        let report = verify_generalization(&t, &t, 0.001).unwrap();
        assert!(report.passed);
        assert_eq!(report.deltas.accuracy, 0.0);
    }

    #[test]
    fn verify_fails_past_tolerance() {
        let val = MetricTriple::new(0.9, 0.9, 0.9).unwrap();
        let test = MetricTriple::new(0.8, 0.9, 0.9).unwrap();
        let report = verify_generalization(&val, &test, 0.05).unwrap();
        assert!(!report.passed);
    }

    #[test]
    fn verify_is_symmetric() {
        let a = MetricTriple::new(0.9, 0.7, 0.6).unwrap();
        let b = MetricTriple::new(0.8, 0.75, 0.66).unwrap();
        let ab = verify_generalization(&a, &b, 0.05).unwrap();
        let ba = verify_generalization(&b, &a, 0.05).unwrap();
        assert_eq!(ab.passed, ba.passed);
        assert_eq!(ab.deltas, ba.deltas);
    }

    #[test]
    fn verify_rejects_bad_tolerance() {
        let t = MetricTriple::new(0.5, 0.5, 0.5).unwrap();
        assert!(matches!(
            verify_generalization(&t, &t, 0.0),
            Err(Error::NonPositiveTolerance { .. })
        ));
    }

    #[test]
    fn stage_config_json_round_trip() {
        let config = config(&["a", "b"]);
        let parsed = StageConfig::from_json(&config.to_json().unwrap()).unwrap();
        assert_eq!(parsed, config);
    }
}
