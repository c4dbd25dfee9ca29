//! Evaluation metrics for the binary healthy/diseased task: confusion-matrix
//! counts and ratios, the train-minus-validation overfitting measure, loss
//! values over prediction logs, and the comparison quantities used for
//! generalization checks and baseline reports.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Probabilities below this are clamped before the cross-entropy log so the
/// value stays finite.
pub const CCE_EPSILON: f64 = 1e-12;

/// Binary class label. `Diseased` is the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Healthy,
    Diseased,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Healthy => "healthy",
            Label::Diseased => "diseased",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "healthy" => Ok(Label::Healthy),
            "diseased" => Ok(Label::Diseased),
            other => Err(Error::InvalidValue {
                what: "label",
                value: other.to_string(),
                expected: "healthy, diseased",
            }),
        }
    }
}

/// One labelled example with its predicted class probabilities.
///
/// The pair must sum to 1 within 1e-6 and each component must lie in [0, 1];
/// construction enforces this, so downstream code never sees a malformed pair.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionRecord {
    example_id: String,
    true_label: Label,
    p_healthy: f64,
    p_diseased: f64,
}

impl PredictionRecord {
    pub fn new(
        example_id: impl Into<String>,
        true_label: Label,
        p_healthy: f64,
        p_diseased: f64,
    ) -> Result<Self> {
        let example_id = example_id.into();
        let check = |name: &str, p: f64| -> Result<()> {
            if !p.is_finite() || !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidPrediction {
                    example_id: example_id.clone(),
                    reason: format!("{name} must be in [0, 1], got {p}"),
                });
            }
            Ok(())
        };
        check("p_healthy", p_healthy)?;
        check("p_diseased", p_diseased)?;
        if (p_healthy + p_diseased - 1.0).abs() > 1e-6 {
            return Err(Error::InvalidPrediction {
                example_id,
                reason: format!(
                    "probabilities must sum to 1 within 1e-6, got {p_healthy} + {p_diseased}"
                ),
            });
        }
        Ok(Self {
            example_id,
            true_label,
            p_healthy,
            p_diseased,
        })
    }

    pub fn example_id(&self) -> &str {
        &self.example_id
    }

    pub fn true_label(&self) -> Label {
        self.true_label
    }

    pub fn p_healthy(&self) -> f64 {
        self.p_healthy
    }

    pub fn p_diseased(&self) -> f64 {
        self.p_diseased
    }
}

/// Counts of a binary confusion matrix. Diseased is positive: `tp` counts
/// diseased records predicted diseased, `tn` healthy records predicted healthy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub fn_: u64,
    pub tn: u64,
    pub fp: u64,
}

impl ConfusionMatrix {
    pub fn new(tp: u64, fn_: u64, tn: u64, fp: u64) -> Self {
        Self { tp, fn_, tn, fp }
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fn_ + self.tn + self.fp
    }

    /// Fraction of records classified correctly.
    pub fn accuracy(&self) -> Result<f64> {
        let total = self.total();
        if total == 0 {
            return Err(Error::EmptyConfusion);
        }
        Ok((self.tp + self.tn) as f64 / total as f64)
    }

    /// True positives over all positives. Errors when no diseased records
    /// exist rather than silently reporting 0.
    pub fn sensitivity(&self) -> Result<f64> {
        let positives = self.tp + self.fn_;
        if positives == 0 {
            return Err(Error::UndefinedSensitivity);
        }
        Ok(self.tp as f64 / positives as f64)
    }

    /// True negatives over all negatives. Errors when no healthy records exist.
    pub fn specificity(&self) -> Result<f64> {
        let negatives = self.tn + self.fp;
        if negatives == 0 {
            return Err(Error::UndefinedSpecificity);
        }
        Ok(self.tn as f64 / negatives as f64)
    }
}

/// Build a confusion matrix by hard-labelling each record: predicted diseased
/// iff `p_diseased >= threshold`. Ties resolve to diseased, biasing toward
/// sensitivity.
pub fn confusion_from_predictions(
    records: &[PredictionRecord],
    threshold: f64,
) -> Result<ConfusionMatrix> {
    if records.is_empty() {
        return Err(Error::NoRecords);
    }
    if !threshold.is_finite() || !(0.0..=1.0).contains(&threshold) {
        return Err(Error::OutOfRange {
            what: "threshold".to_string(),
            value: threshold,
            min: 0.0,
            max: 1.0,
        });
    }
    let mut cm = ConfusionMatrix::new(0, 0, 0, 0);
    for record in records {
        let predicted_diseased = record.p_diseased >= threshold;
        match (record.true_label, predicted_diseased) {
            (Label::Diseased, true) => cm.tp += 1,
            (Label::Diseased, false) => cm.fn_ += 1,
            (Label::Healthy, false) => cm.tn += 1,
            (Label::Healthy, true) => cm.fp += 1,
        }
    }
    Ok(cm)
}

/// Train accuracy minus validation accuracy; negative when validation wins.
pub fn overfitting(train_accuracy: f64, val_accuracy: f64) -> Result<f64> {
    for (name, v) in [
        ("train_accuracy", train_accuracy),
        ("val_accuracy", val_accuracy),
    ] {
        if !v.is_finite() || !(0.0..=1.0).contains(&v) {
            return Err(Error::OutOfRange {
                what: name.to_string(),
                value: v,
                min: 0.0,
                max: 1.0,
            });
        }
    }
    Ok(train_accuracy - val_accuracy)
}

/// Loss functions computable from a prediction log.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LossKind {
    /// Mean over records of -ln(probability assigned to the true class),
    /// probabilities clamped to [`CCE_EPSILON`], 1].
    Cce,
    /// Mean over records and both class components of (p - y)^2.
    Mse,
    /// Mean over records and both class components of |p - y|.
    Mae,
}

impl LossKind {
    pub fn as_str(self) -> &'static str {
        match self {
            LossKind::Cce => "cce",
            LossKind::Mse => "mse",
            LossKind::Mae => "mae",
        }
    }
}

impl fmt::Display for LossKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LossKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cce" => Ok(LossKind::Cce),
            "mse" => Ok(LossKind::Mse),
            "mae" => Ok(LossKind::Mae),
            other => Err(Error::InvalidValue {
                what: "loss kind",
                value: other.to_string(),
                expected: "cce, mse, mae",
            }),
        }
    }
}

/// Evaluate one loss over a prediction log. All three are per-record means,
/// so the value is comparable across dataset sizes.
pub fn loss_value(records: &[PredictionRecord], kind: LossKind) -> Result<f64> {
    if records.is_empty() {
        return Err(Error::NoRecords);
    }
    let n = records.len() as f64;
    let total: f64 = records
        .iter()
        .map(|r| {
            let (y_healthy, y_diseased) = match r.true_label {
                Label::Healthy => (1.0, 0.0),
                Label::Diseased => (0.0, 1.0),
            };
            match kind {
                LossKind::Cce => {
                    let p_true = match r.true_label {
                        Label::Healthy => r.p_healthy,
                        Label::Diseased => r.p_diseased,
                    };
                    -p_true.clamp(CCE_EPSILON, 1.0).ln()
                }
                LossKind::Mse => {
                    ((r.p_healthy - y_healthy).powi(2) + (r.p_diseased - y_diseased).powi(2)) / 2.0
                }
                LossKind::Mae => {
                    ((r.p_healthy - y_healthy).abs() + (r.p_diseased - y_diseased).abs()) / 2.0
                }
            }
        })
        .sum();
    Ok(total / n)
}

/// The five evaluation metrics of one trained-model run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSet {
    pub overfitting: f64,
    pub val_accuracy: f64,
    pub val_loss: f64,
    pub sensitivity: f64,
    pub specificity: f64,
}

impl MetricSet {
    pub fn new(
        overfitting: f64,
        val_accuracy: f64,
        val_loss: f64,
        sensitivity: f64,
        specificity: f64,
    ) -> Result<Self> {
        let range = |what: &str, v: f64, min: f64, max: f64| -> Result<()> {
            if !v.is_finite() || v < min || v > max {
                return Err(Error::OutOfRange {
                    what: what.to_string(),
                    value: v,
                    min,
                    max,
                });
            }
            Ok(())
        };
        range("overfitting", overfitting, -1.0, 1.0)?;
        range("val_accuracy", val_accuracy, 0.0, 1.0)?;
        range("val_loss", val_loss, 0.0, f64::INFINITY)?;
        range("sensitivity", sensitivity, 0.0, 1.0)?;
        range("specificity", specificity, 0.0, 1.0)?;
        Ok(Self {
            overfitting,
            val_accuracy,
            val_loss,
            sensitivity,
            specificity,
        })
    }
}

/// Identifies one of the five evaluation metrics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    Overfitting,
    ValAccuracy,
    ValLoss,
    Sensitivity,
    Specificity,
}

impl MetricKind {
    pub const ALL: [MetricKind; 5] = [
        MetricKind::Overfitting,
        MetricKind::ValAccuracy,
        MetricKind::ValLoss,
        MetricKind::Sensitivity,
        MetricKind::Specificity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MetricKind::Overfitting => "overfitting",
            MetricKind::ValAccuracy => "val_accuracy",
            MetricKind::ValLoss => "val_loss",
            MetricKind::Sensitivity => "sensitivity",
            MetricKind::Specificity => "specificity",
        }
    }

    /// Overfitting and loss are undesirable; the other three are desirable.
    pub fn higher_is_better(self) -> bool {
        matches!(
            self,
            MetricKind::ValAccuracy | MetricKind::Sensitivity | MetricKind::Specificity
        )
    }

    pub fn of(self, metrics: &MetricSet) -> f64 {
        match self {
            MetricKind::Overfitting => metrics.overfitting,
            MetricKind::ValAccuracy => metrics.val_accuracy,
            MetricKind::ValLoss => metrics.val_loss,
            MetricKind::Sensitivity => metrics.sensitivity,
            MetricKind::Specificity => metrics.specificity,
        }
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// An (accuracy, sensitivity, specificity) triple as reported for one split.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricTriple {
    pub accuracy: f64,
    pub sensitivity: f64,
    pub specificity: f64,
}

impl MetricTriple {
    pub fn new(accuracy: f64, sensitivity: f64, specificity: f64) -> Result<Self> {
        for (name, v) in [
            ("accuracy", accuracy),
            ("sensitivity", sensitivity),
            ("specificity", specificity),
        ] {
            if !v.is_finite() || !(0.0..=1.0).contains(&v) {
                return Err(Error::OutOfRange {
                    what: name.to_string(),
                    value: v,
                    min: 0.0,
                    max: 1.0,
                });
            }
        }
        Ok(Self {
            accuracy,
            sensitivity,
            specificity,
        })
    }
}

/// Component-wise |val - test| over two metric triples.
pub fn abs_deltas(val: &MetricTriple, test: &MetricTriple) -> MetricTriple {
    MetricTriple {
        accuracy: (val.accuracy - test.accuracy).abs(),
        sensitivity: (val.sensitivity - test.sensitivity).abs(),
        specificity: (val.specificity - test.specificity).abs(),
    }
}

/// Final-versus-baseline comparison for one metric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricComparison {
    pub kind: MetricKind,
    pub baseline: f64,
    pub final_value: f64,
    pub abs_delta: f64,
    /// (final - baseline) / baseline; `None` when the baseline is not
    /// strictly positive.
    pub relative_change: Option<f64>,
}

/// Per-metric deltas and relative changes of a final run against a baseline,
/// plus the loss ratio baseline/final.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub comparisons: [MetricComparison; 5],
    /// baseline.val_loss / final.val_loss; `None` when the final loss is 0.
    pub loss_ratio: Option<f64>,
}

impl ComparisonReport {
    pub fn get(&self, kind: MetricKind) -> &MetricComparison {
        self.comparisons
            .iter()
            .find(|c| c.kind == kind)
            .expect("all five kinds present")
    }
}

/// Compare a final run against a baseline run metric by metric. Undefined
/// ratios become `None` markers rather than errors.
pub fn relative_comparison(final_: &MetricSet, baseline: &MetricSet) -> ComparisonReport {
    let comparisons = MetricKind::ALL.map(|kind| {
        let b = kind.of(baseline);
        let f = kind.of(final_);
        MetricComparison {
            kind,
            baseline: b,
            final_value: f,
            abs_delta: (f - b).abs(),
            relative_change: (b > 0.0).then(|| (f - b) / b),
        }
    });
    let loss_ratio = (final_.val_loss > 0.0).then(|| baseline.val_loss / final_.val_loss);
    ComparisonReport {
        comparisons,
        loss_ratio,
    }
}
