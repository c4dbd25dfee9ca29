//! Non-parametric per-metric ranking and the weighted overall score that
//! orders candidate models within a stage.
//!
//! Rank 1 always goes to the highest metric value and rank N to the lowest.
//! Desirable metrics (accuracy, sensitivity, specificity) enter the score as
//! `N + 1 - rank`; undesirable ones (overfitting, loss) enter as the raw
//! rank, so a model ranked near N on overfitting (overfitting little)
//! is rewarded. The highest overall score wins; score ties fall to the model
//! with fewer parameters.
//!
//! Loss values are ranked as given. When candidates were trained with
//! different loss functions the ranks still compare the raw values, with no
//! rescaling across loss kinds.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{MetricKind, MetricSet};

/// One externally produced experiment result: a model identifier, its five
/// evaluation metrics, and optionally its total parameter count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub model_name: String,
    pub metrics: MetricSet,
    pub param_count: Option<u64>,
}

impl RunRecord {
    pub fn new(
        model_name: impl Into<String>,
        metrics: MetricSet,
        param_count: Option<u64>,
    ) -> Result<Self> {
        let model_name = model_name.into();
        if model_name.is_empty() {
            return Err(Error::EmptyModelName);
        }
        Ok(Self {
            model_name,
            metrics,
            param_count,
        })
    }
}

/// Rule for assigning ranks to equal metric values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TiePolicy {
    /// Equal values receive consecutive integer ranks in input order.
    #[default]
    Ordinal,
    /// Equal values all receive the mean of the spanned ranks.
    Average,
    /// Equal values all receive the minimum spanned rank.
    Competition,
}

impl TiePolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            TiePolicy::Ordinal => "ordinal",
            TiePolicy::Average => "average",
            TiePolicy::Competition => "competition",
        }
    }
}

impl fmt::Display for TiePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TiePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ordinal" => Ok(TiePolicy::Ordinal),
            "average" => Ok(TiePolicy::Average),
            "competition" => Ok(TiePolicy::Competition),
            other => Err(Error::InvalidValue {
                what: "tie policy",
                value: other.to_string(),
                expected: "ordinal, average, competition",
            }),
        }
    }
}

/// Per-metric weights of the overall score.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Weights {
    pub overfitting: f64,
    pub accuracy: f64,
    pub loss: f64,
    pub sensitivity: f64,
    pub specificity: f64,
}

impl Weights {
    pub fn new(
        overfitting: f64,
        accuracy: f64,
        loss: f64,
        sensitivity: f64,
        specificity: f64,
    ) -> Result<Self> {
        for (what, value) in [
            ("overfitting", overfitting),
            ("accuracy", accuracy),
            ("loss", loss),
            ("sensitivity", sensitivity),
            ("specificity", specificity),
        ] {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidWeight { what, value });
            }
        }
        Ok(Self {
            overfitting,
            accuracy,
            loss,
            sensitivity,
            specificity,
        })
    }

    fn for_kind(&self, kind: MetricKind) -> f64 {
        match kind {
            MetricKind::Overfitting => self.overfitting,
            MetricKind::ValAccuracy => self.accuracy,
            MetricKind::ValLoss => self.loss,
            MetricKind::Sensitivity => self.sensitivity,
            MetricKind::Specificity => self.specificity,
        }
    }
}

impl Default for Weights {
    fn default() -> Self {
        Self {
            overfitting: 3.0,
            accuracy: 2.0,
            loss: 1.5,
            sensitivity: 1.0,
            specificity: 0.25,
        }
    }
}

impl fmt::Display for Weights {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "overfitting={}, accuracy={}, loss={}, sensitivity={}, specificity={}",
            self.overfitting, self.accuracy, self.loss, self.sensitivity, self.specificity
        )
    }
}

/// One model's rank on each of the five metrics. Fractional values occur
/// under the `average` tie policy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankVector {
    pub overfitting: f64,
    pub accuracy: f64,
    pub loss: f64,
    pub sensitivity: f64,
    pub specificity: f64,
}

impl RankVector {
    fn get(&self, kind: MetricKind) -> f64 {
        match kind {
            MetricKind::Overfitting => self.overfitting,
            MetricKind::ValAccuracy => self.accuracy,
            MetricKind::ValLoss => self.loss,
            MetricKind::Sensitivity => self.sensitivity,
            MetricKind::Specificity => self.specificity,
        }
    }
}

/// The five weighted terms of the overall score and their total.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreBreakdown {
    pub overfit_term: f64,
    pub accuracy_term: f64,
    pub loss_term: f64,
    pub sensitivity_term: f64,
    pub specificity_term: f64,
    pub total: f64,
    pub weights: Weights,
    pub stage_size: usize,
}

/// One leaderboard row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedModel {
    pub record: RunRecord,
    /// Position of this record in the input list; table renderers use it to
    /// mirror the input row order.
    pub input_index: usize,
    pub ranks: RankVector,
    pub score: ScoreBreakdown,
    pub final_rank: usize,
}

/// The ordered leaderboard of one stage, best model first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageResult {
    pub rows: Vec<RankedModel>,
    pub winner: String,
    pub tie_policy: TiePolicy,
}

impl StageResult {
    pub fn stage_size(&self) -> usize {
        self.rows.len()
    }

    pub fn weights(&self) -> Weights {
        self.rows
            .first()
            .map(|r| r.score.weights)
            .unwrap_or_default()
    }

    /// Final rank of each input record, in the order the records were given.
    pub fn final_rank_of(&self, model_name: &str) -> Option<usize> {
        self.rows
            .iter()
            .find(|r| r.record.model_name == model_name)
            .map(|r| r.final_rank)
    }
}

/// Rank a list of metric values: rank 1 for the largest, rank N for the
/// smallest, ties resolved per policy. Output is aligned with input order.
pub fn metric_ranks(values: &[f64], tie_policy: TiePolicy) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::NoRecords);
    }
    for (index, v) in values.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFiniteValue { index });
        }
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| {
        values[b]
            .partial_cmp(&values[a])
            .expect("values are finite")
            .then(a.cmp(&b))
    });
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        let first = (start + 1) as f64;
        let last = end as f64;
        for (offset, &idx) in order[start..end].iter().enumerate() {
            ranks[idx] = match tie_policy {
                TiePolicy::Ordinal => first + offset as f64,
                TiePolicy::Average => (first + last) / 2.0,
                TiePolicy::Competition => first,
            };
        }
        start = end;
    }
    Ok(ranks)
}

/// Combine one model's five ranks into its weighted overall score for a
/// stage of `n` models.
pub fn overall_score(ranks: &RankVector, n: usize, weights: &Weights) -> Result<ScoreBreakdown> {
    let term = |kind: MetricKind| -> Result<f64> {
        let rank = ranks.get(kind);
        if !rank.is_finite() || rank < 1.0 || rank > n as f64 {
            return Err(Error::RankOutOfRange { rank, n });
        }
        let shifted = if kind.higher_is_better() {
            (n + 1) as f64 - rank
        } else {
            rank
        };
        Ok(weights.for_kind(kind) * shifted)
    };
    let overfit_term = term(MetricKind::Overfitting)?;
    let accuracy_term = term(MetricKind::ValAccuracy)?;
    let loss_term = term(MetricKind::ValLoss)?;
    let sensitivity_term = term(MetricKind::Sensitivity)?;
    let specificity_term = term(MetricKind::Specificity)?;
    Ok(ScoreBreakdown {
        overfit_term,
        accuracy_term,
        loss_term,
        sensitivity_term,
        specificity_term,
        total: overfit_term + accuracy_term + loss_term + sensitivity_term + specificity_term,
        weights: *weights,
        stage_size: n,
    })
}

/// Rank every record on every metric, score them, and produce the ordered
/// leaderboard. Equal totals are ordered by ascending parameter count; a
/// score tie where any tied record lacks a parameter count is an error.
pub fn rank_stage(
    records: &[RunRecord],
    tie_policy: TiePolicy,
    weights: &Weights,
) -> Result<StageResult> {
    if records.is_empty() {
        return Err(Error::NoRecords);
    }
    let mut seen = HashSet::new();
    for record in records {
        if !seen.insert(record.model_name.as_str()) {
            return Err(Error::DuplicateModel {
                name: record.model_name.clone(),
            });
        }
    }

    let n = records.len();
    let rank_column = |kind: MetricKind| -> Result<Vec<f64>> {
        let values: Vec<f64> = records.iter().map(|r| kind.of(&r.metrics)).collect();
        metric_ranks(&values, tie_policy)
    };
    let overfit = rank_column(MetricKind::Overfitting)?;
    let accuracy = rank_column(MetricKind::ValAccuracy)?;
    let loss = rank_column(MetricKind::ValLoss)?;
    let sensitivity = rank_column(MetricKind::Sensitivity)?;
    let specificity = rank_column(MetricKind::Specificity)?;

    let mut scored = Vec::with_capacity(n);
    for i in 0..n {
        let ranks = RankVector {
            overfitting: overfit[i],
            accuracy: accuracy[i],
            loss: loss[i],
            sensitivity: sensitivity[i],
            specificity: specificity[i],
        };
        let score = overall_score(&ranks, n, weights)?;
        scored.push((i, ranks, score));
    }

    // Order by descending total; break exact score ties by ascending
    // parameter count, which must be present on every tied record.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        scored[b]
            .2
            .total
            .partial_cmp(&scored[a].2.total)
            .expect("totals are finite")
            .then(a.cmp(&b))
    });
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && scored[order[end]].2.total == scored[order[start]].2.total {
            end += 1;
        }
        if end - start > 1 {
            let group = &mut order[start..end];
            if group.iter().any(|&i| records[i].param_count.is_none()) {
                return Err(Error::UnbrokenScoreTie {
                    total: scored[group[0]].2.total,
                    names: group
                        .iter()
                        .map(|&i| records[i].model_name.clone())
                        .collect(),
                });
            }
            group.sort_by_key(|&i| (records[i].param_count.expect("checked above"), i));
        }
        start = end;
    }

    let rows: Vec<RankedModel> = order
        .iter()
        .enumerate()
        .map(|(position, &i)| RankedModel {
            record: records[i].clone(),
            input_index: i,
            ranks: scored[i].1,
            score: scored[i].2,
            final_rank: position + 1,
        })
        .collect();
    let winner = rows[0].record.model_name.clone();
    Ok(StageResult {
        rows,
        winner,
        tie_policy,
    })
}
