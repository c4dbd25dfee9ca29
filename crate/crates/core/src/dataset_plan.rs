//! Dataset balancing arithmetic and deterministic split assignment: how many
//! augmented copies each source class contributes, and which replicated image
//! lands in the train, validation, or test set.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::Label;
use crate::rng::{chacha8_from_seed, shuffle, GENERATOR_ID};

/// One class of source images, e.g. the healthy half of a public dataset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassSource {
    pub source_name: String,
    pub label: Label,
    pub image_count: u64,
}

impl ClassSource {
    pub fn new(source_name: impl Into<String>, label: Label, image_count: u64) -> Result<Self> {
        let source_name = source_name.into();
        if image_count == 0 {
            return Err(Error::EmptySource { name: source_name });
        }
        Ok(Self {
            source_name,
            label,
            image_count,
        })
    }
}

/// Replication plan: `b` orientation/zoom variants, each with a control plus
/// `c` noise variants, so one image becomes `b * (c + 1)` images. A plain
/// copy plan is the degenerate case `c = 0` (factor `b`, no pixel change).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AugmentationPlan {
    b: u64,
    c: u64,
}

impl AugmentationPlan {
    pub fn new(b: u64, c: u64) -> Result<Self> {
        if b == 0 {
            return Err(Error::ZeroOrientationCount);
        }
        Ok(Self { b, c })
    }

    pub fn b(&self) -> u64 {
        self.b
    }

    pub fn c(&self) -> u64 {
        self.c
    }

    /// `b * (c + 1)`, overflow-checked.
    pub fn replication_factor(&self) -> Result<u64> {
        self.c
            .checked_add(1)
            .and_then(|c1| self.b.checked_mul(c1))
            .ok_or_else(|| Error::CountOverflow {
                what: format!(
                    "replication factor b({b}) * (c({c}) + 1)",
                    b = self.b,
                    c = self.c
                ),
            })
    }
}

/// Number of images a source yields after replication.
pub fn augmented_count(source: &ClassSource, plan: &AugmentationPlan) -> Result<u64> {
    let factor = plan.replication_factor()?;
    source
        .image_count
        .checked_mul(factor)
        .ok_or_else(|| Error::CountOverflow {
            what: format!(
                "augmented count {} * {} for source `{}`",
                source.image_count, factor, source.source_name
            ),
        })
}

/// Augmented totals grouped by class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassTotals {
    pub healthy: u64,
    pub diseased: u64,
    pub grand: u64,
}

/// Sum augmented counts over all (source, plan) pairs, grouped by label.
pub fn class_totals(pairs: &[(ClassSource, AugmentationPlan)]) -> Result<ClassTotals> {
    if pairs.is_empty() {
        return Err(Error::NoRecords);
    }
    let mut totals = ClassTotals {
        healthy: 0,
        diseased: 0,
        grand: 0,
    };
    for (source, plan) in pairs {
        let count = augmented_count(source, plan)?;
        let bucket = match source.label {
            Label::Healthy => &mut totals.healthy,
            Label::Diseased => &mut totals.diseased,
        };
        *bucket = bucket
            .checked_add(count)
            .ok_or_else(|| Error::CountOverflow {
                what: format!("{} class total", source.label),
            })?;
        totals.grand = totals
            .grand
            .checked_add(count)
            .ok_or_else(|| Error::CountOverflow {
                what: "grand total".to_string(),
            })?;
    }
    Ok(totals)
}

/// Raw split fractions as they appear in config files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitFractions {
    pub train: f64,
    pub val: f64,
    pub test: f64,
}

/// Validated train/val/test fractions summing to 1 within 1e-9.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SplitFractions", into = "SplitFractions")]
pub struct SplitSpec {
    train: f64,
    val: f64,
    test: f64,
}

impl SplitSpec {
    pub fn new(train: f64, val: f64, test: f64) -> Result<Self> {
        let ok = [train, val, test]
            .iter()
            .all(|f| f.is_finite() && *f >= 0.0)
            && (train + val + test - 1.0).abs() <= 1e-9;
        if !ok {
            return Err(Error::InvalidSplitSpec { train, val, test });
        }
        Ok(Self { train, val, test })
    }

    pub fn train(&self) -> f64 {
        self.train
    }

    pub fn val(&self) -> f64 {
        self.val
    }

    pub fn test(&self) -> f64 {
        self.test
    }
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            train: 0.6,
            val: 0.2,
            test: 0.2,
        }
    }
}

impl TryFrom<SplitFractions> for SplitSpec {
    type Error = Error;

    fn try_from(f: SplitFractions) -> Result<Self> {
        SplitSpec::new(f.train, f.val, f.test)
    }
}

impl From<SplitSpec> for SplitFractions {
    fn from(s: SplitSpec) -> Self {
        SplitFractions {
            train: s.train,
            val: s.val,
            test: s.test,
        }
    }
}

/// Per-split counts; always sums to the allocated total.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitCounts {
    pub train: u64,
    pub val: u64,
    pub test: u64,
}

// f64 represents integers exactly up to 2^53; counts beyond that would make
// the floor arithmetic silently wrong.
const MAX_SPLIT_TOTAL: u64 = 1 << 53;

/// Allocate a total into (train, val, test) counts: train and val round down,
/// test takes the remainder, so the counts always sum to the total.
pub fn allocate_split(total: u64, spec: &SplitSpec) -> Result<SplitCounts> {
    if total == 0 {
        return Err(Error::EmptySplitTotal);
    }
    if total > MAX_SPLIT_TOTAL {
        return Err(Error::CountOverflow {
            what: format!("split of total {total}"),
        });
    }
    let train = (total as f64 * spec.train).floor() as u64;
    let val = (total as f64 * spec.val).floor() as u64;
    let test = total
        .checked_sub(train)
        .and_then(|rest| rest.checked_sub(val))
        .ok_or(Error::NegativeSplit { total })?;
    Ok(SplitCounts { train, val, test })
}

/// Which split an entry belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Val,
    Test,
}

impl Split {
    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::Test => "test",
        }
    }
}

/// One replicated image reference with its label, origin, and assigned split.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    #[serde(rename = "ref")]
    pub image_ref: String,
    pub label: Label,
    pub source: String,
    pub split: Split,
}

/// The full shuffled assignment of every replicated image to a split.
/// Serializing the same manifest twice yields identical bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub seed: u64,
    /// Shuffle recipe identifier; see [`crate::rng`].
    pub generator: String,
    pub spec: SplitSpec,
    pub entries: Vec<ManifestEntry>,
}

impl DatasetManifest {
    pub fn counts(&self) -> SplitCounts {
        let mut counts = SplitCounts {
            train: 0,
            val: 0,
            test: 0,
        };
        for entry in &self.entries {
            match entry.split {
                Split::Train => counts.train += 1,
                Split::Val => counts.val += 1,
                Split::Test => counts.test += 1,
            }
        }
        counts
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Expand every source into its replicated image references, shuffle them
/// with the seeded generator, and assign the leading entries to train, the
/// next block to val, and the remainder to test.
pub fn build_manifest(
    pairs: &[(ClassSource, AugmentationPlan)],
    spec: &SplitSpec,
    seed: u64,
) -> Result<DatasetManifest> {
    let totals = class_totals(pairs)?;
    let total_usize = usize::try_from(totals.grand).map_err(|_| Error::CountOverflow {
        what: format!("manifest of {} entries", totals.grand),
    })?;
    let counts = allocate_split(totals.grand, spec)?;

    let mut entries = Vec::with_capacity(total_usize);
    for (source, plan) in pairs {
        let factor = plan.replication_factor()?;
        for image_index in 0..source.image_count {
            for variant in 0..factor {
                entries.push(ManifestEntry {
                    image_ref: format!("{}/{:06}/v{:02}", source.source_name, image_index, variant),
                    label: source.label,
                    source: source.source_name.clone(),
                    split: Split::Train,
                });
            }
        }
    }

    let mut rng = chacha8_from_seed(seed);
    shuffle(&mut rng, &mut entries);

    let train_end = counts.train as usize;
    let val_end = train_end + counts.val as usize;
    for (i, entry) in entries.iter_mut().enumerate() {
        entry.split = if i < train_end {
            Split::Train
        } else if i < val_end {
            Split::Val
        } else {
            Split::Test
        };
    }

    Ok(DatasetManifest {
        seed,
        generator: GENERATOR_ID.to_string(),
        spec: *spec,
        entries,
    })
}

/// JSON-facing description of one source and its plan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanSource {
    pub name: String,
    pub label: Label,
    pub count: u64,
    pub plan: PlanFactors,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanFactors {
    pub b: u64,
    pub c: u64,
}

/// A small JSON config listing sources, plans, and split fractions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanConfig {
    pub sources: Vec<PlanSource>,
    #[serde(default)]
    pub split: Option<SplitSpec>,
}

impl PlanConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Validated (source, plan) pairs in config order.
    pub fn pairs(&self) -> Result<Vec<(ClassSource, AugmentationPlan)>> {
        self.sources
            .iter()
            .map(|s| {
                Ok((
                    ClassSource::new(s.name.clone(), s.label, s.count)?,
                    AugmentationPlan::new(s.plan.b, s.plan.c)?,
                ))
            })
            .collect()
    }

    pub fn split_spec(&self) -> SplitSpec {
        self.split.unwrap_or_default()
    }
}
