//! Bundled fixtures: the two published stage tables, the baseline row, the
//! validation/test generalization triples, the source dataset plan, and the
//! stage configs. Everything the selection pipeline needs to run offline.

use std::fs;
use std::path::{Path, PathBuf};

use crate::dataset_plan::PlanConfig;
use crate::error::{Error, Result};
use crate::io::{parse_runs, parse_triples};
use crate::metrics::{MetricSet, MetricTriple};
use crate::protocol::StageConfig;
use crate::ranking::RunRecord;

pub const TABLE1_RUNS_CSV: &str = "\
model,overfitting,val_accuracy,val_loss,sensitivity,specificity,params
Xception,0.0952,0.9008,0.3468,0.9407,0.8603,
Resnet50,0.0914,0.8925,1.4468,0.9613,0.8227,
Resnet50V2,0.1296,0.8219,0.792,0.9355,0.7066,
Resnet101,0.0968,0.8921,1.1475,0.9355,0.848,
Resnet101V2,0.1165,0.8618,0.7693,0.9226,0.8,
Resnet152,0.0892,0.8938,1.5941,0.8942,0.8934,
Resnet152V2,0.1064,0.8826,0.4262,0.9011,0.8638,
VGG16,0.0699,0.7552,2.2893,0.7498,0.7607,
VGG19,0.0751,0.7171,2.5212,0.5701,0.8664,
InceptionV3,0.0890,0.7773,0.457,0.8426,0.7109,
InceptionResNetV2,0.1004,0.7409,0.6184,0.6578,0.8253,
MobileNet,0.1202,0.8228,2.1897,0.9733,0.6699,
DenseNet121,0.0776,0.8193,0.7664,0.6939,0.9467,
DenseNet169,0.0438,0.6551,2.2782,0.3336,0.9817,
DenseNet201,0.0323,0.6937,4.342,0.7455,0.641,
NASNetLarge,0.0363,0.6308,3.2208,0.6784,0.5825,
NASNetMobile,0.0131,0.5789,2.9431,0.2614,0.9013,
";

pub const TABLE2_RUNS_CSV: &str = "\
model,overfitting,val_accuracy,val_loss,sensitivity,specificity,params
\"RMS, CCE\",0.1395,0.8098,0.6115,0.9587,0.6588,
\"RMS, MSE\",0.1118,0.8544,0.1195,0.8521,0.8568,
\"RMS, MAE\",0.0890,0.8011,0.2032,0.7325,0.8707,
\"Adam, CCE\",0.1097,0.8817,0.3780,0.9251,0.8399,
\"Adam, MSE\",0.0846,0.9015,0.0925,0.9413,0.8560,
\"Adam, MAE\",0.0783,0.8219,0.1827,0.8667,0.7222,
\"Adagrad, CCE\",0.1040,0.8528,0.3540,0.8418,0.8629,
\"Adagrad, MSE\",0.1158,0.8133,0.1416,0.9036,0.7213,
\"Adagrad, MAE\",0.0787,0.7595,0.2440,0.7825,0.7362,
";

/// Metrics of the randomly initialized reference model.
pub const BASELINE_RUNS_CSV: &str = "\
model,overfitting,val_accuracy,val_loss,sensitivity,specificity,params
Baseline,0.0223,0.5841,0.6948,0.4996,0.6699,
";

/// Validation and test triples of the stage-2 winner.
pub const GENERALIZATION_CSV: &str = "\
split,accuracy,sensitivity,specificity
val,0.9015,0.9413,0.8560
test,0.8748,0.8952,0.8561
";

/// The four source classes and their replication plans. The plain-copy
/// EYEPACS-DR plan (two extra copies per image) is the degenerate b=3, c=0.
pub const DATASET_PLAN_JSON: &str = r#"{
  "sources": [
    { "name": "ORIGA-healthy", "label": "healthy", "count": 482, "plan": { "b": 3, "c": 1 } },
    { "name": "ORIGA-glaucoma", "label": "diseased", "count": 168, "plan": { "b": 4, "c": 3 } },
    { "name": "EYEPACS-healthy", "label": "healthy", "count": 3000, "plan": { "b": 1, "c": 0 } },
    { "name": "EYEPACS-DR", "label": "diseased", "count": 987, "plan": { "b": 3, "c": 0 } }
  ],
  "split": { "train": 0.6, "val": 0.2, "test": 0.2 }
}
"#;

pub const STAGE1_CONFIG_JSON: &str = r#"{
  "stage_id": "stage1",
  "candidates": [
    "Xception",
    "Resnet50",
    "Resnet50V2",
    "Resnet101",
    "Resnet101V2",
    "Resnet152",
    "Resnet152V2",
    "VGG16",
    "VGG19",
    "InceptionV3",
    "InceptionResNetV2",
    "MobileNet",
    "DenseNet121",
    "DenseNet169",
    "DenseNet201",
    "NASNetLarge",
    "NASNetMobile"
  ],
  "defaults": {
    "input_dims": [128, 128, 3],
    "batch_size": 32,
    "epochs": 15,
    "dropout": 0.5,
    "head": "flatten, dropout 0.5, dense-2 softmax",
    "batch_norm_unfrozen": true,
    "optimizer": "rmsprop",
    "loss": "categorical cross-entropy"
  }
}
"#;

pub const STAGE2_CONFIG_JSON: &str = r#"{
  "stage_id": "stage2",
  "candidates": [
    "RMS, CCE",
    "RMS, MSE",
    "RMS, MAE",
    "Adam, CCE",
    "Adam, MSE",
    "Adam, MAE",
    "Adagrad, CCE",
    "Adagrad, MSE",
    "Adagrad, MAE"
  ],
  "defaults": {
    "input_dims": [128, 128, 3],
    "batch_size": 32,
    "epochs": 15,
    "dropout": 0.5,
    "head": "flatten, dropout 0.5, dense-2 softmax",
    "batch_norm_unfrozen": true,
    "optimizer": null,
    "loss": null
  }
}
"#;

pub fn table1_runs() -> Result<Vec<RunRecord>> {
    parse_runs(TABLE1_RUNS_CSV.as_bytes(), "table1_runs.csv")
}

pub fn table2_runs() -> Result<Vec<RunRecord>> {
    parse_runs(TABLE2_RUNS_CSV.as_bytes(), "table2_runs.csv")
}

pub fn baseline_metrics() -> Result<MetricSet> {
    let records = parse_runs(BASELINE_RUNS_CSV.as_bytes(), "baseline_runs.csv")?;
    Ok(records[0].metrics)
}

/// The bundled (val, test) triples.
pub fn generalization_triples() -> Result<(MetricTriple, MetricTriple)> {
    parse_triples(GENERALIZATION_CSV.as_bytes(), "generalization.csv")
}

pub fn dataset_plan() -> Result<PlanConfig> {
    PlanConfig::from_json(DATASET_PLAN_JSON)
}

pub fn stage1_config() -> Result<StageConfig> {
    StageConfig::from_json(STAGE1_CONFIG_JSON)
}

pub fn stage2_config() -> Result<StageConfig> {
    StageConfig::from_json(STAGE2_CONFIG_JSON)
}

/// Everything [`write_all`] emits, as (file name, content) pairs.
pub fn bundled_files() -> [(&'static str, &'static str); 7] {
    [
        ("table1_runs.csv", TABLE1_RUNS_CSV),
        ("table2_runs.csv", TABLE2_RUNS_CSV),
        ("baseline_runs.csv", BASELINE_RUNS_CSV),
        ("generalization.csv", GENERALIZATION_CSV),
        ("dataset_plan.json", DATASET_PLAN_JSON),
        ("stage1_config.json", STAGE1_CONFIG_JSON),
        ("stage2_config.json", STAGE2_CONFIG_JSON),
    ]
}

/// Write every bundled fixture into `dir`, creating it if needed. Returns
/// the written paths in bundle order.
pub fn write_all(dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
    let mut written = Vec::new();
    for (name, content) in bundled_files() {
        let path = dir.join(name);
        fs::write(&path, content).map_err(|e| Error::io(path.display().to_string(), e))?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table1_parses_with_expected_shape() {
        let records = table1_runs().unwrap();
        assert_eq!(records.len(), 17);
        assert_eq!(records[0].model_name, "Xception");
        assert_eq!(records[16].model_name, "NASNetMobile");
    }

    #[test]
    fn table2_first_row_matches_interface_example() {
        let records = table2_runs().unwrap();
        assert_eq!(records.len(), 9);
        assert_eq!(records[0].model_name, "RMS, CCE");
        assert_eq!(records[0].metrics.overfitting, 0.1395);
    }

    #[test]
    fn baseline_row_values() {
        let m = baseline_metrics().unwrap();
        assert_eq!(m.val_accuracy, 0.5841);
        assert_eq!(m.val_loss, 0.6948);
    }

    #[test]
    fn configs_match_their_tables() {
        let stage1 = stage1_config().unwrap();
        let table1 = table1_runs().unwrap();
        assert_eq!(stage1.candidates.len(), table1.len());
        for record in &table1 {
            assert!(stage1.candidates.contains(&record.model_name));
        }

        let stage2 = stage2_config().unwrap();
        let table2 = table2_runs().unwrap();
        assert_eq!(stage2.candidates.len(), table2.len());
        for record in &table2 {
            assert!(stage2.candidates.contains(&record.model_name));
        }
    }

    #[test]
    fn plan_matches_published_counts() {
        let plan = dataset_plan().unwrap();
        let totals = crate::dataset_plan::class_totals(&plan.pairs().unwrap()).unwrap();
        assert_eq!(totals.healthy, 5892);
        assert_eq!(totals.diseased, 5649);
        assert_eq!(totals.grand, 11541);
    }

    #[test]
    fn write_all_emits_every_bundle_file() {
        let dir = tempfile::tempdir().unwrap();
        let written = write_all(dir.path()).unwrap();
        assert_eq!(written.len(), bundled_files().len());
        for path in written {
            assert!(path.exists());
        }
    }
}
