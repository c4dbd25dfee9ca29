//! End-to-end subcommand behavior through the real binary.

use std::path::Path;
use std::process::{Command, Output};

use fundus_select::augment::Image;
use fundus_select::dataset_plan::DatasetManifest;
use fundus_select::io::{parse_report_json, read_image, write_ppm};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fundus-select"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fundus-select"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).unwrap()
}

fn stderr(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).unwrap()
}

fn write_fixtures(dir: &Path) {
    let out = run(&["fixtures", "--output-dir", dir.to_str().unwrap()]);
    assert!(out.status.success(), "fixtures failed: {}", stderr(&out));
}

#[test]
fn split_prints_exact_counts() {
    let out = run(&["split", "--total", "11541", "--fractions", "0.6,0.2,0.2"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "6924 2308 2309\n");
}

#[test]
fn split_rejects_bad_fractions_on_stderr_only() {
    let out = run(&["split", "--total", "10", "--fractions", "0.5,0.2,0.2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).is_empty());
    assert!(stderr(&out).contains("fractions"));
}

#[test]
fn verify_pass_is_exit_zero() {
    let out = run(&[
        "verify",
        "--val",
        "0.9015,0.9413,0.8560",
        "--test",
        "0.8748,0.8952,0.8561",
        "--tolerance",
        "0.05",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("0.0267"));
    assert!(text.contains("0.0461"));
    assert!(text.contains("0.0001"));
    assert!(text.trim_end().ends_with("PASS"));
}

#[test]
fn verify_fail_is_exit_one_with_diagnostic() {
    let out = run(&[
        "verify",
        "--val",
        "0.9,0.9,0.9",
        "--test",
        "0.8,0.9,0.9",
        "--tolerance",
        "0.05",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).trim_end().ends_with("FAIL"));
    assert!(stderr(&out).contains("tolerance"));
}

#[test]
fn rank_missing_file_fails_cleanly() {
    let out = run(&["rank", "--runs", "does-not-exist.csv"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).is_empty());
    assert!(stderr(&out).contains("does-not-exist.csv"));
}

#[test]
fn unknown_subcommand_is_usage_error() {
    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("Usage") || stderr(&out).contains("usage"));
}

#[test]
fn fixtures_then_rank_mirrors_the_published_tables() {
    let dir = tempfile::tempdir().unwrap();
    write_fixtures(dir.path());
    for name in [
        "table1_runs.csv",
        "table2_runs.csv",
        "baseline_runs.csv",
        "generalization.csv",
        "dataset_plan.json",
        "stage1_config.json",
        "stage2_config.json",
    ] {
        assert!(dir.path().join(name).exists(), "missing fixture {name}");
    }

    let out = run_in(dir.path(), &["rank", "--runs", "table1_runs.csv"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.lines().nth(1).unwrap().starts_with("Xception"));
    assert!(text.contains("winner: Xception"));

    let out = run_in(dir.path(), &["rank", "--runs", "table2_runs.csv"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.lines().nth(1).unwrap().starts_with("RMS, CCE"));
    assert!(text.contains("winner: Adam, MSE"));
}

#[test]
fn report_json_round_trips_and_validates_roster() {
    let dir = tempfile::tempdir().unwrap();
    write_fixtures(dir.path());

    let out = run_in(
        dir.path(),
        &["report", "--runs", "table2_runs.csv", "--format", "json"],
    );
    assert!(out.status.success());
    let result = parse_report_json(&stdout(&out)).unwrap();
    assert_eq!(result.winner, "Adam, MSE");
    assert_eq!(result.stage_size(), 9);

    // Stage config with the wrong roster refuses the records.
    let out = run_in(
        dir.path(),
        &[
            "report",
            "--runs",
            "table2_runs.csv",
            "--stage-config",
            "stage1_config.json",
        ],
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("stage1"));

    let out = run_in(
        dir.path(),
        &[
            "report",
            "--runs",
            "table2_runs.csv",
            "--stage-config",
            "stage2_config.json",
        ],
    );
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("stage: stage2"));
    assert!(text.contains("Score"));
}

#[test]
fn plan_reports_totals_and_builds_manifest() {
    let dir = tempfile::tempdir().unwrap();
    write_fixtures(dir.path());
    let out = run_in(dir.path(), &["plan", "--config", "dataset_plan.json"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("healthy total: 5892"));
    assert!(text.contains("diseased total: 5649"));
    assert!(text.contains("grand total: 11541"));
    assert!(text.contains("train=6924 val=2308 test=2309"));

    let out = run_in(
        dir.path(),
        &[
            "plan",
            "--config",
            "dataset_plan.json",
            "--manifest-out",
            "manifest.json",
            "--seed",
            "42",
        ],
    );
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let manifest = DatasetManifest::from_json(
        &std::fs::read_to_string(dir.path().join("manifest.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(manifest.entries.len(), 11541);
    assert_eq!(manifest.seed, 42);
}

#[test]
fn metrics_from_predictions_reports_all_values() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("log.csv");
    std::fs::write(
        &log,
        "example_id,true_label,p_healthy,p_diseased\n\
         a,diseased,0.1,0.9\n\
         b,diseased,0.8,0.2\n\
         c,healthy,0.9,0.1\n\
         d,healthy,0.3,0.7\n",
    )
    .unwrap();
    let out = run(&[
        "metrics",
        "from-predictions",
        "--predictions",
        log.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("confusion: tp=1 fn=1 tn=1 fp=1"));
    assert!(text.contains("accuracy: 0.5000"));
    assert!(text.contains("sensitivity: 0.5000"));
    assert!(text.contains("specificity: 0.5000"));
    assert!(text.contains("cce:"));
    assert!(text.contains("mae:"));
}

#[test]
fn metrics_compare_matches_published_ratios() {
    let dir = tempfile::tempdir().unwrap();
    write_fixtures(dir.path());
    let out = run_in(
        dir.path(),
        &[
            "metrics",
            "compare",
            "--baseline",
            "baseline_runs.csv",
            "--final",
            "table2_runs.csv",
            "--final-model",
            "Adam, MSE",
        ],
    );
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("loss ratio (baseline/final): 7.5114"));
    assert!(text.contains("+0.8841"));
    assert!(text.contains("+0.2778"));
    assert!(text.contains("+0.5434"));
}

#[test]
fn augment_writes_deterministic_variants() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("eye.ppm");
    let pixels: Vec<u8> = (0..4 * 4 * 3).map(|i| (i * 5) as u8).collect();
    write_ppm(&input, &Image::new(4, 4, 3, pixels).unwrap()).unwrap();

    let args = [
        "augment",
        "--input",
        "eye.ppm",
        "--output-dir",
        "out",
        "--variants",
        "2",
        "--noise-configs",
        "1",
        "--seed",
        "3",
    ];
    let out = run_in(dir.path(), &args);
    assert!(out.status.success(), "stderr: {}", stderr(&out));

    let names = [
        "eye_o00_n00.ppm",
        "eye_o00_n01.ppm",
        "eye_o01_n00.ppm",
        "eye_o01_n01.ppm",
    ];
    let first: Vec<Image> = names
        .iter()
        .map(|n| read_image(&dir.path().join("out").join(n)).unwrap())
        .collect();
    for img in &first {
        assert_eq!((img.width(), img.height(), img.channels()), (4, 4, 3));
    }

    // Same seed, same bytes.
    let out = run_in(dir.path(), &args);
    assert!(out.status.success());
    for (name, before) in names.iter().zip(&first) {
        let again = read_image(&dir.path().join("out").join(name)).unwrap();
        assert_eq!(&again, before);
    }
}

#[test]
fn augment_resizes_and_truncates_pam_input() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("four.pam");
    let mut bytes =
        b"P7\nWIDTH 2\nHEIGHT 2\nDEPTH 4\nMAXVAL 255\nTUPLTYPE RGB_ALPHA\nENDHDR\n".to_vec();
    bytes.extend_from_slice(&[9u8; 16]);
    std::fs::write(&input, bytes).unwrap();

    let out = run_in(
        dir.path(),
        &[
            "augment",
            "--input",
            "four.pam",
            "--output-dir",
            "out",
            "--resize",
            "128x128",
        ],
    );
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let img = read_image(&dir.path().join("out").join("four_o00_n00.ppm")).unwrap();
    assert_eq!((img.width(), img.height(), img.channels()), (128, 128, 3));
    assert!(img.pixels().iter().all(|&v| v == 9));
}
