//! End-to-end acceptance: fixtures + rank on both stage tables + verify
//! reproduce the full selection chain from a clean directory, offline.

use std::path::Path;
use std::process::{Command, Output};

fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fundus-select"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn acceptance_8_end_to_end_selection_chain() {
    let dir = tempfile::tempdir().unwrap();

    let fixtures = run_in(dir.path(), &["fixtures", "--output-dir", "."]);
    let stage1 = run_in(dir.path(), &["rank", "--runs", "table1_runs.csv"]);
    let stage2 = run_in(dir.path(), &["rank", "--runs", "table2_runs.csv"]);
    let verify = run_in(
        dir.path(),
        &[
            "verify",
            "--val",
            "0.9015,0.9413,0.8560",
            "--test",
            "0.8748,0.8952,0.8561",
            "--tolerance",
            "0.05",
        ],
    );

    let stage1_out = String::from_utf8(stage1.stdout.clone()).unwrap();
    let stage2_out = String::from_utf8(stage2.stdout.clone()).unwrap();
    let verify_out = String::from_utf8(verify.stdout.clone()).unwrap();

    let passed = fixtures.status.success()
        && stage1.status.success()
        && stage1_out.contains("winner: Xception")
        && stage2.status.success()
        && stage2_out.contains("winner: Adam, MSE")
        && verify.status.success()
        && verify_out.trim_end().ends_with("PASS");

    if passed {
        println!("ACCEPTANCE 8 (end-to-end selection chain): PASS");
    } else {
        println!(
            "ACCEPTANCE 8 (end-to-end selection chain): FAIL - stage1 winner line present: {}, \
             stage2 winner line present: {}, verify verdict: {}",
            stage1_out.contains("winner: Xception"),
            stage2_out.contains("winner: Adam, MSE"),
            verify_out.lines().last().unwrap_or("<none>")
        );
    }
    assert!(passed, "end-to-end selection chain failed");
}
