//! Command-line surface of the fundus-select toolkit.
//!
//! Exit codes: 0 on success, 1 on validation errors or a failed
//! generalization check, 2 on usage errors. Diagnostics go to stderr,
//! results to stdout.

use std::fs;
use std::io::IsTerminal;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use fundus_select::augment::{
    augment_image, default_orient_specs, resize, truncate_channels, OrientZoomSpec,
};
use fundus_select::dataset_plan::{allocate_split, augmented_count, build_manifest, PlanConfig};
use fundus_select::fixtures;
use fundus_select::io::{
    load_predictions, load_runs, read_image, render_report, write_ppm, ReportFormat,
};
use fundus_select::metrics::{
    confusion_from_predictions, loss_value, relative_comparison, LossKind, MetricKind, MetricTriple,
};
use fundus_select::protocol::{
    run_stage, verify_generalization, StageConfig, DEFAULT_GENERALIZATION_TOLERANCE,
};
use fundus_select::ranking::{rank_stage, RunRecord, StageResult, TiePolicy, Weights};

#[derive(Parser)]
#[command(
    name = "fundus-select",
    version,
    about = "Select binary fundus classifiers from experiment metrics: rank candidates, \
             plan dataset balancing, augment images, verify generalization."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rank run records and print the leaderboard
    Rank(RankArgs),
    /// Metrics from prediction logs, or a run-versus-baseline comparison
    #[command(subcommand)]
    Metrics(MetricsCommand),
    /// Replication/balancing arithmetic; optionally build a split manifest
    Plan(PlanArgs),
    /// Allocate a total image count into train/val/test counts
    Split(SplitArgs),
    /// Expand one image into its oriented and noise variants
    Augment(AugmentArgs),
    /// Check that validation metrics generalize to the test split
    Verify(VerifyArgs),
    /// Leaderboard with the full score breakdown
    Report(ReportArgs),
    /// Write the bundled fixture files to a directory
    Fixtures(FixturesArgs),
}

#[derive(Args)]
struct RankArgs {
    /// Run-record CSV (model,overfitting,val_accuracy,val_loss,sensitivity,specificity,params)
    #[arg(long)]
    runs: PathBuf,
    /// Tie policy for equal metric values: ordinal, average, or competition
    #[arg(long, default_value = "ordinal")]
    tie_policy: TiePolicy,
    /// Five comma-separated weights: overfitting,accuracy,loss,sensitivity,specificity
    #[arg(long, default_value = "3,2,1.5,1,0.25")]
    weights: String,
    /// Output format: table, csv, or json
    #[arg(long, default_value = "table")]
    format: ReportFormat,
    /// Write output to a file instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum MetricsCommand {
    /// Confusion counts, ratio metrics, and losses from a prediction log
    #[command(
        long_about = "Confusion counts, accuracy/sensitivity/specificity, and CCE/MSE/MAE \
                      losses from a prediction log.\n\nHard labels use p_diseased >= threshold \
                      (a tie counts as diseased). CCE clamps probabilities to [1e-12, 1] before \
                      the log so it stays finite."
    )]
    FromPredictions(FromPredictionsArgs),
    /// Per-metric deltas, relative changes, and the loss ratio of two runs
    Compare(CompareArgs),
}

#[derive(Args)]
struct FromPredictionsArgs {
    /// Prediction-log CSV (example_id,true_label,p_healthy,p_diseased)
    #[arg(long)]
    predictions: PathBuf,
    /// Hard-label threshold on p_diseased
    #[arg(long, default_value_t = 0.5)]
    threshold: f64,
}

#[derive(Args)]
struct CompareArgs {
    /// Run-record CSV holding the baseline row
    #[arg(long)]
    baseline: PathBuf,
    /// Run-record CSV holding the final row
    #[arg(long = "final")]
    final_runs: PathBuf,
    /// Model name to pick from the baseline file (defaults to its only row)
    #[arg(long)]
    baseline_model: Option<String>,
    /// Model name to pick from the final file (defaults to its only row)
    #[arg(long)]
    final_model: Option<String>,
}

#[derive(Args)]
struct PlanArgs {
    /// Plan config JSON listing sources, plans, and split fractions
    #[arg(long)]
    config: PathBuf,
    /// Write a shuffled split manifest to this path (requires --seed)
    #[arg(long)]
    manifest_out: Option<PathBuf>,
    /// Shuffle seed for the manifest
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct SplitArgs {
    /// Total number of images
    #[arg(long)]
    total: u64,
    /// Train,val,test fractions summing to 1
    #[arg(long, default_value = "0.6,0.2,0.2")]
    fractions: String,
}

#[derive(Args)]
struct AugmentArgs {
    /// Input image: binary PPM (P6), or PAM (P7) whose fourth channel is dropped
    #[arg(long)]
    input: PathBuf,
    /// Directory for the output PPM variants
    #[arg(long)]
    output_dir: PathBuf,
    /// Number of orientation/zoom variants (b)
    #[arg(long, default_value_t = 1)]
    variants: u64,
    /// Noise configurations per orientation, excluding the control (c)
    #[arg(long, default_value_t = 0)]
    noise_configs: u64,
    /// Seed for the noise generator
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated rotation degrees, one per variant (default: evenly
    /// spaced in [-15, 15])
    #[arg(long)]
    rotations: Option<String>,
    /// Comma-separated zoom factors, one per variant (default: evenly spaced
    /// in [0.9, 1.1])
    #[arg(long)]
    zooms: Option<String>,
    /// Fill value for regions rotated or zoomed out of frame
    #[arg(long, default_value_t = 0)]
    fill: u8,
    /// Resize to WxH (e.g. 128x128) before augmenting
    #[arg(long)]
    resize: Option<String>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Validation accuracy,sensitivity,specificity
    #[arg(long)]
    val: String,
    /// Test accuracy,sensitivity,specificity
    #[arg(long)]
    test: String,
    /// Largest acceptable absolute delta per metric
    #[arg(long, default_value_t = DEFAULT_GENERALIZATION_TOLERANCE)]
    tolerance: f64,
}

#[derive(Args)]
struct ReportArgs {
    /// Run-record CSV
    #[arg(long)]
    runs: PathBuf,
    /// Stage config JSON; validates the roster and annotates the report
    #[arg(long)]
    stage_config: Option<PathBuf>,
    /// Tie policy for equal metric values
    #[arg(long, default_value = "ordinal")]
    tie_policy: TiePolicy,
    /// Five comma-separated weights
    #[arg(long, default_value = "3,2,1.5,1,0.25")]
    weights: String,
    /// Output format: table, csv, or json
    #[arg(long, default_value = "table")]
    format: ReportFormat,
    /// Write output to a file instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct FixturesArgs {
    /// Directory to write the bundled fixtures into
    #[arg(long)]
    output_dir: PathBuf,
}

fn parse_f64_list(raw: &str, what: &str, expected: usize) -> Result<Vec<f64>> {
    let values: Vec<f64> = raw
        .split(',')
        .map(|part| {
            part.trim()
                .parse::<f64>()
                .map_err(|_| anyhow!("invalid {what} component `{part}`"))
        })
        .collect::<Result<_>>()?;
    if values.len() != expected {
        bail!(
            "{what} needs {expected} comma-separated values, got {}",
            values.len()
        );
    }
    Ok(values)
}

fn parse_weights(raw: &str) -> Result<Weights> {
    let v = parse_f64_list(raw, "weights", 5)?;
    Ok(Weights::new(v[0], v[1], v[2], v[3], v[4])?)
}

fn parse_triple(raw: &str, what: &str) -> Result<MetricTriple> {
    let v = parse_f64_list(raw, what, 3)?;
    Ok(MetricTriple::new(v[0], v[1], v[2])?)
}

fn parse_dimensions(raw: &str) -> Result<(u32, u32)> {
    let (w, h) = raw
        .split_once('x')
        .ok_or_else(|| anyhow!("expected WxH, got `{raw}`"))?;
    Ok((
        w.trim().parse().context("invalid width")?,
        h.trim().parse().context("invalid height")?,
    ))
}

fn emit(text: &str, output: Option<&Path>) -> Result<()> {
    match output {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))?
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn ranked_result(
    runs: &Path,
    tie_policy: TiePolicy,
    weights: &str,
) -> Result<(Vec<RunRecord>, StageResult)> {
    let records = load_runs(runs)?;
    let weights = parse_weights(weights)?;
    let result = rank_stage(&records, tie_policy, &weights)?;
    Ok((records, result))
}

fn cmd_rank(args: RankArgs) -> Result<ExitCode> {
    let (_, result) = ranked_result(&args.runs, args.tie_policy, &args.weights)?;
    let text = render_report(&result, args.format, false)?;
    emit(&text, args.output.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_report(args: ReportArgs) -> Result<ExitCode> {
    let (records, result) = ranked_result(&args.runs, args.tie_policy, &args.weights)?;
    let text = match &args.stage_config {
        Some(path) => {
            let raw =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let config = StageConfig::from_json(&raw)?;
            let weights = parse_weights(&args.weights)?;
            let run = run_stage(&config, &records, args.tie_policy, &weights)?;
            match args.format {
                ReportFormat::Json => serde_json::to_string_pretty(&run)? + "\n",
                format => format!(
                    "stage: {}\n{}",
                    run.config.stage_id,
                    render_report(&run.result, format, true)?
                ),
            }
        }
        None => render_report(&result, args.format, true)?,
    };
    emit(&text, args.output.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_metrics_from_predictions(args: FromPredictionsArgs) -> Result<ExitCode> {
    let records = load_predictions(&args.predictions)?;
    let cm = confusion_from_predictions(&records, args.threshold)?;
    println!("records: {}", records.len());
    println!("threshold: {:.4}", args.threshold);
    println!(
        "confusion: tp={} fn={} tn={} fp={}",
        cm.tp, cm.fn_, cm.tn, cm.fp
    );
    println!("accuracy: {:.4}", cm.accuracy()?);
    println!("sensitivity: {:.4}", cm.sensitivity()?);
    println!("specificity: {:.4}", cm.specificity()?);
    for kind in [LossKind::Cce, LossKind::Mse, LossKind::Mae] {
        println!("{kind}: {:.4}", loss_value(&records, kind)?);
    }
    Ok(ExitCode::SUCCESS)
}

fn pick_row(path: &Path, model: Option<&str>) -> Result<RunRecord> {
    let records = load_runs(path)?;
    match model {
        Some(name) => records
            .into_iter()
            .find(|r| r.model_name == name)
            .ok_or_else(|| anyhow!("{}: no row for model `{name}`", path.display())),
        None if records.len() == 1 => Ok(records.into_iter().next().expect("one record")),
        None => bail!(
            "{}: holds {} rows; pick one with --baseline-model/--final-model",
            path.display(),
            records.len()
        ),
    }
}

fn cmd_metrics_compare(args: CompareArgs) -> Result<ExitCode> {
    let baseline = pick_row(&args.baseline, args.baseline_model.as_deref())?;
    let final_ = pick_row(&args.final_runs, args.final_model.as_deref())?;
    let report = relative_comparison(&final_.metrics, &baseline.metrics);

    println!("baseline: {}", baseline.model_name);
    println!("final: {}", final_.model_name);
    println!("metric        baseline    final  abs delta  relative change");
    for kind in MetricKind::ALL {
        let c = report.get(kind);
        let relative = match c.relative_change {
            Some(r) => format!("{:+.4}", r),
            None => "n/a".to_string(),
        };
        println!(
            "{:<12}  {:>8.4}  {:>7.4}  {:>9.4}  {:>15}",
            kind.name(),
            c.baseline,
            c.final_value,
            c.abs_delta,
            relative
        );
    }
    match report.loss_ratio {
        Some(ratio) => println!("loss ratio (baseline/final): {ratio:.4}"),
        None => println!("loss ratio (baseline/final): n/a"),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_plan(args: PlanArgs) -> Result<ExitCode> {
    let raw = fs::read_to_string(&args.config)
        .with_context(|| format!("reading {}", args.config.display()))?;
    let config = PlanConfig::from_json(&raw)?;
    let pairs = config.pairs()?;
    let spec = config.split_spec();

    let name_width = pairs
        .iter()
        .map(|(s, _)| s.source_name.len())
        .chain(std::iter::once("source".len()))
        .max()
        .unwrap_or(6);
    println!(
        "{:<name_width$}  {:<8}  {:>6}  {:>2}  {:>2}  {:>6}  {:>9}",
        "source", "label", "count", "b", "c", "factor", "augmented"
    );
    for (source, plan) in &pairs {
        println!(
            "{:<name_width$}  {:<8}  {:>6}  {:>2}  {:>2}  {:>6}  {:>9}",
            source.source_name,
            source.label,
            source.image_count,
            plan.b(),
            plan.c(),
            plan.replication_factor()?,
            augmented_count(source, plan)?
        );
    }
    let totals = fundus_select::dataset_plan::class_totals(&pairs)?;
    println!("healthy total: {}", totals.healthy);
    println!("diseased total: {}", totals.diseased);
    println!("grand total: {}", totals.grand);
    let counts = allocate_split(totals.grand, &spec)?;
    println!(
        "split ({}/{}/{}): train={} val={} test={}",
        spec.train(),
        spec.val(),
        spec.test(),
        counts.train,
        counts.val,
        counts.test
    );

    match (&args.manifest_out, args.seed) {
        (Some(path), Some(seed)) => {
            let manifest = build_manifest(&pairs, &spec, seed)?;
            fs::write(path, manifest.to_json()?)
                .with_context(|| format!("writing {}", path.display()))?;
            println!(
                "manifest: {} ({} entries, seed {seed}, generator {})",
                path.display(),
                manifest.entries.len(),
                manifest.generator
            );
        }
        (Some(_), None) => bail!("--manifest-out requires --seed"),
        (None, Some(_)) => bail!("--seed requires --manifest-out"),
        (None, None) => {}
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_split(args: SplitArgs) -> Result<ExitCode> {
    let v = parse_f64_list(&args.fractions, "fractions", 3)?;
    let spec = fundus_select::dataset_plan::SplitSpec::new(v[0], v[1], v[2])?;
    let counts = allocate_split(args.total, &spec)?;
    println!("{} {} {}", counts.train, counts.val, counts.test);
    Ok(ExitCode::SUCCESS)
}

fn cmd_augment(args: AugmentArgs) -> Result<ExitCode> {
    let mut image = read_image(&args.input)?;
    if image.channels() == 4 {
        image = truncate_channels(&image)?;
    }
    if let Some(dims) = &args.resize {
        let (w, h) = parse_dimensions(dims)?;
        image = resize(&image, w, h)?;
    }

    let b = args.variants;
    let plan = fundus_select::dataset_plan::AugmentationPlan::new(b, args.noise_configs)?;
    let mut specs = default_orient_specs(b, args.fill);
    if let Some(raw) = &args.rotations {
        let rotations = parse_f64_list(raw, "rotations", b as usize)?;
        for (spec, rotation) in specs.iter_mut().zip(&rotations) {
            spec.rotation_degrees = *rotation;
        }
    }
    if let Some(raw) = &args.zooms {
        let zooms = parse_f64_list(raw, "zooms", b as usize)?;
        for (spec, zoom) in specs.iter_mut().zip(&zooms) {
            spec.zoom = *zoom;
        }
    }
    // Re-validate after any overrides.
    let specs: Vec<OrientZoomSpec> = specs
        .into_iter()
        .map(|s| OrientZoomSpec::new(s.rotation_degrees, s.zoom, s.fill))
        .collect::<fundus_select::Result<_>>()?;

    let variants = augment_image(&image, &plan, &specs, args.seed)?;
    fs::create_dir_all(&args.output_dir)
        .with_context(|| format!("creating {}", args.output_dir.display()))?;
    let stem = args
        .input
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("image");
    let per_orientation = args.noise_configs + 1;
    for (index, variant) in variants.iter().enumerate() {
        let orientation = index as u64 / per_orientation;
        let noise = index as u64 % per_orientation;
        let path = args
            .output_dir
            .join(format!("{stem}_o{orientation:02}_n{noise:02}.ppm"));
        write_ppm(&path, variant)?;
    }
    println!(
        "wrote {} variants to {} (b={}, c={}, seed {})",
        variants.len(),
        args.output_dir.display(),
        b,
        args.noise_configs,
        args.seed
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode> {
    let val = parse_triple(&args.val, "--val")?;
    let test = parse_triple(&args.test, "--test")?;
    let report = verify_generalization(&val, &test, args.tolerance)?;

    println!("metric       {:>8}  {:>8}  {:>8}", "val", "test", "delta");
    for (name, val, test, delta) in [
        (
            "accuracy",
            val.accuracy,
            test.accuracy,
            report.deltas.accuracy,
        ),
        (
            "sensitivity",
            val.sensitivity,
            test.sensitivity,
            report.deltas.sensitivity,
        ),
        (
            "specificity",
            val.specificity,
            test.specificity,
            report.deltas.specificity,
        ),
    ] {
        println!("{name:<12} {val:>8.4}  {test:>8.4}  {delta:>8.4}");
    }
    println!("tolerance: {:.4}", report.tolerance);

    let use_color = std::io::stdout().is_terminal() && std::env::var_os("NO_COLOR").is_none();
    let verdict = match (report.passed, use_color) {
        (true, true) => "\x1b[32mPASS\x1b[0m",
        (true, false) => "PASS",
        (false, true) => "\x1b[31mFAIL\x1b[0m",
        (false, false) => "FAIL",
    };
    println!("{verdict}");
    if report.passed {
        Ok(ExitCode::SUCCESS)
    } else {
        let worst = report
            .deltas
            .accuracy
            .max(report.deltas.sensitivity)
            .max(report.deltas.specificity);
        eprintln!(
            "error: generalization check failed: max delta {worst:.4} exceeds tolerance {:.4}",
            report.tolerance
        );
        Ok(ExitCode::from(1))
    }
}

fn cmd_fixtures(args: FixturesArgs) -> Result<ExitCode> {
    let written = fixtures::write_all(&args.output_dir)?;
    for path in written {
        println!("{}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Rank(args) => cmd_rank(args),
        Command::Metrics(MetricsCommand::FromPredictions(args)) => {
            cmd_metrics_from_predictions(args)
        }
        Command::Metrics(MetricsCommand::Compare(args)) => cmd_metrics_compare(args),
        Command::Plan(args) => cmd_plan(args),
        Command::Split(args) => cmd_split(args),
        Command::Augment(args) => cmd_augment(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Report(args) => cmd_report(args),
        Command::Fixtures(args) => cmd_fixtures(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
