//! Command-line entry point for the disambiguation experiment harness.

use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use disamb::cluster::Partition;
use disamb::expt::synth::{synth_corpus, write_jsonl, SynthSpec};
use disamb::expt::{
    run_scenarios, run_sweep, ExperimentConfig, RatioPlanSet, RunSummary, ThresholdMode,
};
use disamb::learn::ModelKind;
use disamb::metrics::{bcubed, pairwise_f};
use disamb::pairs::RatioKind;

#[derive(Parser)]
#[command(
    name = "disamb",
    version,
    about = "Author name disambiguation: ratio sweeps, cross-data scenarios, \
             synthetic corpora, and partition evaluation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep negative:positive training ratios 1..R plus "all" per block.
    Sweep(SweepArgs),
    /// Run fixed ratio scenarios and the cross-data per-block average.
    Scenarios(ScenariosArgs),
    /// Generate a synthetic labeled corpus in canonical JSONL.
    Synth(SynthArgs),
    /// Score a predicted partition CSV against a truth partition CSV.
    Eval(EvalArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Labeled corpus files (canonical JSONL), one dataset each.
    #[arg(long = "data", required = true, num_args = 1..)]
    data: Vec<PathBuf>,
    /// Master seed; all per-block and per-repetition seeds derive from it.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Repetitions per block and ratio.
    #[arg(long, default_value_t = 10)]
    reps: usize,
    /// Keep only blocks with at least this many instances.
    #[arg(long = "min-block-size", default_value_t = 100)]
    min_block_size: usize,
    /// Comma-separated classifiers: lr, nb, rf.
    #[arg(long, default_value = "lr,nb,rf", value_delimiter = ',')]
    classifiers: Vec<String>,
    /// Cut selection: "bf1" searches thresholds, "truth-k" cuts to the
    /// truth cluster count.
    #[arg(long = "threshold-mode", default_value = "bf1")]
    threshold_mode: String,
    /// Reuse one train/test split across repetitions.
    #[arg(long = "fixed-split")]
    fixed_split: bool,
    /// Also render SVG trend charts next to the plot CSVs.
    #[arg(long)]
    svg: bool,
    /// Output directory for results.csv, aggregates.csv, timing.csv, plots/.
    #[arg(long, required = true)]
    out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    run: RunArgs,
    /// "sweep" for 1..R plus all, or an explicit list like "1,5,all".
    #[arg(long, default_value = "sweep")]
    ratios: String,
}

#[derive(Args)]
struct ScenariosArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Ratio scenarios, e.g. "1,10,all".
    #[arg(long, default_value = "1,10,all")]
    scenarios: String,
}

#[derive(Args)]
struct SynthArgs {
    /// Number of distinct authors.
    #[arg(long)]
    authors: usize,
    /// Records (and name instances) per author.
    #[arg(long = "per-author")]
    per_author: usize,
    /// Authors sharing one block key.
    #[arg(long, default_value_t = 1)]
    ambiguity: usize,
    /// Shared-pool probability in [0, 1].
    #[arg(long, default_value_t = 0.0)]
    overlap: f64,
    /// Collaborators per author.
    #[arg(long = "coauthor-pool", default_value_t = 5)]
    coauthor_pool: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output JSONL file.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    /// Predicted partition (instance_id,cluster_id CSV).
    #[arg(long)]
    pred: PathBuf,
    /// Truth partition (instance_id,cluster_id CSV).
    #[arg(long)]
    truth: PathBuf,
}

fn parse_classifiers(codes: &[String]) -> Result<Vec<ModelKind>> {
    let mut kinds = Vec::new();
    for code in codes {
        let kind: ModelKind = code.parse().map_err(|e: String| anyhow::anyhow!(e))?;
        if !kinds.contains(&kind) {
            kinds.push(kind);
        }
    }
    Ok(kinds)
}

fn parse_ratio_list(text: &str) -> Result<Vec<RatioKind>> {
    let mut ratios = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        let ratio = if part.eq_ignore_ascii_case("all") {
            RatioKind::All
        } else {
            let r: u64 = part
                .parse()
                .with_context(|| format!("bad ratio {part:?} (expected an integer or \"all\")"))?;
            if r < 1 {
                bail!("ratios must be >= 1");
            }
            RatioKind::Exact(r)
        };
        if !ratios.contains(&ratio) {
            ratios.push(ratio);
        }
    }
    Ok(ratios)
}

fn parse_threshold_mode(text: &str) -> Result<ThresholdMode> {
    match text {
        "bf1" => Ok(ThresholdMode::BestF1),
        "truth-k" => Ok(ThresholdMode::TruthClusterCount),
        other => bail!("unknown threshold mode {other:?} (expected bf1 or truth-k)"),
    }
}

fn build_config(run: &RunArgs, ratio_plan: RatioPlanSet) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::new(run.data.clone(), run.out.clone());
    cfg.master_seed = run.seed;
    cfg.repetitions = run.reps;
    cfg.min_block_size = run.min_block_size;
    cfg.classifiers = parse_classifiers(&run.classifiers)?;
    cfg.ratio_plan = ratio_plan;
    cfg.threshold_mode = parse_threshold_mode(&run.threshold_mode)?;
    cfg.fixed_split = run.fixed_split;
    cfg.render_svg = run.svg;
    Ok(cfg)
}

fn report(summary: &RunSummary) -> Result<()> {
    println!(
        "{} result rows, {} aggregate rows ({} blocks, {} skipped block-repetitions) -> {}",
        summary.result_rows,
        summary.aggregate_rows,
        summary.blocks_selected,
        summary.skipped.len(),
        summary.out_dir.display()
    );
    if summary.rejected_instances > 0 {
        eprintln!(
            "warning: {} instance(s) rejected during blocking",
            summary.rejected_instances
        );
    }
    if summary.result_rows == 0 {
        eprintln!("warning: no result rows produced (no blocks passed filtering?)");
        std::process::exit(1);
    }
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Sweep(args) => {
            let plan = if args.ratios.trim().eq_ignore_ascii_case("sweep") {
                RatioPlanSet::Sweep
            } else {
                RatioPlanSet::List(parse_ratio_list(&args.ratios)?)
            };
            let cfg = build_config(&args.run, plan)?;
            report(&run_sweep(&cfg)?)
        }
        Command::Scenarios(args) => {
            let plan = RatioPlanSet::List(parse_ratio_list(&args.scenarios)?);
            let cfg = build_config(&args.run, plan)?;
            report(&run_scenarios(&cfg)?)
        }
        Command::Synth(args) => {
            let spec = SynthSpec {
                authors: args.authors,
                instances_per_author: args.per_author,
                ambiguity: args.ambiguity,
                overlap: args.overlap,
                coauthor_pool: args.coauthor_pool,
                seed: args.seed,
            };
            spec.validate().map_err(|e| anyhow::anyhow!(e))?;
            let corpus = synth_corpus(&spec);
            let file = fs::File::create(&args.out)
                .with_context(|| format!("cannot create {}", args.out.display()))?;
            write_jsonl(&corpus, std::io::BufWriter::new(file))?;
            println!(
                "wrote {} records and {} instances to {}",
                corpus.record_count(),
                corpus.instance_count(),
                args.out.display()
            );
            Ok(())
        }
        Command::Eval(args) => {
            let pred = Partition::from_csv(
                &fs::read_to_string(&args.pred)
                    .with_context(|| format!("cannot read {}", args.pred.display()))?,
            )
            .map_err(|e| anyhow::anyhow!(e))?;
            let truth = Partition::from_csv(
                &fs::read_to_string(&args.truth)
                    .with_context(|| format!("cannot read {}", args.truth.display()))?,
            )
            .map_err(|e| anyhow::anyhow!(e))?;
            let b = bcubed(&pred, &truth)?;
            let pw = pairwise_f(&pred, &truth)?;
            println!("bP={:.6} bR={:.6} bF1={:.6}", b.bp, b.br, b.bf1);
            println!(
                "pairwise: precision={:.6} recall={:.6} f1={:.6}",
                pw.precision, pw.recall, pw.f1
            );
            Ok(())
        }
    }
}
