//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 runtime fault
//! (protocol violation, numerical fault, failed certification row, I/O).

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use crate::adversary::{comparator_expected_loss, Environment, Trace};
use crate::config::{validate_config, ArmId, GameConfig, GameConfigDoc, StrategyId};
use crate::harness::plotdata::{load_series, Axis};
use crate::harness::scaling::fit_scaling;
use crate::harness::sweep::{run_sweep, SummaryRow};
use crate::harness::{build_learner, ExperimentSpec, HarnessError, LearnerSpec, Rate};
use crate::infotheory::kl_grid_row;
use crate::learners::BatchScan;
use crate::rng::RngStream;
use crate::sbi::{
    embed_one_batch, measure_goodness, pull_fraction_check, run_sbi, sbi_reduce, SbiOptions,
};

/// A failed run: message plus which exit code class it belongs to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }

    fn runtime(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Protocol(_) | HarnessError::Io(_) | HarnessError::Csv(_) => {
                Failure::runtime(e.to_string())
            }
            _ => Failure::usage(e.to_string()),
        }
    }
}

impl From<crate::config::ConfigError> for Failure {
    fn from(e: crate::config::ConfigError) -> Self {
        Failure::usage(e.to_string())
    }
}

impl From<crate::adversary::ProtocolError> for Failure {
    fn from(e: crate::adversary::ProtocolError) -> Self {
        Failure::runtime(e.to_string())
    }
}

impl From<crate::sbi::SbiError> for Failure {
    fn from(e: crate::sbi::SbiError) -> Self {
        Failure::runtime(e.to_string())
    }
}

impl From<crate::infotheory::InfoError> for Failure {
    fn from(e: crate::infotheory::InfoError) -> Self {
        Failure::usage(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::runtime(format!("io: {e}"))
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::usage(format!("json: {e}"))
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::runtime(format!("csv: {e}"))
    }
}

#[derive(Parser)]
#[command(
    name = "banditlab",
    version,
    about = "Adversarial bandit games with expert advice: simulation, identification, and divergence certification"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one game and write its trace and report
    Simulate(SimulateArgs),
    /// Run a grid sweep described by a JSON spec
    Sweep(SweepArgs),
    /// Certify the divergence grid: exact KL vs closed-form bound, plus Pinsker
    Klcheck(KlcheckArgs),
    /// Identification games on the batch structure
    #[command(subcommand)]
    Sbi(SbiCommand),
    /// Fit a power law to a sweep's regret-vs-horizon curve
    Fit(FitArgs),
    /// Regroup a sweep summary into plot-ready JSON series
    PlotData(PlotDataArgs),
}

fn parse_rate(s: &str) -> Result<Rate, String> {
    if s == "auto" {
        return Ok(Rate::Auto(crate::harness::AutoTag::Auto));
    }
    s.parse::<f64>()
        .map(Rate::Value)
        .map_err(|_| format!("expected a number or \"auto\", got {s:?}"))
}

fn parse_arm(s: &str) -> Result<ArmId, String> {
    if s == "0" {
        return Ok(ArmId::Zero);
    }
    if let Some(idx) = s.strip_prefix("pad") {
        return idx
            .parse::<u32>()
            .map(ArmId::Padded)
            .map_err(|_| format!("bad padded arm {s:?}"));
    }
    let inner = s.trim_start_matches('(').trim_end_matches(')');
    let mut it = inner.split(',');
    let (Some(u), Some(side), None) = (it.next(), it.next(), it.next()) else {
        return Err(format!("expected 0, (u,side), or padN, got {s:?}"));
    };
    let batch: u32 = u.trim().parse().map_err(|_| format!("bad batch in {s:?}"))?;
    let side: u8 = side.trim().parse().map_err(|_| format!("bad side in {s:?}"))?;
    if side > 1 {
        return Err(format!("side must be 0 or 1, got {side}"));
    }
    Ok(ArmId::Pair { batch, side })
}

fn parse_strategy(s: &str) -> Result<StrategyId, String> {
    StrategyId::from_str(s).map_err(|e| e.to_string())
}

/// Learner selection flags shared by `simulate` and `sbi reduce`.
#[derive(Args, Debug, Clone)]
struct LearnerFlags {
    /// Learner kind: exp4, uniform, oracle, or fixed
    #[arg(long, default_value = "exp4")]
    learner: String,
    /// Learning rate for exp4 (number or "auto")
    #[arg(long, value_parser = parse_rate)]
    eta: Option<Rate>,
    /// Exploration mix for exp4 (number or "auto")
    #[arg(long, value_parser = parse_rate)]
    gamma: Option<Rate>,
    /// Show the learner last round's advice instead of this round's
    #[arg(long)]
    proper: bool,
    /// Arm for the fixed learner: 0, (u,side), or padN
    #[arg(long, value_parser = parse_arm)]
    arm: Option<ArmId>,
}

impl LearnerFlags {
    fn to_spec(&self) -> LearnerSpec {
        LearnerSpec {
            learner: self.learner.clone(),
            eta: self.eta,
            gamma: self.gamma,
            proper: self.proper,
            arm: self.arm,
        }
    }
}

#[derive(Args)]
struct SimulateArgs {
    /// JSON game document: {"K", "N", "T", "epsilon", "seed", "strategy"}
    #[arg(long)]
    config: PathBuf,
    #[command(flatten)]
    learner: LearnerFlags,
    /// Trial index (selects the random streams)
    #[arg(long, default_value_t = 0)]
    trial: u64,
    /// Output directory for trace.csv and report.json
    #[arg(long, default_value = "sim-out")]
    out: PathBuf,
    /// Also write advice.jsonl (full advice table per round; large)
    #[arg(long)]
    export_advice: bool,
}

#[derive(Args)]
struct SweepArgs {
    /// JSON experiment spec
    #[arg(long)]
    spec: PathBuf,
}

#[derive(Args)]
struct KlcheckArgs {
    /// Largest experts-per-batch value to certify
    #[arg(long, default_value_t = 3)]
    nmax: u32,
    /// Largest round count to certify
    #[arg(long, default_value_t = 3)]
    tmax: u32,
    /// Gap parameters to certify at
    #[arg(long, value_delimiter = ',', default_value = "0.02,0.05,0.1")]
    epsilons: Vec<f64>,
    /// CSV output path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum SbiCommand {
    /// Accuracy of the scanning identifier across every strategy
    Scan(SbiScanArgs),
    /// Bandit-to-identification reduction: accuracy and displacement bound
    Reduce(SbiReduceArgs),
    /// One-batch game played through the multi-batch embedding
    Embed(SbiEmbedArgs),
}

#[derive(Args)]
struct SbiScanArgs {
    /// Number of batches
    #[arg(long, default_value_t = 2)]
    batches: u32,
    /// Experts per batch
    #[arg(long, default_value_t = 20)]
    batch_size: u32,
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    /// Pulls per batch (defaults to the δ-calibrated budget)
    #[arg(long)]
    budget: Option<u64>,
    /// Failure probability for the default budget
    #[arg(long, default_value_t = 0.01)]
    delta: f64,
    /// Trials per strategy
    #[arg(long, default_value_t = 200)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    threads: Option<usize>,
    /// JSON report path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SbiReduceArgs {
    /// JSON game document; its T is the reduction horizon T*
    #[arg(long)]
    config: PathBuf,
    #[command(flatten)]
    learner: LearnerFlags,
    /// Trials per strategy
    #[arg(long, default_value_t = 100)]
    trials: u64,
    #[arg(long)]
    threads: Option<usize>,
    /// JSON report path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SbiEmbedArgs {
    /// Batch count of the (outer) identifier
    #[arg(long, default_value_t = 2)]
    batches: u32,
    /// Which outer batch the real one-batch game plays as
    #[arg(long, default_value_t = 1)]
    target: u32,
    /// Experts per batch
    #[arg(long, default_value_t = 20)]
    batch_size: u32,
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    /// Pulls per batch for the scanning identifier
    #[arg(long)]
    budget: Option<u64>,
    /// Failure probability for the default budget
    #[arg(long, default_value_t = 0.01)]
    delta: f64,
    /// Trials per strategy
    #[arg(long, default_value_t = 200)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    threads: Option<usize>,
    /// JSON report path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FitArgs {
    /// summary.csv produced by `sweep`
    #[arg(long)]
    summary: PathBuf,
    /// Learner label to fit (column value in summary.csv)
    #[arg(long)]
    learner: String,
    /// Strategy to fit: S0 or S(u,v)
    #[arg(long, value_parser = parse_strategy, default_value = "S0")]
    strategy: StrategyId,
}

#[derive(Args)]
struct PlotDataArgs {
    /// summary.csv produced by `sweep`
    #[arg(long)]
    summary: PathBuf,
    /// x axis: T, K, or epsilon
    #[arg(long, default_value = "T")]
    axis: String,
    /// JSON output path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parses argv and runs; the returned code is the process exit status.
pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help/--version arrive here too; they are not failures.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Simulate(args) => simulate(args),
        Command::Sweep(args) => sweep(args),
        Command::Klcheck(args) => klcheck(args),
        Command::Sbi(SbiCommand::Scan(args)) => sbi_scan(args),
        Command::Sbi(SbiCommand::Reduce(args)) => sbi_reduce_cmd(args),
        Command::Sbi(SbiCommand::Embed(args)) => sbi_embed(args),
        Command::Fit(args) => fit(args),
        Command::PlotData(args) => plot_data(args),
    }
}

fn read_game_doc(path: &Path) -> Result<(GameConfig, StrategyId, GameConfigDoc), Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    let doc: GameConfigDoc = serde_json::from_str(&text)?;
    let (cfg, strategy) = doc.clone().into_game()?;
    let report = validate_config(&cfg);
    if !report.is_ok() {
        return Err(Failure::usage(report.violations.join("; ")));
    }
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    Ok((cfg, strategy, doc))
}

fn write_json<T: serde::Serialize>(value: &T, out: Option<&PathBuf>) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::runtime(e.to_string()))?;
    match out {
        Some(path) => {
            fs::write(path, text + "\n")?;
        }
        None => println!("{text}"),
    }
    Ok(())
}

fn simulate(args: SimulateArgs) -> Result<(), Failure> {
    let (cfg, strategy, doc) = read_game_doc(&args.config)?;
    let spec = args.learner.to_spec();
    let mut learner = build_learner(&spec, &cfg, strategy)?;
    let mut env = Environment::new(&cfg, strategy, args.trial)?;
    let mut rng = RngStream::labeled(cfg.seed, "learner", 0, args.trial);
    let trace = Trace::record(&mut env, learner.as_mut(), &mut rng, cfg.horizon)?;

    fs::create_dir_all(&args.out)?;
    let trace_path = args.out.join("trace.csv");
    trace.write_csv(BufWriter::new(File::create(&trace_path)?))?;
    if args.export_advice {
        let advice_path = args.out.join("advice.jsonl");
        trace.write_advice_jsonl(BufWriter::new(File::create(advice_path)?))?;
    }

    let realized = trace.realized_loss();
    let (comparator, rate) = comparator_expected_loss(&cfg, strategy);
    let expected = rate * cfg.horizon as f64;
    let report = serde_json::json!({
        "config": doc,
        "learner": spec.label(),
        "trial": args.trial,
        "realized_loss": realized,
        "comparator": {
            "expert": comparator.to_string(),
            "rate": rate,
            "expected_loss": expected,
        },
        "regret": realized as f64 - expected,
    });
    let report_path = args.out.join("report.json");
    fs::write(
        &report_path,
        serde_json::to_string_pretty(&report).map_err(|e| Failure::runtime(e.to_string()))? + "\n",
    )?;
    println!(
        "simulated {} rounds: loss {realized}, regret {:+.2} ({} / {})",
        cfg.horizon,
        realized as f64 - expected,
        trace_path.display(),
        report_path.display()
    );
    Ok(())
}

fn sweep(args: SweepArgs) -> Result<(), Failure> {
    let text = fs::read_to_string(&args.spec)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", args.spec.display())))?;
    let spec = ExperimentSpec::from_json(&text)?;
    let out = run_sweep(&spec)?;
    for w in &out.warnings {
        eprintln!("warning: {w}");
    }
    for f in &out.failures {
        eprintln!("skipped: {f}");
    }
    println!(
        "{} cells -> {} and {} ({} skipped)",
        out.cells_run,
        out.summary_path.display(),
        out.trials_path.display(),
        out.failures.len()
    );
    Ok(())
}

fn klcheck(args: KlcheckArgs) -> Result<(), Failure> {
    let mut rows = Vec::new();
    for n in 1..=args.nmax {
        for t in 1..=args.tmax {
            for &eps in &args.epsilons {
                rows.push(kl_grid_row(n, eps, t)?);
            }
        }
    }

    let mut buf = Vec::new();
    {
        let mut w = csv::WriterBuilder::new()
            .has_headers(false)
            .from_writer(&mut buf);
        w.write_record(["n", "T", "epsilon", "exact_kl", "bound", "tv", "pinsker_rhs", "pass"])
            .map_err(Failure::from)?;
        for r in &rows {
            w.write_record([
                r.batch_size.to_string(),
                r.rounds.to_string(),
                r.epsilon.to_string(),
                r.exact_kl.to_string(),
                r.bound.to_string(),
                r.tv.to_string(),
                r.pinsker_rhs.to_string(),
                r.pass.to_string(),
            ])
            .map_err(Failure::from)?;
        }
        w.flush()?;
    }
    match &args.out {
        Some(path) => fs::write(path, &buf)?,
        None => print!("{}", String::from_utf8_lossy(&buf)),
    }

    let failed: Vec<_> = rows.iter().filter(|r| !r.pass).collect();
    if failed.is_empty() {
        eprintln!("all {} cells certified", rows.len());
        Ok(())
    } else {
        for r in &failed {
            eprintln!(
                "FAIL n={} T={} eps={}: kl={:.6e} bound={:.6e} tv={:.6e} pinsker={:.6e}",
                r.batch_size, r.rounds, r.epsilon, r.exact_kl, r.bound, r.tv, r.pinsker_rhs
            );
        }
        Err(Failure::runtime(format!(
            "{} of {} divergence cells failed certification",
            failed.len(),
            rows.len()
        )))
    }
}

fn all_strategies(cfg: &GameConfig) -> Vec<StrategyId> {
    let mut out = vec![StrategyId::Null];
    for batch in 1..=cfg.batch_count {
        for index in 1..=cfg.batch_size {
            out.push(StrategyId::Special { batch, index });
        }
    }
    out
}

fn sbi_scan(args: SbiScanArgs) -> Result<(), Failure> {
    let budget = args
        .budget
        .unwrap_or_else(|| BatchScan::default_budget(args.batch_size, args.epsilon, args.delta));
    let cfg = GameConfig::from_reduced(args.batches, args.batch_size, 1, args.epsilon, args.seed);
    let strategies = all_strategies(&cfg);
    let threads = crate::exec::effective_threads(args.threads);
    let opts = SbiOptions::default();
    let report = measure_goodness(&strategies, args.trials, threads, |strategy, trial| {
        let mut scanner = BatchScan::new(args.batches, args.batch_size, args.epsilon, budget);
        run_sbi(&mut scanner, strategy, &cfg, trial, &opts)
            .map(|r| r.correct)
            .unwrap_or(false)
    });
    eprintln!(
        "scan: budget {budget}/batch, min accuracy {:.3}, good={}",
        report.min_accuracy, report.good
    );
    write_json(&report, args.out.as_ref())
}

fn sbi_reduce_cmd(args: SbiReduceArgs) -> Result<(), Failure> {
    let (cfg, strategy, _) = read_game_doc(&args.config)?;
    let spec = args.learner.to_spec();
    // Surface learner-spec problems before burning trials.
    build_learner(&spec, &cfg, strategy)?;
    let t_star = cfg.horizon;
    let threads = crate::exec::effective_threads(args.threads);

    let strategies = all_strategies(&cfg);
    let goodness = measure_goodness(&strategies, args.trials, threads, |s, trial| {
        let Ok(mut learner) = build_learner(&spec, &cfg, s) else {
            return false;
        };
        sbi_reduce(learner.as_mut(), t_star, s, &cfg, trial)
            .map(|r| r.correct)
            .unwrap_or(false)
    });

    let displacement = pull_fraction_check(&cfg, strategy, t_star, args.trials, threads, || {
        build_learner(&spec, &cfg, strategy).expect("learner spec validated above")
    })?;

    eprintln!(
        "reduce: min accuracy {:.3} (good={}), displacement bound holds={}",
        goodness.min_accuracy, goodness.good, displacement.holds
    );
    let report = serde_json::json!({
        "learner": spec.label(),
        "t_star": t_star,
        "goodness": goodness,
        "displacement": displacement,
    });
    write_json(&report, args.out.as_ref())
}

fn sbi_embed(args: SbiEmbedArgs) -> Result<(), Failure> {
    let budget = args
        .budget
        .unwrap_or_else(|| BatchScan::default_budget(args.batch_size, args.epsilon, args.delta));
    let small_cfg = GameConfig::from_reduced(1, args.batch_size, 1, args.epsilon, args.seed);
    let strategies = all_strategies(&small_cfg);
    let threads = crate::exec::effective_threads(args.threads);
    let opts = SbiOptions::default();
    let (batches, target) = (args.batches, args.target);
    let report = measure_goodness(&strategies, args.trials, threads, |strategy, trial| {
        let mut scanner = BatchScan::new(batches, args.batch_size, args.epsilon, budget);
        embed_one_batch(&mut scanner, batches, target, &small_cfg, strategy, trial, &opts)
            .map(|r| r.correct)
            .unwrap_or(false)
    });
    eprintln!(
        "embed: k={batches} target={target}, min accuracy {:.3}, good={}",
        report.min_accuracy, report.good
    );
    write_json(&report, args.out.as_ref())
}

fn fit(args: FitArgs) -> Result<(), Failure> {
    let mut reader = csv::Reader::from_path(&args.summary)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", args.summary.display())))?;
    let wanted = args.strategy.to_string();
    let mut points = Vec::new();
    let mut dims = std::collections::BTreeSet::new();
    let mut horizons = std::collections::BTreeSet::new();
    let mut duplicate_horizon = false;
    for row in reader.deserialize() {
        let row: SummaryRow = row.map_err(Failure::from)?;
        if row.learner == args.learner && row.strategy == wanted {
            points.push((row.horizon as f64, row.mean_regret));
            dims.insert((row.arm_count, row.expert_count));
            duplicate_horizon |= !horizons.insert(row.horizon);
        }
    }
    // A varying ε per horizon is the calibrated-adversary design and fits
    // cleanly; mixed game shapes or repeated horizons do not.
    if dims.len() > 1 {
        eprintln!(
            "warning: fitting across {} distinct (K, N) shapes; the slope mixes different games",
            dims.len()
        );
    }
    if duplicate_horizon {
        eprintln!("warning: several rows share a horizon; the fit will average them");
    }
    let fit = fit_scaling(&points)?;
    eprintln!(
        "fit: slope {:.4} ± {:.4} (95% CI) over {} points",
        fit.slope, fit.ci95, fit.points_used
    );
    write_json(&fit, None)
}

fn plot_data(args: PlotDataArgs) -> Result<(), Failure> {
    let axis = Axis::from_str(&args.axis)?;
    let series = load_series(&args.summary, axis)?;
    eprintln!("{} series along {}", series.len(), args.axis);
    write_json(&series, args.out.as_ref())
}
