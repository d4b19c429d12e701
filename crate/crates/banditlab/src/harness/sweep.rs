//! Sweep execution: expands an [`ExperimentSpec`] into cells, runs every
//! trial, and writes `summary.csv` / `trials.csv` into the output directory.
//!
//! All cells share the spec seed; per-trial randomness is separated by
//! labeled streams. Two cells that differ only in learner therefore face
//! identical loss sequences — a paired design that sharpens learner
//! comparisons at no extra cost.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::adversary::{Environment, Trace};
use crate::config::{validate_config, GameConfig};
use crate::rng::RngStream;

use super::regret::estimate_pseudo_regret;
use super::{build_learner, resolve_cells, Cell, ExperimentSpec, HarnessError};

/// One row of `summary.csv`: a cell's aggregate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SummaryRow {
    #[serde(rename = "K")]
    pub arm_count: u32,
    #[serde(rename = "N")]
    pub expert_count: u32,
    #[serde(rename = "T")]
    pub horizon: u64,
    pub epsilon: f64,
    pub strategy: String,
    pub learner: String,
    pub trials: u64,
    pub mean_regret: f64,
    pub stderr: f64,
    pub comparator: String,
}

/// One row of `trials.csv`: a single trial.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrialRow {
    pub cell: String,
    pub trial: u64,
    pub seed: u64,
    pub realized_loss: u64,
    pub comparator_loss: f64,
    pub regret: f64,
}

/// What a sweep produced.
#[derive(Debug)]
pub struct SweepOutput {
    pub summary_path: PathBuf,
    pub trials_path: PathBuf,
    pub cells_run: usize,
    /// Cells that could not be formed or failed mid-run, with reasons.
    pub failures: Vec<String>,
    /// Non-fatal configuration warnings (deduplicated, cell-prefixed).
    pub warnings: Vec<String>,
}

fn csv_writer(path: &PathBuf) -> Result<csv::Writer<BufWriter<File>>, HarnessError> {
    // Headers are written explicitly so empty sweeps still produce
    // header-only files instead of zero-byte ones.
    Ok(csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(BufWriter::new(File::create(path)?)))
}

/// Runs the whole sweep. Cell order (and therefore CSV row order) follows
/// grid declaration order; worker count affects wall time only.
pub fn run_sweep(spec: &ExperimentSpec) -> Result<SweepOutput, HarnessError> {
    fs::create_dir_all(&spec.output_dir)?;
    let (cells, mut failures) = resolve_cells(spec);

    let summary_path = spec.output_dir.join("summary.csv");
    let trials_path = spec.output_dir.join("trials.csv");
    let mut summary = csv_writer(&summary_path)?;
    summary.write_record([
        "K",
        "N",
        "T",
        "epsilon",
        "strategy",
        "learner",
        "trials",
        "mean_regret",
        "stderr",
        "comparator",
    ])?;
    let mut trials_out = csv_writer(&trials_path)?;
    trials_out.write_record([
        "cell",
        "trial",
        "seed",
        "realized_loss",
        "comparator_loss",
        "regret",
    ])?;

    let mut warnings = Vec::new();
    let mut cells_run = 0usize;
    for cell in &cells {
        match run_cell(spec, cell, &mut summary, &mut trials_out, &mut warnings) {
            Ok(()) => cells_run += 1,
            Err(e) => {
                let label = spec.learners[cell.learner].label();
                failures.push(format!("{}: {e}", cell.id(&label)));
            }
        }
    }
    summary.flush()?;
    trials_out.flush()?;

    Ok(SweepOutput {
        summary_path,
        trials_path,
        cells_run,
        failures,
        warnings,
    })
}

fn run_cell(
    spec: &ExperimentSpec,
    cell: &Cell,
    summary: &mut csv::Writer<BufWriter<File>>,
    trials_out: &mut csv::Writer<BufWriter<File>>,
    warnings: &mut Vec<String>,
) -> Result<(), HarnessError> {
    let cfg = GameConfig::new(
        cell.arm_count,
        cell.expert_count,
        cell.horizon,
        cell.epsilon,
        spec.seed,
    )?;
    let learner_spec = &spec.learners[cell.learner];
    let label = learner_spec.label();
    let cell_id = cell.id(&label);

    let report = validate_config(&cfg);
    if !report.is_ok() {
        return Err(HarnessError::Spec(report.violations.join("; ")));
    }
    for w in &report.warnings {
        let tagged = format!("{cell_id}: {w}");
        if !warnings.contains(&tagged) {
            warnings.push(tagged);
        }
    }

    let (agg, rows) =
        estimate_pseudo_regret(&cfg, cell.strategy, learner_spec, spec.trials, spec.threads)?;

    summary.serialize(SummaryRow {
        arm_count: cell.arm_count,
        expert_count: cell.expert_count,
        horizon: cell.horizon,
        epsilon: cell.epsilon,
        strategy: cell.strategy.to_string(),
        learner: label.clone(),
        trials: agg.trials,
        mean_regret: agg.mean_regret,
        stderr: agg.stderr,
        comparator: agg.comparator.to_string(),
    })?;
    for r in &rows {
        trials_out.serialize(TrialRow {
            cell: cell_id.clone(),
            trial: r.trial,
            seed: spec.seed,
            realized_loss: r.realized_loss,
            comparator_loss: r.comparator_loss,
            regret: r.regret,
        })?;
    }

    if spec.export_traces {
        export_cell_traces(spec, cell, &cfg, &cell_id)?;
    }
    Ok(())
}

/// Re-runs each trial sequentially and writes `traces/<cell>/trial-<i>.csv`.
/// The re-run reproduces the measured trials exactly because trial
/// randomness depends only on labeled streams, not on execution order.
fn export_cell_traces(
    spec: &ExperimentSpec,
    cell: &Cell,
    cfg: &GameConfig,
    cell_id: &str,
) -> Result<(), HarnessError> {
    let dir = spec.output_dir.join("traces").join(cell_id);
    fs::create_dir_all(&dir)?;
    let learner_spec = &spec.learners[cell.learner];
    for trial in 0..spec.trials {
        let mut env = Environment::new(cfg, cell.strategy, trial)?;
        let mut learner = build_learner(learner_spec, cfg, cell.strategy)?;
        let mut rng = RngStream::labeled(cfg.seed, "learner", 0, trial);
        let trace = Trace::record(&mut env, learner.as_mut(), &mut rng, cfg.horizon)?;
        let file = File::create(dir.join(format!("trial-{trial}.csv")))?;
        trace.write_csv(BufWriter::new(file))?;
    }
    Ok(())
}
