//! Turns `summary.csv` into plot-ready JSON series.
//!
//! One series per (learner, strategy, fixed-dimension) combination; the
//! chosen axis becomes the x coordinate. Output is deliberately
//! tool-agnostic: `[{label, x: [...], y: [...], stderr: [...]}, ...]`.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use super::sweep::SummaryRow;
use super::HarnessError;

/// Which grid dimension runs along the x axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    ArmCount,
    Epsilon,
    Horizon,
}

impl FromStr for Axis {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "K" => Ok(Axis::ArmCount),
            "T" => Ok(Axis::Horizon),
            "epsilon" | "eps" => Ok(Axis::Epsilon),
            other => Err(HarnessError::Spec(format!(
                "axis {other:?} not recognized (use K, T, or epsilon)"
            ))),
        }
    }
}

/// One plottable curve.
#[derive(Debug, Clone, Serialize)]
pub struct Series {
    pub label: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub stderr: Vec<f64>,
}

fn series_label(row: &SummaryRow, axis: Axis) -> String {
    let mut parts = vec![row.learner.clone(), row.strategy.clone()];
    if axis != Axis::ArmCount {
        parts.push(format!("K{}", row.arm_count));
    }
    parts.push(format!("N{}", row.expert_count));
    if axis != Axis::Horizon {
        parts.push(format!("T{}", row.horizon));
    }
    if axis != Axis::Epsilon {
        parts.push(format!("e{}", row.epsilon));
    }
    parts.join(" ")
}

/// Reads a sweep summary and regroups it into series along `axis`. Points
/// within a series are sorted by x; series come out in label order.
pub fn load_series(summary: &Path, axis: Axis) -> Result<Vec<Series>, HarnessError> {
    let mut reader = csv::Reader::from_path(summary)?;
    let mut groups: BTreeMap<String, Vec<(f64, f64, f64)>> = BTreeMap::new();
    for row in reader.deserialize() {
        let row: SummaryRow = row?;
        let x = match axis {
            Axis::ArmCount => f64::from(row.arm_count),
            Axis::Epsilon => row.epsilon,
            Axis::Horizon => row.horizon as f64,
        };
        groups
            .entry(series_label(&row, axis))
            .or_default()
            .push((x, row.mean_regret, row.stderr));
    }
    Ok(groups
        .into_iter()
        .map(|(label, mut pts)| {
            pts.sort_by(|a, b| a.0.total_cmp(&b.0));
            Series {
                label,
                x: pts.iter().map(|p| p.0).collect(),
                y: pts.iter().map(|p| p.1).collect(),
                stderr: pts.iter().map(|p| p.2).collect(),
            }
        })
        .collect())
}
