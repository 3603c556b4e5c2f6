//! Machine-readable output: JSON reports and CSV grids.

use std::io::Write;

use serde::{Deserialize, Serialize};

use l2boost_core::simlab::{MonteCarloReport, Replication};
use l2boost_core::{DoubleSelectionResult, IVResult};

/// `None` stands in for NaN, which JSON cannot carry.
fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignRecord {
    pub table: String,
    pub n: usize,
    pub p: usize,
    pub s: Option<usize>,
    pub target: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationRecord {
    pub design: DesignRecord,
    pub estimator: String,
    pub replications: usize,
    pub seed: u64,
    pub successes: usize,
    pub failures: usize,
    pub mean_bias: Option<f64>,
    pub median_bias: Option<f64>,
    pub rejection_rate: Option<f64>,
    pub coverage: Option<f64>,
}

impl From<&MonteCarloReport> for SimulationRecord {
    fn from(r: &MonteCarloReport) -> Self {
        Self {
            design: DesignRecord {
                table: r.spec.table_name().to_string(),
                n: r.spec.n(),
                p: r.spec.p(),
                s: r.spec.s(),
                target: r.spec.target(),
            },
            estimator: r.estimator.label().to_string(),
            replications: r.replications,
            seed: r.master_seed,
            successes: r.successes,
            failures: r.failures,
            mean_bias: finite(r.mean_bias),
            median_bias: finite(r.median_bias),
            rejection_rate: finite(r.rejection_rate),
            coverage: finite(r.coverage),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Inference {
    pub estimate: f64,
    pub se: f64,
    pub ci_lower: f64,
    pub ci_upper: f64,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreatRecord {
    pub n: usize,
    pub rows_dropped: usize,
    pub learner: String,
    pub inference: Inference,
    pub selected_treatment: Vec<String>,
    pub selected_outcome: Vec<String>,
    pub controls_used: Vec<String>,
}

impl TreatRecord {
    pub fn new(
        r: &DoubleSelectionResult,
        names: &[String],
        learner: &str,
        rows_dropped: usize,
    ) -> Self {
        let pick = |idx: &[usize]| idx.iter().map(|&j| names[j].clone()).collect();
        Self {
            n: r.nu_hat.len(),
            rows_dropped,
            learner: learner.to_string(),
            inference: Inference {
                estimate: r.alpha_hat,
                se: r.se,
                ci_lower: r.ci_lower,
                ci_upper: r.ci_upper,
                p_value: r.p_value,
            },
            selected_treatment: pick(&r.set_d),
            selected_outcome: pick(&r.set_y),
            controls_used: pick(&r.controls),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IvRecord {
    pub n: usize,
    pub rows_dropped: usize,
    pub learner: String,
    pub inference: Inference,
    pub first_stage: Vec<String>,
    pub q_hat: f64,
    pub omega_hat: f64,
}

impl IvRecord {
    pub fn new(r: &IVResult, names: &[String], learner: &str, rows_dropped: usize) -> Self {
        Self {
            n: r.d_hat.len(),
            rows_dropped,
            learner: learner.to_string(),
            inference: Inference {
                estimate: r.alpha_hat,
                se: r.se,
                ci_lower: r.ci_lower,
                ci_upper: r.ci_upper,
                p_value: r.p_value,
            },
            first_stage: r.first_stage_support.iter().map(|&j| names[j].clone()).collect(),
            q_hat: r.q_hat,
            omega_hat: r.omega_hat,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoostStep {
    pub column: String,
    pub step: f64,
    pub rss: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoostRecord {
    pub n: usize,
    pub rows_dropped: usize,
    pub learner: String,
    pub stopped: String,
    pub initial_rss: f64,
    pub steps: Vec<BoostStep>,
    pub intercept: f64,
    /// Raw-scale coefficients on the support, by column name.
    pub coefficients: Vec<(String, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DroppedRecord {
    pub column: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpandRecord {
    pub rows: usize,
    pub rows_dropped: usize,
    pub kept: Vec<String>,
    pub dropped: Vec<DroppedRecord>,
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).unwrap_or_default();
    s.push('\n');
    s
}

pub const GRID_HEADER: [&str; 9] = [
    "n",
    "p",
    "s",
    "estimator",
    "bias",
    "rejection_rate",
    "coverage",
    "R",
    "seed",
];

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NaN".to_string(), |x| x.to_string())
}

/// Simulation grid, one row per report.
pub fn write_grid<W: Write>(out: W, records: &[SimulationRecord]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(GRID_HEADER)?;
    for r in records {
        w.write_record([
            r.design.n.to_string(),
            r.design.p.to_string(),
            r.design.s.map_or_else(String::new, |s| s.to_string()),
            r.estimator.clone(),
            opt(r.mean_bias),
            opt(r.rejection_rate),
            opt(r.coverage),
            r.replications.to_string(),
            r.seed.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub const ESTIMATES_HEADER: [&str; 7] = [
    "estimator",
    "replication",
    "estimate",
    "se",
    "ci_lower",
    "ci_upper",
    "error",
];

/// Per-replication estimates for external plotting.
pub fn write_estimates<W: Write>(
    out: W,
    runs: &[(String, &[Replication])],
) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(ESTIMATES_HEADER)?;
    for (label, reps) in runs {
        for rep in *reps {
            let row = match &rep.outcome {
                Ok(e) => [
                    label.clone(),
                    rep.index.to_string(),
                    e.estimate.to_string(),
                    e.se.to_string(),
                    e.ci_lower.to_string(),
                    e.ci_upper.to_string(),
                    String::new(),
                ],
                Err(err) => [
                    label.clone(),
                    rep.index.to_string(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    err.code().to_string(),
                ],
            };
            w.write_record(row)?;
        }
    }
    w.flush()?;
    Ok(())
}
