//! Per-trial run records persisted alongside experiment tables.

use serde::{Deserialize, Serialize};

use lasso_lab_core::instance::VarianceMode;
use lasso_lab_core::scalar::PrecisionMode;

pub const RUN_RECORD_SCHEMA: &str = "run/v1";

/// One solved trial: identifying coordinates plus headline results.
/// Identical (experiment, seed, trial, parameters) always reproduce
/// identical counts.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunRecord {
    pub schema: String,
    pub experiment: String,
    pub generator: String,
    pub n: usize,
    pub d: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sigma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub variance_mode: Option<VarianceMode>,
    pub seed: u64,
    pub trial: u64,
    pub precision: PrecisionMode,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub segment_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub breakpoint_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub kkt_max_violation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
    /// Wall time of the solve; informational only, lives outside any CSV.
    pub wall_time_ms: f64,
}

/// Aggregate of one experiment cell.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CellStat {
    pub trials: usize,
    pub failures: usize,
    pub mean: f64,
    pub std: f64,
    pub min: usize,
    pub max: usize,
}

impl CellStat {
    /// Aggregates counts in trial order (deterministic reduction).
    pub fn from_counts(counts: &[Option<usize>]) -> CellStat {
        let trials = counts.len();
        let ok: Vec<usize> = counts.iter().flatten().copied().collect();
        let failures = trials - ok.len();
        if ok.is_empty() {
            return CellStat {
                trials,
                failures,
                mean: f64::NAN,
                std: f64::NAN,
                min: 0,
                max: 0,
            };
        }
        let mean = ok.iter().sum::<usize>() as f64 / ok.len() as f64;
        let var = ok
            .iter()
            .map(|&c| (c as f64 - mean) * (c as f64 - mean))
            .sum::<f64>()
            / ok.len() as f64;
        CellStat {
            trials,
            failures,
            mean,
            std: var.sqrt(),
            min: *ok.iter().min().unwrap(),
            max: *ok.iter().max().unwrap(),
        }
    }

    /// CSV cell text: integral means print without a decimal point, failed
    /// cells print as `failed`.
    pub fn csv_cell(&self) -> String {
        if self.failures == self.trials {
            return "failed".into();
        }
        let base = format!("{}", self.mean);
        if self.failures == 0 {
            base
        } else {
            format!("{base}({} failed)", self.failures)
        }
    }
}
