//! The worst-case smoothing study: a table of mean path complexity, one row
//! per noise level `1/SNR = -log10(sigma)`, one column per dimension.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use lasso_lab_core::gen::{gen_adversarial, smooth, trial_seed, SmoothingSpec};
use lasso_lab_core::homotopy::{solve_path_any, SolveOpts};
use lasso_lab_core::instance::{ProblemInstance, VarianceMode};
use lasso_lab_core::scalar::PrecisionMode;

use crate::error::HarnessError;
use crate::runrec::{CellStat, RunRecord, RUN_RECORD_SCHEMA};

/// A noise row: either the unsmoothed instance or `sigma = 10^-k`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SigmaSpec {
    Noiseless,
    NegLog10(u32),
}

impl SigmaSpec {
    pub fn sigma(self) -> f64 {
        match self {
            SigmaSpec::Noiseless => 0.0,
            SigmaSpec::NegLog10(k) => 10f64.powi(-(k as i32)),
        }
    }

    pub fn label(self) -> String {
        match self {
            SigmaSpec::Noiseless => "inf".into(),
            SigmaSpec::NegLog10(k) => format!("{k}"),
        }
    }

    pub fn parse(s: &str) -> Result<Self, HarnessError> {
        if s.eq_ignore_ascii_case("inf") || s == "∞" {
            Ok(SigmaSpec::Noiseless)
        } else {
            s.parse::<u32>()
                .map(SigmaSpec::NegLog10)
                .map_err(|_| HarnessError::InvalidArguments(format!("bad sigma spec `{s}`")))
        }
    }
}

#[derive(Clone, Debug)]
pub struct Table1Options {
    pub dims: Vec<usize>,
    pub sigmas: Vec<SigmaSpec>,
    pub trials: usize,
    pub seed: u64,
    pub precision: PrecisionMode,
}

impl Default for Table1Options {
    fn default() -> Self {
        Table1Options {
            dims: (4..=10).collect(),
            sigmas: std::iter::once(SigmaSpec::Noiseless)
                .chain((0..=20).map(SigmaSpec::NegLog10))
                .collect(),
            trials: 100,
            seed: 1,
            precision: PrecisionMode::Extended,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Table1 {
    pub dims: Vec<usize>,
    pub sigma_labels: Vec<String>,
    /// `cells[row][col]`: row follows `sigmas`, col follows `dims`.
    pub cells: Vec<Vec<CellStat>>,
    pub precision: PrecisionMode,
    pub seed: u64,
    pub trials: usize,
    pub records: Vec<RunRecord>,
}

impl Table1 {
    /// Stable CSV mirroring the reference layout: header row, one row per
    /// noise level, one column per dimension.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("1/SNR");
        for d in &self.dims {
            out.push_str(&format!(",d={d}"));
        }
        out.push('\n');
        for (row, label) in self.sigma_labels.iter().enumerate() {
            out.push_str(label);
            for cell in &self.cells[row] {
                out.push(',');
                out.push_str(&cell.csv_cell());
            }
            out.push('\n');
        }
        out
    }
}

fn solve_count(
    inst: &ProblemInstance,
    precision: PrecisionMode,
    experiment: &str,
    seed: u64,
    trial: u64,
) -> RunRecord {
    let start = Instant::now();
    let outcome = solve_path_any(inst, precision, &SolveOpts::default());
    let wall = start.elapsed().as_secs_f64() * 1e3;
    let mut rec = RunRecord {
        schema: RUN_RECORD_SCHEMA.into(),
        experiment: experiment.into(),
        generator: inst.meta.generator.clone(),
        n: inst.n(),
        d: inst.d(),
        sigma: inst.meta.sigma,
        variance_mode: inst.meta.variance_mode,
        seed,
        trial,
        precision,
        segment_count: None,
        breakpoint_count: None,
        kkt_max_violation: None,
        error: None,
        wall_time_ms: wall,
    };
    match outcome {
        Ok(path) => {
            rec.segment_count = Some(path.count());
            rec.breakpoint_count = Some(path.count() - 1);
            rec.kkt_max_violation = Some(path.diagnostics().max_kkt_violation);
        }
        Err(e) => rec.error = Some(e.to_string()),
    }
    rec
}

/// Runs the smoothing study. Per cell `(d, k)`: smooth the worst-case
/// instance with per-entry noise `sigma = 10^-k` across `trials` seeds
/// derived from `(seed, d, k, trial)` and average the segment counts; the
/// noiseless row solves the unsmoothed instance once. Failed trials are
/// counted and reported, never dropped silently.
pub fn run_table1(opts: &Table1Options) -> Result<Table1, HarnessError> {
    if opts.dims.is_empty()
        || opts
            .dims
            .iter()
            .any(|&d| !(1..=lasso_lab_core::gen::ADVERSARIAL_MAX_D).contains(&d))
    {
        return Err(HarnessError::InvalidArguments(format!(
            "dimensions must lie in 1..={}, got {:?}",
            lasso_lab_core::gen::ADVERSARIAL_MAX_D,
            opts.dims
        )));
    }
    if opts.trials == 0 {
        return Err(HarnessError::InvalidArguments(
            "need at least one trial".into(),
        ));
    }
    let mut cells: Vec<Vec<CellStat>> = Vec::with_capacity(opts.sigmas.len());
    let mut records: Vec<RunRecord> = Vec::new();

    // Base instances (and their generation failures) per dimension.
    let bases: Vec<Result<ProblemInstance, String>> = opts
        .dims
        .iter()
        .map(|&d| gen_adversarial(d, opts.precision).map_err(|e| e.to_string()))
        .collect();

    for &spec in &opts.sigmas {
        let mut row: Vec<CellStat> = Vec::with_capacity(opts.dims.len());
        for (col, &d) in opts.dims.iter().enumerate() {
            let base = match &bases[col] {
                Ok(inst) => inst,
                Err(msg) => {
                    row.push(CellStat::from_counts(&vec![
                        None;
                        trials_for(spec, opts.trials)
                    ]));
                    records.push(RunRecord {
                        schema: RUN_RECORD_SCHEMA.into(),
                        experiment: "table1".into(),
                        generator: "adversarial".into(),
                        n: d,
                        d,
                        sigma: Some(spec.sigma()),
                        variance_mode: Some(VarianceMode::PerEntry),
                        seed: opts.seed,
                        trial: 0,
                        precision: opts.precision,
                        segment_count: None,
                        breakpoint_count: None,
                        kkt_max_violation: None,
                        error: Some(msg.clone()),
                        wall_time_ms: 0.0,
                    });
                    continue;
                }
            };
            let k_bits = spec.sigma().to_bits();
            let n_trials = trials_for(spec, opts.trials);
            // Trials are independent tasks merged in index order, so the
            // parallel and serial schedules produce identical tables.
            let trial_recs: Vec<RunRecord> = (0..n_trials as u64)
                .into_par_iter()
                .map(|t| {
                    let inst = match spec {
                        SigmaSpec::Noiseless => base.clone(),
                        SigmaSpec::NegLog10(_) => smooth(
                            base,
                            &SmoothingSpec {
                                sigma: spec.sigma(),
                                variance_mode: VarianceMode::PerEntry,
                                seed: trial_seed(opts.seed, &[d as u64, k_bits, t]),
                            },
                        ),
                    };
                    solve_count(&inst, opts.precision, "table1", opts.seed, t)
                })
                .collect();
            let counts: Vec<Option<usize>> = trial_recs.iter().map(|r| r.segment_count).collect();
            row.push(CellStat::from_counts(&counts));
            records.extend(trial_recs);
        }
        cells.push(row);
    }

    Ok(Table1 {
        dims: opts.dims.clone(),
        sigma_labels: opts.sigmas.iter().map(|s| s.label()).collect(),
        cells,
        precision: opts.precision,
        seed: opts.seed,
        trials: opts.trials,
        records,
    })
}

fn trials_for(spec: SigmaSpec, trials: usize) -> usize {
    match spec {
        SigmaSpec::Noiseless => 1, // deterministic: a single run suffices
        SigmaSpec::NegLog10(_) => trials,
    }
}
