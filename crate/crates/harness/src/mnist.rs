//! Patch regression on an image dataset: predict a patch's center pixel
//! from its surrounding pixels and measure the path complexity as the patch
//! (hence feature dimension) grows.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use lasso_lab_core::factor::ActiveSetFactor;
use lasso_lab_core::homotopy::{solve_path_any, SolveOpts};
use lasso_lab_core::instance::{InstanceMeta, ProblemInstance};
use lasso_lab_core::mat::{norm2, DenseMatrix};
use lasso_lab_core::rng::CounterRng;
use lasso_lab_core::scalar::PrecisionMode;

use crate::error::HarnessError;
use crate::idx::ImageDataset;
use crate::runrec::{CellStat, RunRecord, RUN_RECORD_SCHEMA};

#[derive(Clone, Debug)]
pub struct MnistOptions {
    pub n: usize,
    pub patch_sizes: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub precision: PrecisionMode,
}

impl Default for MnistOptions {
    fn default() -> Self {
        MnistOptions {
            n: 1000,
            patch_sizes: vec![3, 5, 7, 9],
            trials: 20,
            seed: 1,
            precision: PrecisionMode::Standard,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MnistRow {
    pub patch_size: usize,
    /// Nominal feature dimension `patch_size^2 - 1` (center discarded).
    pub feature_dim: usize,
    pub stat: CellStat,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MnistResult {
    pub rows: Vec<MnistRow>,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub records: Vec<RunRecord>,
}

impl MnistResult {
    /// Least-squares slope of `ln(mean count)` against `ln(feature_dim)`.
    pub fn log_log_slope(&self) -> f64 {
        let pts: Vec<(f64, f64)> = self
            .rows
            .iter()
            .filter(|r| r.stat.mean.is_finite() && r.stat.mean > 0.0)
            .map(|r| ((r.feature_dim as f64).ln(), r.stat.mean.ln()))
            .collect();
        let n = pts.len() as f64;
        let sx: f64 = pts.iter().map(|p| p.0).sum();
        let sy: f64 = pts.iter().map(|p| p.1).sum();
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        (n * sxy - sx * sy) / (n * sxx - sx * sx)
    }

    /// Both the patch size and the feature dimension are emitted, since
    /// either can serve as the x axis.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("patch_size,feature_dim,mean_count,std,min,max,failures\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.patch_size,
                r.feature_dim,
                r.stat.csv_cell(),
                r.stat.std,
                r.stat.min,
                r.stat.max,
                r.stat.failures
            ));
        }
        out
    }
}

/// Builds one trial's regression instance: `n` uniformly sampled images,
/// one uniformly random fully-interior patch per image, features scaled to
/// `[0, 1]`, target normalized to unit norm, all-zero columns dropped.
///
/// Returns the instance plus the indices of kept columns. A rank-deficient
/// feature matrix yields `Err(RankDeficient)`.
pub fn build_patch_instance(
    dataset: &ImageDataset,
    n: usize,
    patch: usize,
    seed: u64,
    stream: u64,
) -> Result<(ProblemInstance, Vec<usize>), HarnessError> {
    assert!(patch >= 3 && patch % 2 == 1, "patch size must be odd, >= 3");
    let dim = patch * patch - 1;
    if dim > n {
        return Err(HarnessError::InvalidArguments(format!(
            "feature dimension {dim} exceeds sample count {n}"
        )));
    }
    let half = patch / 2;
    if dataset.rows < patch || dataset.cols < patch {
        return Err(HarnessError::InvalidArguments(format!(
            "{}x{} images cannot host a {patch}x{patch} patch",
            dataset.rows, dataset.cols
        )));
    }
    let mut rng = CounterRng::new(seed, stream);
    let mut features = vec![0.0f64; n * dim];
    let mut y = vec![0.0f64; n];
    for i in 0..n {
        let img = rng.next_below(dataset.count);
        let cr = half + rng.next_below(dataset.rows - 2 * half);
        let cc = half + rng.next_below(dataset.cols - 2 * half);
        let mut k = 0usize;
        for dr in 0..patch {
            for dc in 0..patch {
                let r = cr + dr - half;
                let c = cc + dc - half;
                let v = dataset.pixel(img, r, c) as f64 / 255.0;
                if dr == half && dc == half {
                    y[i] = v;
                } else {
                    // column-major: entry (i, k)
                    features[k * n + i] = v;
                    k += 1;
                }
            }
        }
    }

    // Normalize the target to unit norm.
    let y_norm = norm2(&y);
    if y_norm == 0.0 {
        return Err(HarnessError::RankDeficient);
    }
    let scale = 1.0 / y_norm;
    for v in y.iter_mut() {
        *v *= scale;
    }

    // Drop all-zero columns.
    let x_full = DenseMatrix::from_col_major(n, dim, features);
    let kept: Vec<usize> = (0..dim)
        .filter(|&j| x_full.col(j).iter().any(|&v| v != 0.0))
        .collect();
    let x = x_full.select_columns(&kept);
    if x.cols() == 0 {
        return Err(HarnessError::RankDeficient);
    }

    // Rank check via the pivoted Cholesky of the full Gram.
    if ActiveSetFactor::from_active(&x, &(0..x.cols()).collect::<Vec<_>>()).is_err() {
        return Err(HarnessError::RankDeficient);
    }

    let inst = ProblemInstance::new(
        x,
        y,
        InstanceMeta {
            generator: format!("patch{patch}"),
            seed: Some(seed),
            trial: Some(stream),
            normalization_scale: Some(scale),
            normalized: true,
            ..Default::default()
        },
    )?;
    Ok((inst, kept))
}

/// Runs the patch-regression experiment: mean segment count per patch size.
/// A rank-deficient trial is resampled once (fresh sub-stream), then marked
/// failed.
pub fn run_mnist(dataset: &ImageDataset, opts: &MnistOptions) -> Result<MnistResult, HarnessError> {
    if dataset.count < opts.n {
        return Err(HarnessError::InvalidArguments(format!(
            "dataset has {} images, fewer than the requested n = {}",
            dataset.count, opts.n
        )));
    }
    let mut rows = Vec::new();
    let mut records = Vec::new();
    for &patch in &opts.patch_sizes {
        if patch < 3 || patch % 2 == 0 {
            return Err(HarnessError::InvalidArguments(format!(
                "patch sizes must be odd and >= 3, got {patch}"
            )));
        }
        let trial_recs: Vec<RunRecord> = (0..opts.trials as u64)
            .into_par_iter()
            .map(|t| run_one_trial(dataset, opts, patch, t))
            .collect();
        let counts: Vec<Option<usize>> = trial_recs.iter().map(|r| r.segment_count).collect();
        rows.push(MnistRow {
            patch_size: patch,
            feature_dim: patch * patch - 1,
            stat: CellStat::from_counts(&counts),
        });
        records.extend(trial_recs);
    }
    Ok(MnistResult {
        rows,
        n: opts.n,
        trials: opts.trials,
        seed: opts.seed,
        records,
    })
}

fn run_one_trial(
    dataset: &ImageDataset,
    opts: &MnistOptions,
    patch: usize,
    trial: u64,
) -> RunRecord {
    let start = Instant::now();
    let mut rec = RunRecord {
        schema: RUN_RECORD_SCHEMA.into(),
        experiment: "mnist".into(),
        generator: format!("patch{patch}"),
        n: opts.n,
        d: patch * patch - 1,
        sigma: None,
        variance_mode: None,
        seed: opts.seed,
        trial,
        precision: opts.precision,
        segment_count: None,
        breakpoint_count: None,
        kkt_max_violation: None,
        error: None,
        wall_time_ms: 0.0,
    };
    // Attempt 0, and one resample on rank deficiency.
    let mut outcome = None;
    for attempt in 0..2u64 {
        let stream = CounterRng::substream(opts.seed, &[patch as u64, trial, attempt]);
        match build_patch_instance(dataset, opts.n, patch, opts.seed, stream) {
            Ok((inst, _)) => {
                outcome = Some(
                    solve_path_any(&inst, opts.precision, &SolveOpts::default())
                        .map_err(|e| e.to_string()),
                );
                break;
            }
            Err(HarnessError::RankDeficient) if attempt == 0 => continue,
            Err(e) => {
                outcome = Some(Err(e.to_string()));
                break;
            }
        }
    }
    match outcome {
        Some(Ok(path)) => {
            rec.segment_count = Some(path.count());
            rec.breakpoint_count = Some(path.count() - 1);
            rec.kkt_max_violation = Some(path.diagnostics().max_kkt_violation);
        }
        Some(Err(msg)) => rec.error = Some(msg),
        None => rec.error = Some(HarnessError::RankDeficient.to_string()),
    }
    rec.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    rec
}
