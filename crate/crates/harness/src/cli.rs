//! Command-line surface.
//!
//! Subcommands: `path` (solve one instance and print its segments),
//! `table1` (the smoothing study), `mnist` (patch regression), `bounds`
//! (per-instance bound report), and `oracle-check` (homotopy vs brute-force
//! batch). Exit codes: 0 success, 1 failed assertion or computation,
//! 2 usage errors.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use lasso_lab_core::bounds::instance_bound_report;
use lasso_lab_core::dd::Dd;
use lasso_lab_core::gen::{gen_adversarial, gen_gaussian, smooth, SmoothingSpec};
use lasso_lab_core::homotopy::{solve_path, SolveOpts};
use lasso_lab_core::instance::{ProblemInstance, VarianceMode};
use lasso_lab_core::oracle::enumerate_sign_patterns;
use lasso_lab_core::records::{InstanceRecord, PathRecord};
use lasso_lab_core::scalar::PrecisionMode;

use crate::error::HarnessError;
use crate::idx::load_idx_images;
use crate::mnist::{run_mnist, MnistOptions};
use crate::table1::{run_table1, SigmaSpec, Table1Options};

/// Environment variable providing the default output directory.
pub const OUT_DIR_ENV: &str = "LASSO_LAB_OUT";

// Stdout may be a closed pipe (`lasso-lab ... | head`); ignore write errors
// instead of panicking.
macro_rules! out {
    ($($arg:tt)*) => {{
        use std::io::Write;
        let _ = write!(std::io::stdout(), $($arg)*);
    }};
}
macro_rules! outln {
    ($($arg:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

#[derive(Parser, Debug)]
#[command(
    name = "lasso-lab",
    about = "Exact Lasso regularization paths: worst-case constructions, smoothing studies, and complexity diagnostics",
    version
)]
struct Cli {
    /// Output directory for result files (default: $LASSO_LAB_OUT or `.`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Result file format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Precision {
    Standard,
    Extended,
}

impl From<Precision> for PrecisionMode {
    fn from(p: Precision) -> Self {
        match p {
            Precision::Standard => PrecisionMode::Standard,
            Precision::Extended => PrecisionMode::Extended,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Generator {
    Adversarial,
    Gaussian,
}

#[derive(Args, Debug)]
struct InstanceArgs {
    /// Load an instance record instead of generating one.
    #[arg(long, conflicts_with = "gen")]
    file: Option<PathBuf>,
    /// Instance generator.
    #[arg(long, value_enum)]
    gen: Option<Generator>,
    /// Dimension (columns).
    #[arg(long, default_value_t = 4)]
    d: usize,
    /// Rows for the gaussian generator (default d + 3).
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Per-entry gaussian smoothing level applied to the instance.
    #[arg(long)]
    sigma: Option<f64>,
    /// Smoothing variance convention.
    #[arg(long, value_enum, default_value_t = VarianceArg::PerEntry)]
    variance_mode: VarianceArg,
    /// Rescale the target to unit norm after smoothing (off by default:
    /// smoothing leaves y untouched).
    #[arg(long)]
    renormalize: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum VarianceArg {
    PerEntry,
    Scaled,
}

impl From<VarianceArg> for VarianceMode {
    fn from(v: VarianceArg) -> Self {
        match v {
            VarianceArg::PerEntry => VarianceMode::PerEntry,
            VarianceArg::Scaled => VarianceMode::Scaled,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve one instance and print its segments.
    Path {
        #[command(flatten)]
        inst: InstanceArgs,
        #[arg(long, value_enum, default_value_t = Precision::Extended)]
        precision: Precision,
        /// Stop the path at this regularization value.
        #[arg(long, default_value_t = 0.0)]
        lambda_min: f64,
        /// Cap on the number of segments.
        #[arg(long, default_value_t = 1_000_000)]
        max_segments: usize,
        /// Also write the generated instance as a record file.
        #[arg(long)]
        save_instance: bool,
    },
    /// Worst-case smoothing study (rows: 1/SNR, columns: dimension).
    Table1 {
        /// Dimensions, e.g. `4,5,6`.
        #[arg(long, value_delimiter = ',', default_value = "4,5,6,7,8")]
        dims: Vec<usize>,
        /// Noise rows as -log10(sigma), with `inf` for the noiseless run.
        #[arg(long, value_delimiter = ',', default_value = "inf,0,2,4,6,8,10")]
        sigmas: Vec<String>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Precision::Extended)]
        precision: Precision,
    },
    /// Patch regression on an IDX image dataset.
    Mnist {
        /// Path to an IDX image file (e.g. the 60000x28x28 training images).
        #[arg(long)]
        images: PathBuf,
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, value_delimiter = ',', default_value = "3,5,7,9")]
        patch_sizes: Vec<usize>,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Precision::Standard)]
        precision: Precision,
    },
    /// Solve an instance and report every bound-related quantity.
    Bounds {
        #[command(flatten)]
        inst: InstanceArgs,
        #[arg(long, value_enum, default_value_t = Precision::Standard)]
        precision: Precision,
        /// Confidence parameter for the bound formulas.
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        /// Subset sizes for the subspace-distance estimate.
        #[arg(long, value_delimiter = ',', default_value = "2,3")]
        s: Vec<usize>,
        /// Subset samples when exhaustive enumeration is too large.
        #[arg(long, default_value_t = 200)]
        gamma_trials: usize,
    },
    /// Batch comparison of the homotopy solver against the sign-pattern
    /// enumeration oracle on random instances.
    OracleCheck {
        #[arg(long, default_value_t = 4)]
        d: usize,
        /// Rows (default d + 3).
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

fn out_dir(cli_out: &Option<PathBuf>) -> PathBuf {
    cli_out
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn write_out(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, HarnessError> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, contents)?;
    Ok(path)
}

fn build_instance(args: &InstanceArgs) -> Result<ProblemInstance, HarnessError> {
    let base = if let Some(file) = &args.file {
        let text = fs::read_to_string(file)?;
        let rec: InstanceRecord = serde_json::from_str(&text)?;
        rec.into_instance()?
    } else {
        match args.gen.unwrap_or(Generator::Adversarial) {
            Generator::Adversarial => gen_adversarial(args.d, PrecisionMode::Extended)?,
            Generator::Gaussian => {
                let n = args.n.unwrap_or(args.d + 3);
                gen_gaussian(n, args.d, args.seed)?
            }
        }
    };
    let smoothed = match args.sigma {
        Some(sigma) if sigma != 0.0 => smooth(
            &base,
            &SmoothingSpec {
                sigma,
                variance_mode: args.variance_mode.into(),
                seed: args.seed,
            },
        ),
        _ => base,
    };
    Ok(if args.renormalize {
        smoothed.normalize()?
    } else {
        smoothed
    })
}

fn signs_string(signs: &[i8]) -> String {
    signs
        .iter()
        .map(|s| match s {
            1 => '+',
            -1 => '-',
            _ => '0',
        })
        .collect()
}

/// Entry point; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // Help/version requests exit 0; genuine usage errors exit 2.
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(HarnessError::InvalidArguments(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn dispatch(cli: &Cli) -> Result<i32, HarnessError> {
    let dir = out_dir(&cli.out);
    match &cli.command {
        Command::Path {
            inst,
            precision,
            lambda_min,
            max_segments,
            save_instance,
        } => {
            let instance = build_instance(inst)?;
            if *save_instance {
                let rec = InstanceRecord::from_instance(&instance);
                let path = write_out(&dir, "instance.json", &serde_json::to_string_pretty(&rec)?)?;
                outln!("instance record written to {}", path.display());
            }
            let opts = SolveOpts {
                lambda_min: *lambda_min,
                max_segments: *max_segments,
                ..Default::default()
            };
            let mode: PrecisionMode = (*precision).into();
            let (record, summary) = match mode {
                PrecisionMode::Standard => {
                    let p = solve_path::<f64>(&instance, &opts).map_err(|e| e.into_failure())?;
                    (
                        PathRecord::from_path(&p),
                        summarize(&p.sign_sequence(), &p.breakpoints()),
                    )
                }
                PrecisionMode::Extended => {
                    let p = solve_path::<Dd>(&instance, &opts).map_err(|e| e.into_failure())?;
                    let bps: Vec<f64> = p.breakpoints().iter().map(|v| v.to_f64()).collect();
                    (
                        PathRecord::from_path(&p),
                        summarize(&p.sign_sequence(), &bps),
                    )
                }
            };
            outln!(
                "{} segments ({} breakpoints), precision {}, max KKT violation {:.3e}",
                record.count,
                record.count - 1,
                record.precision.name(),
                record.max_kkt_violation
            );
            out!("{summary}");
            match cli.format {
                Format::Json => {
                    let p = write_out(&dir, "path.json", &serde_json::to_string_pretty(&record)?)?;
                    outln!("path record written to {}", p.display());
                }
                Format::Csv => {
                    let mut csv = String::from("segment,lambda_hi,lambda_lo,signs\n");
                    for (k, seg) in record.segments.iter().enumerate() {
                        csv.push_str(&format!(
                            "{},{},{},{}\n",
                            k, seg.lambda_hi, seg.lambda_lo, seg.signs
                        ));
                    }
                    let p = write_out(&dir, "path.csv", &csv)?;
                    outln!("segment table written to {}", p.display());
                }
            }
            Ok(0)
        }
        Command::Table1 {
            dims,
            sigmas,
            trials,
            seed,
            precision,
        } => {
            if dims.is_empty() || *trials == 0 {
                return Err(HarnessError::InvalidArguments(
                    "need at least one dimension and one trial".into(),
                ));
            }
            let sigmas = sigmas
                .iter()
                .map(|s| SigmaSpec::parse(s))
                .collect::<Result<Vec<_>, _>>()?;
            let table = run_table1(&Table1Options {
                dims: dims.clone(),
                sigmas,
                trials: *trials,
                seed: *seed,
                precision: (*precision).into(),
            })?;
            let csv = table.to_csv();
            match cli.format {
                Format::Csv => out!("{csv}"),
                Format::Json => outln!("{}", serde_json::to_string_pretty(&table)?),
            }
            // CSV is byte-stable across reruns; timestamps live only in the
            // JSON metadata wrapper.
            let csv_path = write_out(&dir, "table1.csv", &csv)?;
            write_out(&dir, "table1.json", &wrap_json(&table)?)?;
            write_out(&dir, "plot_table1.py", PLOT_TABLE1_PY)?;
            outln!(
                "results written to {} (+ table1.json, plot_table1.py)",
                csv_path.display()
            );
            let any_failure = table
                .cells
                .iter()
                .flatten()
                .any(|c| c.failures == c.trials && c.trials > 0);
            Ok(if any_failure { 1 } else { 0 })
        }
        Command::Mnist {
            images,
            n,
            patch_sizes,
            trials,
            seed,
            precision,
        } => {
            let dataset = load_idx_images(images)?;
            outln!(
                "loaded {} images of {}x{} (digest {:016x})",
                dataset.count, dataset.rows, dataset.cols, dataset.source_digest
            );
            let result = run_mnist(
                &dataset,
                &MnistOptions {
                    n: *n,
                    patch_sizes: patch_sizes.clone(),
                    trials: *trials,
                    seed: *seed,
                    precision: (*precision).into(),
                },
            )?;
            let csv = result.to_csv();
            match cli.format {
                Format::Csv => out!("{csv}"),
                Format::Json => outln!("{}", serde_json::to_string_pretty(&result)?),
            }
            outln!(
                "log-log slope of mean count vs feature dimension: {:.4}",
                result.log_log_slope()
            );
            let csv_path = write_out(&dir, "mnist.csv", &csv)?;
            write_out(&dir, "mnist.json", &wrap_json(&result)?)?;
            write_out(&dir, "plot_mnist.py", PLOT_MNIST_PY)?;
            outln!(
                "results written to {} (+ mnist.json, plot_mnist.py)",
                csv_path.display()
            );
            let any_dead_row = result
                .rows
                .iter()
                .any(|r| r.stat.failures == r.stat.trials && r.stat.trials > 0);
            Ok(if any_dead_row { 1 } else { 0 })
        }
        Command::Bounds {
            inst,
            precision,
            delta,
            s,
            gamma_trials,
        } => {
            let instance = build_instance(inst)?;
            let report = instance_bound_report(
                &instance,
                *delta,
                s,
                (*precision).into(),
                *gamma_trials,
                inst.seed,
            )?;
            let text = serde_json::to_string_pretty(&report)?;
            outln!("{text}");
            let written = match cli.format {
                Format::Json => write_out(&dir, "bounds.json", &text)?,
                Format::Csv => {
                    let mut csv = String::from(
                        "n,d,sigma,delta,alpha,beta,l_w,l_u,measured_count,thm1,lipschitz_w_ok,lipschitz_u_ok\n",
                    );
                    csv.push_str(&format!(
                        "{},{},{},{},{},{},{},{},{},{},{},{}\n",
                        report.n,
                        report.d,
                        report.sigma,
                        report.delta,
                        report.alpha,
                        report.beta,
                        report.l_w,
                        report.l_u,
                        report.measured_count,
                        report.thm1_value,
                        report.lipschitz_w_ok,
                        report.lipschitz_u_ok
                    ));
                    write_out(&dir, "bounds.csv", &csv)?
                }
            };
            outln!("report written to {}", written.display());
            Ok(if report.lipschitz_w_ok && report.lipschitz_u_ok {
                0
            } else {
                1
            })
        }
        Command::OracleCheck { d, n, trials, seed } => {
            if *d > lasso_lab_core::oracle::ENUMERATION_MAX_D {
                return Err(HarnessError::InvalidArguments(format!(
                    "oracle enumeration supports d <= {}",
                    lasso_lab_core::oracle::ENUMERATION_MAX_D
                )));
            }
            let n = n.unwrap_or(d + 3);
            let mut mismatches = 0usize;
            for t in 0..*trials as u64 {
                let inst = gen_gaussian(n, *d, seed.wrapping_add(t))?;
                let hom = solve_path::<f64>(&inst, &SolveOpts::default())
                    .map_err(|e| e.into_failure())?;
                let oracle = enumerate_sign_patterns::<f64>(&inst)
                    .map_err(|e| HarnessError::InvalidArguments(e.to_string()))?;
                let signs_ok = hom.sign_sequence() == oracle.sign_sequence();
                let bps_ok = hom
                    .breakpoints()
                    .iter()
                    .zip(oracle.breakpoints())
                    .all(|(h, o)| (h - o).abs() <= 1e-9 * h.abs().max(o.abs()));
                if !(signs_ok && bps_ok) {
                    mismatches += 1;
                    outln!(
                        "trial {t}: MISMATCH (signs ok: {signs_ok}, breakpoints ok: {bps_ok})"
                    );
                }
            }
            outln!(
                "oracle-check: {}/{} trials matched (d={d}, n={n})",
                *trials - mismatches,
                trials
            );
            Ok(if mismatches == 0 { 0 } else { 1 })
        }
    }
}

/// JSON result wrapper; run timestamps live here and never in the CSVs.
fn wrap_json<T: serde::Serialize>(payload: &T) -> Result<String, HarnessError> {
    let now_ms = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0);
    let doc = serde_json::json!({
        "generated_unix_ms": now_ms,
        "result": payload,
    });
    Ok(serde_json::to_string_pretty(&doc)?)
}

const PLOT_TABLE1_PY: &str = r#"#!/usr/bin/env python3
"""Plot path complexity against dimension for each smoothing level."""
import csv
import math
import sys

import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else "table1.csv"
with open(path) as fh:
    rows = list(csv.reader(fh))
dims = [int(h.split("=")[1]) for h in rows[0][1:]]
fig, ax = plt.subplots()
for row in rows[1:]:
    label = ("no noise" if row[0] == "inf" else f"sigma=1e-{row[0]}")
    vals = []
    for cell in row[1:]:
        try:
            vals.append(float(cell.split("(")[0]))
        except ValueError:
            vals.append(math.nan)
    ax.plot(dims, vals, marker="o", label=label)
ax.set_xlabel("dimension d")
ax.set_ylabel("mean number of linear segments")
ax.set_yscale("log")
ax.legend(fontsize=7)
fig.tight_layout()
fig.savefig("table1.png", dpi=160)
print("wrote table1.png")
"#;

const PLOT_MNIST_PY: &str = r#"#!/usr/bin/env python3
"""Plot mean path complexity against patch size and feature dimension."""
import csv
import sys

import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else "mnist.csv"
with open(path) as fh:
    rows = list(csv.DictReader(fh))
rows = [r for r in rows if r["mean_count"] != "failed"]
sizes = [int(r["patch_size"]) for r in rows]
dims = [int(r["feature_dim"]) for r in rows]
means = [float(r["mean_count"].split("(")[0]) for r in rows]
fig, (a1, a2) = plt.subplots(1, 2, figsize=(9, 4))
a1.plot(sizes, means, marker="o")
a1.set_xlabel("patch size")
a1.set_ylabel("mean number of linear segments")
a2.loglog(dims, means, marker="o")
a2.set_xlabel("feature dimension")
a2.set_ylabel("mean number of linear segments")
fig.tight_layout()
fig.savefig("mnist.png", dpi=160)
print("wrote mnist.png")
"#;

fn summarize(seq: &[Vec<i8>], breakpoints: &[f64]) -> String {
    let mut out = String::new();
    let show = seq.len().min(6);
    for (k, signs) in seq.iter().enumerate().take(show) {
        let lo = breakpoints.get(k).copied().unwrap_or(0.0);
        out.push_str(&format!(
            "  seg {k:4}  signs {}  down to {lo:.6e}\n",
            signs_string(signs)
        ));
    }
    if seq.len() > show {
        out.push_str(&format!("  ... {} more segments\n", seq.len() - show));
    }
    out
}
