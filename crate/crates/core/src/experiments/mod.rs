//! Parameter sweeps over n and T_init, per-cell summaries, scaling fits and
//! bloat tracking.
//!
//! Output schemas:
//!
//! * `raw.csv`: one row per run, columns
//!   `run_id,problem,bloat_control,k_dist,n,t_init,seed,iterations,exhausted,max_size,final_size,final_fitness,wall_ns`.
//!   `iterations` equals the budget for exhausted runs. `wall_ns` is 0 unless
//!   wall-clock recording is enabled.
//! * `summary.csv`: one row per cell, see [`CellSummary`]. Iteration
//!   statistics cover successful runs only and are empty when there are none.
//! * `bloat.csv`: one row per cell, see [`BloatRow`].
//! * `fit.json`: array of [`FitResult`] for every model the grid supports.

mod fit;
mod plot;

use std::fs;
use std::io::{Read, Write};
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::{run, InitSpec, RunConfig, TraceMode};
use crate::fitness::Problem;
use crate::mutation::{derive_seed, KDistribution};
use crate::tree::OrderTracking;

pub use fit::{
    fit_scaling, points_from_summaries, FitResult, RatioRow, ScalingModel, ScalingPoint,
};
pub use plot::{iterations_vs_n_svg, iterations_vs_t_init_svg, write_plots};

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "GP_LAB_THREADS";

/// Initial tree family; the leaf count comes from the T_init grid.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SweepInit {
    AllNegOfVar {
        var: u32,
    },
    RandomLiterals,
    /// Fixed leaves; the grid's T_init labels the cell but does not change the tree.
    Explicit {
        leaves: String,
    },
}

impl SweepInit {
    fn init_for(&self, t_init: usize) -> InitSpec {
        match self {
            SweepInit::AllNegOfVar { var } => InitSpec::AllNegOfVar {
                var: *var,
                count: t_init,
            },
            SweepInit::RandomLiterals => InitSpec::RandomLiterals { count: t_init },
            SweepInit::Explicit { leaves } => InitSpec::Explicit {
                leaves: leaves.clone(),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub problem: Problem,
    pub bloat_control: bool,
    #[serde(default)]
    pub k_dist: KDistribution,
    pub init: SweepInit,
    pub n_values: Vec<u32>,
    pub t_init_values: Vec<usize>,
    #[serde(default = "default_repetitions")]
    pub repetitions: u64,
    pub master_seed: u64,
    /// Per-run budget; defaults to [`default_budget`].
    #[serde(default)]
    pub max_iterations: Option<u64>,
    #[serde(default)]
    pub stop_at_any_optimum: bool,
    #[serde(default)]
    pub order_tracking: OrderTracking,
    /// Worker count; defaults to all cores. Capped by `GP_LAB_THREADS`.
    #[serde(default)]
    pub threads: Option<usize>,
    /// Fill `wall_ns` with measured run times. Off by default so that repeated
    /// sweeps produce byte-identical CSV.
    #[serde(default)]
    pub record_wall_time: bool,
}

fn default_repetitions() -> u64 {
    50
}

/// 200·(T·ln(T + 2) + n·ln³(n + 2)), rounded up.
pub fn default_budget(t_init: usize, n: u32) -> u64 {
    let t = t_init as f64;
    let n = f64::from(n);
    (200.0 * (t * (t + 2.0).ln() + n * (n + 2.0).ln().powi(3))).ceil() as u64
}

/// T_min = max(T_init, n·ln²n).
pub fn t_min(t_init: usize, n: u32) -> f64 {
    let nf = f64::from(n);
    (t_init as f64).max(nf * nf.ln().powi(2))
}

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: SweepConfig = crate::config::from_json(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_values.is_empty() {
            return Err(Error::config("n_values", "must not be empty"));
        }
        if self.t_init_values.is_empty() {
            return Err(Error::config("t_init_values", "must not be empty"));
        }
        if self.repetitions == 0 {
            return Err(Error::config("repetitions", "must be at least 1"));
        }
        if self.max_iterations == Some(0) {
            return Err(Error::config("max_iterations", "must be at least 1"));
        }
        if self.threads == Some(0) {
            return Err(Error::config("threads", "must be at least 1"));
        }
        for (c, (n, t)) in self.cells().into_iter().enumerate() {
            self.run_config(n, t, 0).validate().map_err(|e| match e {
                Error::Config { key, reason } => {
                    Error::config(key, format!("{reason} (cell {c}: n = {n}, t_init = {t})"))
                }
                other => other,
            })?;
        }
        Ok(())
    }

    /// Grid cells in output order: n-major, then T_init.
    pub fn cells(&self) -> Vec<(u32, usize)> {
        self.n_values
            .iter()
            .flat_map(|&n| self.t_init_values.iter().map(move |&t| (n, t)))
            .collect()
    }

    /// Run configuration for one repetition of a cell.
    pub fn run_config(&self, n: u32, t_init: usize, seed: u64) -> RunConfig {
        RunConfig {
            problem: self.problem,
            bloat_control: self.bloat_control,
            k_dist: self.k_dist,
            n,
            init: self.init.init_for(t_init),
            seed,
            max_iterations: self
                .max_iterations
                .unwrap_or_else(|| default_budget(t_init, n)),
            trace: TraceMode::Off,
            stop_at_any_optimum: self.stop_at_any_optimum,
            order_tracking: self.order_tracking,
        }
    }

    fn worker_count(&self) -> usize {
        let cap = std::env::var(THREADS_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&v| v > 0);
        let wanted = self
            .threads
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
        cap.map_or(wanted, |c| wanted.min(c)).max(1)
    }
}

/// One run of a sweep. Field order is the CSV column order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawRow {
    pub run_id: u64,
    pub problem: Problem,
    pub bloat_control: bool,
    pub k_dist: KDistribution,
    pub n: u32,
    pub t_init: usize,
    pub seed: u64,
    pub iterations: u64,
    pub exhausted: bool,
    pub max_size: usize,
    pub final_size: usize,
    pub final_fitness: u32,
    pub wall_ns: u64,
}

/// Aggregates of one grid cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub n: u32,
    pub t_init: usize,
    /// max(T_init, n·ln²n).
    pub t_min: f64,
    pub runs: u64,
    pub exhausted: u64,
    pub success_rate: f64,
    pub mean_iterations: Option<f64>,
    pub median_iterations: Option<f64>,
    pub std_iterations: Option<f64>,
    pub mean_max_size: f64,
    pub max_max_size: usize,
    /// Some run exhausted its budget.
    pub flagged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepOutput {
    pub raw: Vec<RawRow>,
    pub summaries: Vec<CellSummary>,
}

/// Runs every (cell, repetition) pair. Run `rep` of cell `c` uses seed
/// `derive_seed(master_seed, [c, rep])` and run id `c·repetitions + rep`, so
/// the output does not depend on scheduling or worker count.
pub fn sweep(config: &SweepConfig) -> Result<SweepOutput> {
    config.validate()?;
    let cells = config.cells();
    let reps = config.repetitions;
    let jobs: Vec<(u64, u64)> = (0..cells.len() as u64)
        .flat_map(|c| (0..reps).map(move |r| (c, r)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.worker_count())
        .build()
        .map_err(|e| Error::config("threads", e.to_string()))?;
    let raw: Vec<RawRow> = pool.install(|| {
        jobs.par_iter()
            .map(|&(c, rep)| {
                let (n, t_init) = cells[c as usize];
                let seed = derive_seed(config.master_seed, &[c, rep]);
                let rc = config.run_config(n, t_init, seed);
                let start = Instant::now();
                let result = run(&rc)?;
                let wall_ns = if config.record_wall_time {
                    start.elapsed().as_nanos() as u64
                } else {
                    0
                };
                Ok(RawRow {
                    run_id: c * reps + rep,
                    problem: config.problem,
                    bloat_control: config.bloat_control,
                    k_dist: config.k_dist,
                    n,
                    t_init: result.t_init,
                    seed,
                    iterations: result.iterations_to_opt,
                    exhausted: result.exhausted,
                    max_size: result.max_size,
                    final_size: result.final_size,
                    final_fitness: result.final_fitness,
                    wall_ns,
                })
            })
            .collect::<Result<_>>()
    })?;
    let summaries = cells
        .iter()
        .enumerate()
        .map(|(c, &(n, t))| {
            let lo = c * reps as usize;
            summarize(n, t, &raw[lo..lo + reps as usize])
        })
        .collect();
    Ok(SweepOutput { raw, summaries })
}

/// Summary of the runs of one cell. Order of `rows` does not matter.
pub fn summarize(n: u32, t_init: usize, rows: &[RawRow]) -> CellSummary {
    let mut done: Vec<u64> = rows
        .iter()
        .filter(|r| !r.exhausted)
        .map(|r| r.iterations)
        .collect();
    done.sort_unstable();
    let runs = rows.len() as u64;
    let exhausted = runs - done.len() as u64;
    let k = done.len() as f64;
    let (mean, median, std) = if done.is_empty() {
        (None, None, None)
    } else {
        let sum: u128 = done.iter().map(|&x| u128::from(x)).sum();
        let mean = sum as f64 / k;
        let mid = done.len() / 2;
        let median = if done.len() % 2 == 1 {
            done[mid] as f64
        } else {
            (done[mid - 1] as f64 + done[mid] as f64) / 2.0
        };
        let std = if done.len() > 1 {
            let ss: f64 = done.iter().map(|&x| (x as f64 - mean).powi(2)).sum();
            (ss / (k - 1.0)).sqrt()
        } else {
            0.0
        };
        (Some(mean), Some(median), Some(std))
    };
    let size_sum: u128 = rows.iter().map(|r| r.max_size as u128).sum();
    CellSummary {
        n,
        t_init,
        t_min: t_min(t_init, n),
        runs,
        exhausted,
        success_rate: if runs == 0 {
            0.0
        } else {
            done.len() as f64 / runs as f64
        },
        mean_iterations: mean,
        median_iterations: median,
        std_iterations: std,
        mean_max_size: if runs == 0 {
            0.0
        } else {
            size_sum as f64 / runs as f64
        },
        max_max_size: rows.iter().map(|r| r.max_size).max().unwrap_or(0),
        flagged: exhausted > 0,
    }
}

/// Quantiles of max_size / T_min for one cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BloatRow {
    pub n: u32,
    pub t_init: usize,
    pub t_min: f64,
    pub runs: u64,
    pub q50: f64,
    pub q95: f64,
    pub q100: f64,
}

/// Nearest-rank quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let rank = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    sorted[rank - 1]
}

/// Per-cell quantiles of max_size / T_min, cells in first-appearance order.
pub fn bloat_report(raw: &[RawRow]) -> Vec<BloatRow> {
    let mut keys: Vec<(u32, usize)> = Vec::new();
    for r in raw {
        if !keys.contains(&(r.n, r.t_init)) {
            keys.push((r.n, r.t_init));
        }
    }
    keys.into_iter()
        .map(|(n, t)| {
            let tm = t_min(t, n);
            let mut ratios: Vec<f64> = raw
                .iter()
                .filter(|r| r.n == n && r.t_init == t)
                .map(|r| r.max_size as f64 / tm)
                .collect();
            ratios.sort_by(f64::total_cmp);
            BloatRow {
                n,
                t_init: t,
                t_min: tm,
                runs: ratios.len() as u64,
                q50: quantile(&ratios, 0.5),
                q95: quantile(&ratios, 0.95),
                q100: quantile(&ratios, 1.0),
            }
        })
        .collect()
}

/// Fraction of runs whose max_size stays within `factor`·T_init.
pub fn fraction_within(raw: &[RawRow], factor: f64) -> f64 {
    if raw.is_empty() {
        return 1.0;
    }
    let ok = raw
        .iter()
        .filter(|r| r.max_size as f64 <= factor * r.t_init as f64)
        .count();
    ok as f64 / raw.len() as f64
}

fn write_rows<T: Serialize, W: Write>(rows: &[T], header: &[&str], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record(header)?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn read_rows<T: serde::de::DeserializeOwned, R: Read>(input: R) -> Result<Vec<T>> {
    csv::Reader::from_reader(input)
        .deserialize()
        .map(|r| r.map_err(Error::from))
        .collect()
}

pub const RAW_COLUMNS: [&str; 13] = [
    "run_id",
    "problem",
    "bloat_control",
    "k_dist",
    "n",
    "t_init",
    "seed",
    "iterations",
    "exhausted",
    "max_size",
    "final_size",
    "final_fitness",
    "wall_ns",
];

pub const SUMMARY_COLUMNS: [&str; 12] = [
    "n",
    "t_init",
    "t_min",
    "runs",
    "exhausted",
    "success_rate",
    "mean_iterations",
    "median_iterations",
    "std_iterations",
    "mean_max_size",
    "max_max_size",
    "flagged",
];

const BLOAT_COLUMNS: [&str; 7] = ["n", "t_init", "t_min", "runs", "q50", "q95", "q100"];

pub fn write_raw_csv<W: Write>(rows: &[RawRow], out: W) -> Result<()> {
    write_rows(rows, &RAW_COLUMNS, out)
}

pub fn read_raw_csv<R: Read>(input: R) -> Result<Vec<RawRow>> {
    read_rows(input)
}

pub fn write_summary_csv<W: Write>(rows: &[CellSummary], out: W) -> Result<()> {
    write_rows(rows, &SUMMARY_COLUMNS, out)
}

pub fn read_summary_csv<R: Read>(input: R) -> Result<Vec<CellSummary>> {
    read_rows(input)
}

pub fn write_bloat_csv<W: Write>(rows: &[BloatRow], out: W) -> Result<()> {
    write_rows(rows, &BLOAT_COLUMNS, out)
}

/// Fits every model the summaries support; models whose grid is degenerate are skipped.
pub fn fit_all(summaries: &[CellSummary]) -> Vec<FitResult> {
    let points = points_from_summaries(summaries);
    ScalingModel::ALL
        .iter()
        .filter_map(|&m| fit_scaling(&points, m, fit::DEFAULT_SPREAD_THRESHOLD).ok())
        .collect()
}

/// Writes raw.csv, summary.csv, bloat.csv and fit.json into `dir`.
pub fn write_outputs(output: &SweepOutput, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_raw_csv(&output.raw, fs::File::create(dir.join("raw.csv"))?)?;
    write_summary_csv(
        &output.summaries,
        fs::File::create(dir.join("summary.csv"))?,
    )?;
    write_bloat_csv(
        &bloat_report(&output.raw),
        fs::File::create(dir.join("bloat.csv"))?,
    )?;
    let fits = fit_all(&output.summaries);
    let mut f = fs::File::create(dir.join("fit.json"))?;
    serde_json::to_writer_pretty(&mut f, &fits)?;
    f.write_all(b"\n")?;
    Ok(())
}
