//! Reproducible Monte Carlo campaigns.
//!
//! Replicate `r` of sweep entry `s` uses `seed::replicate_seed(base, s, r)`,
//! and results are gathered into a table indexed by `(s, r)`, so output is
//! byte-identical for any thread count.

mod campaigns;
mod config;

pub use campaigns::{run_bias_sweep, run_clt, run_crofton_demo, run_crossing_convergence, run_volume_check};
pub use config::{CampaignConfig, ExperimentKind, HoneycombKind, ShapeKind};

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;

/// One summary row per (sweep value, level).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub sweep_index: usize,
    pub sweep_value: f64,
    pub u: f64,
    pub reps: usize,
    pub mean: f64,
    /// Sample standard deviation over `sqrt(reps)`.
    pub stderr: f64,
    /// Values for [`McCampaignResult::extra_columns`], in order.
    pub extras: Vec<f64>,
}

/// Raw per-replicate values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateRow {
    pub sweep_index: usize,
    pub replicate: usize,
    pub seed: u64,
    pub u: f64,
    pub values: Vec<f64>,
}

/// Output of any campaign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McCampaignResult {
    pub experiment: String,
    pub config_hash: String,
    pub config: BTreeMap<String, String>,
    /// What `mean` and `stderr` summarize.
    pub statistic: String,
    pub extra_columns: Vec<String>,
    pub rows: Vec<SweepRow>,
    pub replicate_columns: Vec<String>,
    pub replicates: Vec<ReplicateRow>,
    pub wall_clock_seconds: f64,
}

impl McCampaignResult {
    /// Extra column `name` of `row`.
    pub fn extra(&self, row: &SweepRow, name: &str) -> Option<f64> {
        self.extra_columns.iter().position(|c| c == name).map(|i| row.extras[i])
    }

    /// Summary rows at level `u`, in sweep order.
    pub fn rows_at(&self, u: f64) -> Vec<&SweepRow> {
        self.rows.iter().filter(|r| r.u == u).collect()
    }

    /// Replicate column `name` at `(sweep_index, u)`.
    pub fn replicate_column(&self, sweep_index: usize, u: f64, name: &str) -> Option<Vec<f64>> {
        let c = self.replicate_columns.iter().position(|x| x == name)?;
        Some(
            self.replicates
                .iter()
                .filter(|r| r.sweep_index == sweep_index && r.u == u)
                .map(|r| r.values[c])
                .collect(),
        )
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        write!(w, "config_hash,sweep_index,sweep_value,u,reps,mean,stderr")?;
        for c in &self.extra_columns {
            write!(w, ",{c}")?;
        }
        writeln!(w)?;
        for r in &self.rows {
            write!(
                w,
                "{},{},{},{},{},{},{}",
                self.config_hash,
                r.sweep_index,
                fmt17(r.sweep_value),
                fmt17(r.u),
                r.reps,
                fmt17(r.mean),
                fmt17(r.stderr)
            )?;
            for x in &r.extras {
                write!(w, ",{}", fmt17(*x))?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn write_replicates_csv<W: Write>(&self, mut w: W) -> Result<()> {
        write!(w, "config_hash,sweep_index,replicate,seed,u")?;
        for c in &self.replicate_columns {
            write!(w, ",{c}")?;
        }
        writeln!(w)?;
        for r in &self.replicates {
            write!(w, "{},{},{},{},{}", self.config_hash, r.sweep_index, r.replicate, r.seed, fmt17(r.u))?;
            for x in &r.values {
                write!(w, ",{}", fmt17(*x))?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Writes whichever of the CSV, replicate CSV and JSON outputs `cfg` names.
    pub fn save(&self, cfg: &CampaignConfig) -> Result<()> {
        let create = |p: &Path| -> Result<std::io::BufWriter<std::fs::File>> {
            Ok(std::io::BufWriter::new(std::fs::File::create(p)?))
        };
        if let Some(p) = &cfg.out {
            self.write_csv(create(p)?)?;
        }
        if let Some(p) = &cfg.replicates_out {
            self.write_replicates_csv(create(p)?)?;
        }
        if let Some(p) = &cfg.summary {
            std::fs::write(p, self.to_json()?)?;
        }
        Ok(())
    }
}

/// 17 significant digits, `.` decimal separator.
fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Runs the campaign named by `cfg.experiment`.
pub fn run(cfg: &CampaignConfig) -> Result<McCampaignResult> {
    match cfg.experiment {
        ExperimentKind::BiasSweep => run_bias_sweep(cfg),
        ExperimentKind::Crossing => run_crossing_convergence(cfg),
        ExperimentKind::Clt => run_clt(cfg),
        ExperimentKind::CroftonDemo => run_crofton_demo(cfg),
        ExperimentKind::VolumeCheck => run_volume_check(cfg),
    }
}

/// Evaluates `f(sweep_index, replicate, seed)` for every replicate of every
/// sweep entry on `cfg.threads` workers; the table is indexed
/// `[sweep_index][replicate]`.
pub(crate) fn replicate_table<T, F>(cfg: &CampaignConfig, f: F) -> Result<Vec<Vec<T>>>
where
    T: Send,
    F: Fn(usize, usize, u64) -> Result<T> + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let n_sweep = cfg.sweep.len();
    let reps = cfg.reps;
    let flat: Vec<T> = pool.install(|| {
        (0..n_sweep * reps)
            .into_par_iter()
            .map(|i| {
                let (s, r) = (i / reps, i % reps);
                f(s, r, seed::replicate_seed(cfg.seed, s, r))
            })
            .collect::<Result<Vec<T>>>()
    })?;
    let mut it = flat.into_iter();
    Ok((0..n_sweep).map(|_| it.by_ref().take(reps).collect()).collect())
}

/// Runs `f` on the configured thread pool.
pub(crate) fn in_pool<T: Send>(cfg: &CampaignConfig, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

/// Assembles rows and replicates; `per_level[s][r][l]` holds the replicate
/// columns for sweep `s`, replicate `r`, level `l`, the first of which is
/// the summarized statistic.
pub(crate) struct Assembler<'a> {
    pub cfg: &'a CampaignConfig,
    pub statistic: &'static str,
    pub replicate_columns: Vec<String>,
    pub extra_columns: Vec<String>,
    started: Instant,
}

impl<'a> Assembler<'a> {
    pub fn new(cfg: &'a CampaignConfig, statistic: &'static str, replicate_columns: &[&str], extra_columns: &[&str]) -> Self {
        Self {
            cfg,
            statistic,
            replicate_columns: replicate_columns.iter().map(|s| s.to_string()).collect(),
            extra_columns: extra_columns.iter().map(|s| s.to_string()).collect(),
            started: Instant::now(),
        }
    }

    /// `extras(s, l, columns)` receives each replicate column over replicates.
    pub fn finish(
        self,
        table: Vec<Vec<Vec<Vec<f64>>>>,
        extras: impl Fn(usize, usize, &[Vec<f64>]) -> Result<Vec<f64>>,
    ) -> Result<McCampaignResult> {
        let cfg = self.cfg;
        let mut rows = Vec::new();
        let mut replicates = Vec::new();
        for (s, reps) in table.iter().enumerate() {
            for (r, levels) in reps.iter().enumerate() {
                for (l, values) in levels.iter().enumerate() {
                    replicates.push(ReplicateRow {
                        sweep_index: s,
                        replicate: r,
                        seed: seed::replicate_seed(cfg.seed, s, r),
                        u: cfg.levels[l],
                        values: values.clone(),
                    });
                }
            }
            for (l, &u) in cfg.levels.iter().enumerate() {
                let columns: Vec<Vec<f64>> = (0..self.replicate_columns.len())
                    .map(|c| reps.iter().map(|lv| lv[l][c]).collect())
                    .collect();
                let ex = extras(s, l, &columns)?;
                debug_assert_eq!(ex.len(), self.extra_columns.len());
                rows.push(SweepRow {
                    sweep_index: s,
                    sweep_value: cfg.sweep[s],
                    u,
                    reps: reps.len(),
                    mean: crate::stats::mean(&columns[0]),
                    stderr: crate::stats::stderr(&columns[0]),
                    extras: ex,
                });
            }
        }
        Ok(McCampaignResult {
            experiment: cfg.experiment.name().to_string(),
            config_hash: cfg.hash(),
            config: cfg.canonical(),
            statistic: self.statistic.to_string(),
            extra_columns: self.extra_columns,
            rows,
            replicate_columns: self.replicate_columns,
            replicates,
            wall_clock_seconds: self.started.elapsed().as_secs_f64(),
        })
    }
}
