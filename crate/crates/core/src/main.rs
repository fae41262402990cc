use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use excursion::error::Error;
use excursion::experiments::{self, CampaignConfig, ExperimentKind};

/// Monte Carlo campaigns for excursion-set volume and surface estimators.
#[derive(Parser)]
#[command(name = "excursion", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Surface ratio against the analytic density over cell sizes.
    BiasSweep(RunArgs),
    /// First-order surface estimates from up-crossing frequencies.
    Crossing(RunArgs),
    /// Variance scaling and normality diagnostics over growing windows.
    Clt(RunArgs),
    /// Crofton line-sampling estimates for circles and squares.
    CroftonDemo(RunArgs),
    /// Unbiasedness of the hypercubic volume estimator.
    VolumeCheck(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Flat key = value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Spatial dimension
    #[arg(long)]
    dim: Option<usize>,
    /// Comma-separated cell sizes (the lattice spacing for `clt`).
    #[arg(long)]
    delta: Option<String>,
    /// Replicates per sweep value
    #[arg(long)]
    reps: Option<usize>,
    /// Base seed; replicate seeds are derived from it and the replicate index
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; 0 uses every core.
    #[arg(long)]
    threads: Option<usize>,
    /// Summary CSV; written to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON summary.
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Per-replicate CSV.
    #[arg(long)]
    replicates: Option<PathBuf>,
    /// Extra `key=value` settings, applied after the config file.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

fn build_config(kind: ExperimentKind, a: &RunArgs) -> excursion::error::Result<CampaignConfig> {
    let mut cfg = match &a.config {
        Some(p) => CampaignConfig::load(p, kind)?,
        None => CampaignConfig::defaults(kind),
    };
    cfg.experiment = kind;
    for kv in &a.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("--set expects KEY=VALUE, got '{kv}'")))?;
        cfg.set(k.trim(), v.trim())?;
    }
    if let Some(d) = a.dim {
        cfg.d = d;
    }
    if let Some(delta) = &a.delta {
        cfg.set(if kind == ExperimentKind::Clt { "delta" } else { "sweep" }, delta)?;
    }
    if let Some(r) = a.reps {
        cfg.reps = r;
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if let Some(t) = a.threads {
        cfg.threads = t;
    }
    if a.out.is_some() {
        cfg.out.clone_from(&a.out);
    }
    if a.summary.is_some() {
        cfg.summary.clone_from(&a.summary);
    }
    if a.replicates.is_some() {
        cfg.replicates_out.clone_from(&a.replicates);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn execute(kind: ExperimentKind, a: &RunArgs) -> excursion::error::Result<()> {
    let cfg = build_config(kind, a)?;
    log::info!("running {} (config {})", cfg.experiment, cfg.hash());
    let result = experiments::run(&cfg)?;
    result.save(&cfg)?;
    if cfg.out.is_none() {
        print!("{}", result.csv_string());
    }
    log::info!("finished in {:.2} s", result.wall_clock_seconds);
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        _ if e.is_numeric() => 3,
        Error::Config(_) | Error::Domain(_) | Error::Contract(_) | Error::Unsupported(_) | Error::Capacity { .. } => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (kind, args) = match &cli.command {
        Command::BiasSweep(a) => (ExperimentKind::BiasSweep, a),
        Command::Crossing(a) => (ExperimentKind::Crossing, a),
        Command::Clt(a) => (ExperimentKind::Clt, a),
        Command::CroftonDemo(a) => (ExperimentKind::CroftonDemo, a),
        Command::VolumeCheck(a) => (ExperimentKind::VolumeCheck, a),
    };
    match execute(kind, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
