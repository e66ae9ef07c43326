//! `mlsim`: run replicated flocking experiments and write CSV.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::Parser;

use mlsim_core::experiment::{
    aggregate, run_replicated, run_single, write_aggregate_csv, write_runs_csv,
};
use mlsim_core::{ExperimentConfig, Variant};

#[derive(Debug, Parser)]
#[command(
    name = "mlsim",
    version,
    about = "Two-level boids/flocks co-simulation experiments"
)]
struct Args {
    /// Model variant: m, M, M1, M2 or M3.
    #[arg(long, default_value = "M")]
    variant: String,
    #[arg(long)]
    birds: Option<usize>,
    /// Simulation horizon in micro ticks.
    #[arg(long)]
    ticks: Option<u64>,
    #[arg(long)]
    reps: Option<usize>,
    /// Base seed; replication k uses seed + k.
    #[arg(long)]
    seed: Option<u64>,
    /// Sampling period in ticks (multiple of the ratio; defaults to it).
    #[arg(long)]
    sample_interval: Option<u64>,
    /// JSON file of flat keys (world.width, micro.speed, cluster.d_prox, ratio, ...).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Run CSV. The aggregate goes to <stem>.aggregate.csv next to it.
    /// Without it the run CSV is printed to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Export the event log of replication 0.
    #[arg(long)]
    event_log: Option<PathBuf>,
}

fn build_config(args: &Args) -> Result<ExperimentConfig> {
    let variant: Variant = args.variant.parse()?;
    let mut cfg = ExperimentConfig::new(variant);
    if let Some(path) = &args.config {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let json: serde_json::Value = serde_json::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))?;
        cfg.apply_json(&json)?;
    }
    if let Some(n) = args.birds {
        cfg.birds = n;
    }
    if let Some(t) = args.ticks {
        cfg.horizon = t;
    }
    if let Some(r) = args.reps {
        cfg.reps = r;
    }
    if let Some(s) = args.seed {
        cfg.base_seed = s;
    }
    if args.sample_interval.is_some() {
        cfg.sample_interval = args.sample_interval;
    }
    cfg.output = args.out.clone();
    cfg.validate()?;
    Ok(cfg)
}

fn aggregate_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().unwrap_or_default().to_string_lossy();
    out.with_file_name(format!("{stem}.aggregate.csv"))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(file))
}

fn run(args: &Args) -> Result<()> {
    let cfg = build_config(args)?;
    let variant = cfg.variant.variant;
    let records = run_replicated(&cfg)?;

    match &cfg.output {
        Some(out) => {
            let mut w = create(out)?;
            write_runs_csv(&mut w, variant, &records)?;
            w.flush()?;
            let agg_path = aggregate_path(out);
            let mut w = create(&agg_path)?;
            write_aggregate_csv(&mut w, variant, &aggregate(&records))?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            write_runs_csv(&mut w, variant, &records)?;
            w.flush()?;
        }
    }

    if let Some(path) = &args.event_log {
        let log = run_single(&cfg, 0)?.log;
        let mut w = create(path)?;
        log.write_export(&mut w)?;
        w.flush()?;
    }
    Ok(())
}

fn main() -> Result<()> {
    run(&Args::parse())
}
