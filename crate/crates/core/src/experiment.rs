//! Variant wiring, seeded replications and CSV output.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{self, Write};
use std::path::PathBuf;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::Value;
use thiserror::Error;

use crate::boids::{init_random, MicroParams, MicroState};
use crate::coupling::{ClusterParams, RadiusRule};
use crate::flocks::{MacroParams, MacroState};
use crate::geometry::TorusWorld;
use crate::kernel::{
    CouplingArtifact, Emergence, EventLog, Immergence, KernelError, MAgent, MultiModel, Payload,
    Stamping,
};
use crate::models::{MacroModel, MicroModel};
use crate::SimTime;

pub const MICRO_AGENT: &str = "A_m";
pub const MACRO_AGENT: &str = "A_M";
pub const EMERGENCE_ARTIFACT: &str = "e";
pub const IMMERGENCE_ARTIFACT: &str = "i";

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("replication {rep} aborted: {source}")]
    Run { rep: usize, source: KernelError },
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn config_err(msg: impl Into<String>) -> ExperimentError {
    ExperimentError::Config(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    /// Bird level only; the flock level just reads.
    NoImmergence,
    /// Both levels, one macro step per micro tick.
    Base,
    SeparationHeavy,
    CohesionHeavy,
    /// Four micro ticks per macro step.
    MultiRate,
}

impl Variant {
    pub const ALL: [Variant; 5] = [
        Variant::NoImmergence,
        Variant::Base,
        Variant::SeparationHeavy,
        Variant::CohesionHeavy,
        Variant::MultiRate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::NoImmergence => "m",
            Variant::Base => "M",
            Variant::SeparationHeavy => "M1",
            Variant::CohesionHeavy => "M2",
            Variant::MultiRate => "M3",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| {
                config_err(format!(
                    "unknown variant {s:?} (expected m, M, M1, M2 or M3)"
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariantSpec {
    pub variant: Variant,
    pub immergence_enabled: bool,
    pub macro_behavior_enabled: bool,
    pub macro_params: MacroParams,
    pub ratio: u64,
}

impl VariantSpec {
    pub fn preset(variant: Variant) -> Self {
        let coupled = variant != Variant::NoImmergence;
        Self {
            variant,
            immergence_enabled: coupled,
            macro_behavior_enabled: coupled,
            macro_params: match variant {
                Variant::SeparationHeavy => MacroParams::separation_heavy(),
                Variant::CohesionHeavy => MacroParams::cohesion_heavy(),
                _ => MacroParams::default(),
            },
            ratio: if variant == Variant::MultiRate { 4 } else { 1 },
        }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let expected = match self.variant {
            Variant::NoImmergence => None,
            Variant::MultiRate => Some(4),
            _ => Some(1),
        };
        if self.ratio == 0 || expected.is_some_and(|r| r != self.ratio) {
            return Err(config_err(format!(
                "variant {} cannot run with ratio {}",
                self.variant, self.ratio
            )));
        }
        let coupled = self.variant != Variant::NoImmergence;
        if self.immergence_enabled != coupled || self.macro_behavior_enabled != coupled {
            return Err(config_err(format!(
                "variant {} has inconsistent immergence/macro flags",
                self.variant
            )));
        }
        self.macro_params
            .validate()
            .map_err(|e| config_err(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub variant: VariantSpec,
    pub birds: usize,
    pub horizon: u64,
    pub reps: usize,
    pub base_seed: u64,
    /// Defaults to the ratio when unset.
    pub sample_interval: Option<u64>,
    pub world: TorusWorld,
    pub micro: MicroParams,
    pub cluster: ClusterParams,
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(variant: Variant) -> Self {
        Self {
            variant: VariantSpec::preset(variant),
            birds: 100,
            horizon: 500,
            reps: 100,
            base_seed: 0,
            sample_interval: None,
            world: TorusWorld::default(),
            micro: MicroParams::default(),
            cluster: ClusterParams::default(),
            output: None,
        }
    }

    pub fn ratio(&self) -> u64 {
        self.variant.ratio
    }

    pub fn sample_every(&self) -> u64 {
        self.sample_interval.unwrap_or(self.variant.ratio)
    }

    /// Ticks at which the emergence output is recorded.
    pub fn sample_ticks(&self) -> impl Iterator<Item = u64> {
        (0..=self.horizon).step_by(self.sample_every().max(1) as usize)
    }

    pub fn seed_for(&self, rep: usize) -> u64 {
        self.base_seed.wrapping_add(rep as u64)
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        self.variant.validate()?;
        let r = self.ratio();
        if !self.horizon.is_multiple_of(r) {
            return Err(config_err(format!(
                "horizon {} is not a multiple of ratio {r}",
                self.horizon
            )));
        }
        let k = self.sample_every();
        if k == 0 || !k.is_multiple_of(r) {
            return Err(config_err(format!(
                "sample interval {k} must be a positive multiple of ratio {r}"
            )));
        }
        if self.reps == 0 {
            return Err(config_err("reps must be at least 1"));
        }
        self.micro
            .validate()
            .map_err(|e| config_err(e.to_string()))?;
        self.cluster
            .validate()
            .map_err(|e| config_err(e.to_string()))
    }

    /// Applies a JSON object of flat keys (`world.width`, `micro.speed`,
    /// `cluster.d_prox`, `ratio`, ...). Unknown keys are rejected.
    pub fn apply_json(&mut self, value: &Value) -> Result<(), ExperimentError> {
        let Value::Object(map) = value else {
            return Err(config_err("configuration must be a JSON object"));
        };
        let (mut width, mut height) = (self.world.width(), self.world.height());
        for (key, v) in map {
            let num = || {
                v.as_f64()
                    .ok_or_else(|| config_err(format!("{key} must be a number")))
            };
            let count = || {
                v.as_u64()
                    .ok_or_else(|| config_err(format!("{key} must be a non-negative integer")))
            };
            let (group, field) = key.split_once('.').unwrap_or(("", key.as_str()));
            match (group, field) {
                ("world", "width") => width = num()?,
                ("world", "height") => height = num()?,
                ("micro", f) => {
                    *micro_field(&mut self.micro, f).ok_or_else(|| unknown(key))? = num()?
                }
                ("macro", f) => {
                    *macro_field(&mut self.variant.macro_params, f).ok_or_else(|| unknown(key))? =
                        num()?
                }
                ("cluster", "d_prox") => self.cluster.d_prox = num()?,
                ("cluster", "theta") => self.cluster.theta = num()?,
                ("cluster", "min_size") => self.cluster.min_size = count()? as usize,
                ("cluster", "radius") => {
                    let s = v
                        .as_str()
                        .ok_or_else(|| config_err(format!("{key} must be a string")))?;
                    self.cluster.radius_rule =
                        RadiusRule::from_str(s).map_err(|e| config_err(e.to_string()))?;
                }
                ("", "ratio") => self.variant.ratio = count()?,
                _ => return Err(unknown(key)),
            }
        }
        self.world = TorusWorld::new(width, height).map_err(|e| config_err(e.to_string()))?;
        Ok(())
    }
}

fn unknown(key: &str) -> ExperimentError {
    config_err(format!("unknown configuration key {key:?}"))
}

fn micro_field<'a>(p: &'a mut MicroParams, f: &str) -> Option<&'a mut f64> {
    Some(match f {
        "vision" => &mut p.vision,
        "min_separation" => &mut p.min_separation,
        "max_align_turn" => &mut p.max_align_turn,
        "max_cohere_turn" => &mut p.max_cohere_turn,
        "max_separate_turn" => &mut p.max_separate_turn,
        "speed" => &mut p.speed,
        _ => return None,
    })
}

fn macro_field<'a>(p: &'a mut MacroParams, f: &str) -> Option<&'a mut f64> {
    Some(match f {
        "vision" => &mut p.vision,
        "min_separation" => &mut p.min_separation,
        "max_align_turn" => &mut p.max_align_turn,
        "max_cohere_turn" => &mut p.max_cohere_turn,
        "max_separate_turn" => &mut p.max_separate_turn,
        "speed" => &mut p.speed,
        _ => return None,
    })
}

/// Wires the multi-model for replication `rep`, seeding the bird level
/// with `base_seed + rep`.
pub fn build_multimodel(cfg: &ExperimentConfig, rep: usize) -> Result<MultiModel, ExperimentError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed_for(rep));
    let birds = init_random(cfg.birds, cfg.world, &mut rng);
    build_multimodel_from_state(cfg, birds)
}

/// Like [`build_multimodel`], starting from a given bird population.
pub fn build_multimodel_from_state(
    cfg: &ExperimentConfig,
    birds: MicroState,
) -> Result<MultiModel, ExperimentError> {
    cfg.validate()?;
    let spec = &cfg.variant;
    let r = spec.ratio;
    let kernel = |e: KernelError| config_err(e.to_string());

    let mut mm = MultiModel::new(
        r,
        SimTime(cfg.horizon),
        spec.immergence_enabled,
        spec.macro_behavior_enabled,
    )
    .map_err(kernel)?;
    let e = mm.add_artifact(CouplingArtifact::new(
        EMERGENCE_ARTIFACT,
        MICRO_AGENT,
        Box::new(Emergence {
            params: cfg.cluster,
            world: cfg.world,
        }),
    ));
    let i = spec.immergence_enabled.then(|| {
        mm.add_artifact(CouplingArtifact::new(
            IMMERGENCE_ARTIFACT,
            MACRO_AGENT,
            Box::new(Immergence),
        ))
    });

    let macro_model = MacroModel::new(
        MacroState::empty(cfg.world),
        spec.macro_params,
        spec.macro_behavior_enabled,
    );
    let mut macro_agent = MAgent::new(MACRO_AGENT, Box::new(macro_model), r).with_input(e);
    let mut micro_agent = MAgent::new(MICRO_AGENT, Box::new(MicroModel::new(birds, cfg.micro)), 1)
        .with_output(e, Stamping::Boundary { every: r });
    if let Some(i) = i {
        macro_agent = macro_agent.with_output(i, Stamping::Spread);
        micro_agent = micro_agent.with_input(i);
    }
    mm.add_agent(macro_agent).map_err(kernel)?;
    mm.add_agent(micro_agent).map_err(kernel)?;
    Ok(mm)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub rep: usize,
    pub tick: u64,
    pub flock_count: usize,
    pub mean_flock_radius: f64,
    /// Mean member count.
    pub mean_flock_size: f64,
}

#[derive(Debug)]
pub struct RepOutcome {
    pub records: Vec<RunRecord>,
    pub log: EventLog,
    pub model: MultiModel,
}

/// Flock statistics of the emergence output at every sampled tick.
pub fn sample_records(
    cfg: &ExperimentConfig,
    model: &MultiModel,
    rep: usize,
) -> Result<Vec<RunRecord>, ExperimentError> {
    let e = model
        .artifact(EMERGENCE_ARTIFACT)
        .ok_or_else(|| config_err("multi-model has no emergence artifact"))?;
    cfg.sample_ticks()
        .map(|tick| {
            let raw = e
                .event_at(SimTime(tick))
                .ok_or_else(|| config_err(format!("no bird snapshot published at tick {tick}")))?;
            let flocks = match e.transform(raw) {
                Ok(Payload::Flocks(f)) => f,
                Ok(other) => {
                    return Err(config_err(format!("emergence produced {}", other.kind())))
                }
                Err(source) => {
                    return Err(ExperimentError::Run {
                        rep,
                        source: KernelError::Protocol {
                            artifact: EMERGENCE_ARTIFACT.into(),
                            source,
                        },
                    })
                }
            };
            let n = flocks.len();
            let mean = |f: &dyn Fn(&crate::coupling::FlockObservation) -> f64| {
                if n == 0 {
                    0.0
                } else {
                    flocks.iter().map(f).sum::<f64>() / n as f64
                }
            };
            Ok(RunRecord {
                rep,
                tick,
                flock_count: n,
                mean_flock_radius: mean(&|o| o.radius),
                mean_flock_size: mean(&|o| o.members.len() as f64),
            })
        })
        .collect()
}

pub fn run_single(cfg: &ExperimentConfig, rep: usize) -> Result<RepOutcome, ExperimentError> {
    let mut model = build_multimodel(cfg, rep)?;
    let log = model
        .run()
        .map_err(|source| ExperimentError::Run { rep, source })?;
    let records = sample_records(cfg, &model, rep)?;
    Ok(RepOutcome {
        records,
        log,
        model,
    })
}

/// Runs every replication (in parallel) and returns the records ordered by
/// replication, then tick. Fails with the lowest failing replication index.
pub fn run_replicated(cfg: &ExperimentConfig) -> Result<Vec<RunRecord>, ExperimentError> {
    cfg.validate()?;
    let per_rep: Vec<Result<Vec<RunRecord>, ExperimentError>> = (0..cfg.reps)
        .into_par_iter()
        .map(|rep| run_single(cfg, rep).map(|o| o.records))
        .collect();
    let mut records = Vec::with_capacity(cfg.reps * cfg.sample_ticks().count());
    for r in per_rep {
        records.extend(r?);
    }
    Ok(records)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub tick: u64,
    pub mean_count: f64,
    /// Population standard deviation.
    pub std_count: f64,
    pub samples: usize,
}

/// Mean and population standard deviation of the flock count per tick.
pub fn aggregate(records: &[RunRecord]) -> Vec<AggregateRow> {
    // Welford accumulation, fed in (rep, tick) order so the result does not
    // depend on the order of `records`.
    let mut sorted: Vec<&RunRecord> = records.iter().collect();
    sorted.sort_by_key(|r| (r.tick, r.rep));
    let mut acc: BTreeMap<u64, (usize, f64, f64)> = BTreeMap::new();
    for r in sorted {
        let (n, mean, m2) = acc.entry(r.tick).or_insert((0, 0.0, 0.0));
        let x = r.flock_count as f64;
        *n += 1;
        let d = x - *mean;
        *mean += d / *n as f64;
        *m2 += d * (x - *mean);
    }
    acc.into_iter()
        .map(|(tick, (n, mean, m2))| AggregateRow {
            tick,
            mean_count: mean,
            std_count: (m2 / n as f64).max(0.0).sqrt(),
            samples: n,
        })
        .collect()
}

pub const RUNS_CSV_HEADER: &str = "variant,rep,tick,flock_count,mean_flock_size,mean_flock_radius";
pub const AGGREGATE_CSV_HEADER: &str = "variant,tick,mean_count,std_count";

pub fn write_runs_csv<W: Write>(
    mut out: W,
    variant: Variant,
    records: &[RunRecord],
) -> io::Result<()> {
    writeln!(out, "{RUNS_CSV_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{:.6},{:.6}",
            variant, r.rep, r.tick, r.flock_count, r.mean_flock_size, r.mean_flock_radius
        )?;
    }
    Ok(())
}

pub fn write_aggregate_csv<W: Write>(
    mut out: W,
    variant: Variant,
    rows: &[AggregateRow],
) -> io::Result<()> {
    writeln!(out, "{AGGREGATE_CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{:.6},{:.6}",
            variant, r.tick, r.mean_count, r.std_count
        )?;
    }
    Ok(())
}
