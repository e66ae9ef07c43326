//! Co-simulation kernel.
//!
//! A [`MultiModel`] wires m-agents to coupling artifacts and runs them under
//! a conservative discipline: an agent may start a cycle only once every
//! producer it reads from has passed the agent's local clock. Agents are
//! driven by a single deterministic scheduler (lowest local clock first,
//! ties by registration order), so the event log of a configuration is
//! reproducible bit for bit.
//!
//! Every read is stamped at the reader's local clock and every write lies
//! strictly after the writer's clock, so within a cycle each read precedes,
//! in simulated time, everything the cycle publishes.

mod agent;
mod artifact;
pub mod audit;
mod log;
mod payload;

pub use agent::{ArtifactId, InterfaceArtifact, MAgent, ModelError, OutputPort, Stamping};
pub use artifact::{
    ArtifactError, ArtifactKind, CouplingArtifact, Emergence, Identity, Immergence,
    TimestampedEvent, Transform,
};
pub use log::{EventLog, LogRecord, Op, ABSENT_KIND};
pub use payload::{Payload, StagedDisplacements};

use thiserror::Error;

use crate::SimTime;

#[derive(Debug, Error)]
pub enum KernelError {
    #[error("protocol violation on artifact {artifact}: {source}")]
    Protocol {
        artifact: String,
        source: ArtifactError,
    },
    #[error("model failure in {agent} at tick {tick}: {source}")]
    Model {
        agent: String,
        tick: SimTime,
        source: ModelError,
    },
    #[error("deadlock, no agent can progress: {pending}")]
    Deadlock { pending: String, log: Box<EventLog> },
    #[error("invalid multi-model: {0}")]
    Config(String),
}

#[derive(Debug)]
pub struct MultiModel {
    agents: Vec<MAgent>,
    artifacts: Vec<CouplingArtifact>,
    ratio: u64,
    immergence_enabled: bool,
    macro_behavior_enabled: bool,
    horizon: SimTime,
    started: bool,
}

impl MultiModel {
    pub fn new(
        ratio: u64,
        horizon: SimTime,
        immergence_enabled: bool,
        macro_behavior_enabled: bool,
    ) -> Result<Self, KernelError> {
        if ratio == 0 {
            return Err(KernelError::Config("ratio must be positive".into()));
        }
        if !horizon.ticks().is_multiple_of(ratio) {
            return Err(KernelError::Config(format!(
                "horizon {horizon} is not a multiple of ratio {ratio}"
            )));
        }
        if immergence_enabled && !macro_behavior_enabled {
            return Err(KernelError::Config(
                "immergence requires the macro behavior to be enabled".into(),
            ));
        }
        Ok(Self {
            agents: Vec::new(),
            artifacts: Vec::new(),
            ratio,
            immergence_enabled,
            macro_behavior_enabled,
            horizon,
            started: false,
        })
    }

    pub fn add_artifact(&mut self, artifact: CouplingArtifact) -> ArtifactId {
        self.artifacts.push(artifact);
        self.artifacts.len() - 1
    }

    pub fn add_agent(&mut self, agent: MAgent) -> Result<usize, KernelError> {
        if agent.step_size() == 0 || !self.horizon.ticks().is_multiple_of(agent.step_size()) {
            return Err(KernelError::Config(format!(
                "{}: step size {} does not divide horizon {}",
                agent.id(),
                agent.step_size(),
                self.horizon
            )));
        }
        for &a in agent.inputs() {
            if a >= self.artifacts.len() {
                return Err(KernelError::Config(format!(
                    "{}: unknown input {a}",
                    agent.id()
                )));
            }
        }
        for port in agent.outputs() {
            let Some(art) = self.artifacts.get(port.artifact) else {
                return Err(KernelError::Config(format!(
                    "{}: unknown output {}",
                    agent.id(),
                    port.artifact
                )));
            };
            if art.producer() != agent.id() {
                return Err(KernelError::Config(format!(
                    "{} cannot write to {}, produced by {}",
                    agent.id(),
                    art.name(),
                    art.producer()
                )));
            }
            if let Stamping::Boundary { every: 0 } = port.stamping {
                return Err(KernelError::Config(
                    "boundary period must be positive".into(),
                ));
            }
        }
        self.agents.push(agent);
        Ok(self.agents.len() - 1)
    }

    pub fn ratio(&self) -> u64 {
        self.ratio
    }

    pub fn horizon(&self) -> SimTime {
        self.horizon
    }

    pub fn immergence_enabled(&self) -> bool {
        self.immergence_enabled
    }

    pub fn macro_behavior_enabled(&self) -> bool {
        self.macro_behavior_enabled
    }

    pub fn agents(&self) -> &[MAgent] {
        &self.agents
    }

    pub fn agent(&self, id: &str) -> Option<&MAgent> {
        self.agents.iter().find(|a| a.id() == id)
    }

    pub fn artifacts(&self) -> &[CouplingArtifact] {
        &self.artifacts
    }

    pub fn artifact(&self, name: &str) -> Option<&CouplingArtifact> {
        self.artifacts.iter().find(|a| a.name() == name)
    }

    /// Initializes every agent, then runs cycles until all agents reach the
    /// horizon.
    pub fn run(&mut self) -> Result<EventLog, KernelError> {
        if self.started {
            return Err(KernelError::Config("a multi-model runs only once".into()));
        }
        self.started = true;

        let mut log = EventLog::new();
        for agent in &mut self.agents {
            agent.init(&mut self.artifacts, &mut log)?;
        }

        loop {
            let horizon = self.horizon;
            let unfinished = |a: &MAgent| a.local_clock() < horizon;
            if !self.agents.iter().any(unfinished) {
                return Ok(log);
            }
            let next = self
                .agents
                .iter()
                .enumerate()
                .filter(|(_, a)| unfinished(a) && a.is_ready(&self.artifacts))
                .min_by_key(|(i, a)| (a.local_clock(), *i))
                .map(|(i, _)| i);
            let Some(i) = next else {
                let pending = self
                    .agents
                    .iter()
                    .filter(|a| unfinished(a))
                    .map(|a| format!("{} at {}", a.id(), a.local_clock()))
                    .collect::<Vec<_>>()
                    .join(", ");
                return Err(KernelError::Deadlock {
                    pending,
                    log: Box::new(log),
                });
            };
            self.agents[i].cycle(&mut self.artifacts, &mut log)?;
        }
    }
}
