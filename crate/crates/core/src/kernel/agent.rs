use thiserror::Error;

use super::artifact::CouplingArtifact;
use super::log::{EventLog, LogRecord, Op, ABSENT_KIND};
use super::payload::{Payload, StagedDisplacements};
use super::KernelError;
use crate::boids::BoidsError;
use crate::flocks::FlocksError;
use crate::SimTime;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error(transparent)]
    Boids(#[from] BoidsError),
    #[error(transparent)]
    Flocks(#[from] FlocksError),
    #[error("expected {expected} input, got {found}")]
    UnexpectedPayload {
        expected: &'static str,
        found: &'static str,
    },
    #[error("model expects {expected} inputs, got {found}")]
    InputArity { expected: usize, found: usize },
}

/// Adapter through which an m-agent drives its model.
pub trait InterfaceArtifact: Send {
    fn init_model(&mut self) -> Result<(), ModelError>;

    /// Feeds the inputs read for this cycle, one entry per input port;
    /// `None` means nothing was published for that tick.
    fn update_model(&mut self, inputs: &[Option<Payload>]) -> Result<(), ModelError>;

    /// Advances the model by exactly one of its own steps.
    fn step_model(&mut self) -> Result<(), ModelError>;

    fn observe_model(&self) -> Result<Payload, ModelError>;
}

pub type ArtifactId = usize;

/// When an output port publishes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stamping {
    /// One event at the new local clock, only when it is a multiple of
    /// `every`. The state at tick 0 is published during initialization.
    Boundary { every: u64 },
    /// One staged event per tick of the step, at `clock+1 ..= clock+step`.
    Spread,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OutputPort {
    pub artifact: ArtifactId,
    pub stamping: Stamping,
}

/// An agent owning one model. Each cycle reads every input stamped at the
/// agent's local clock, updates and steps the model, then publishes.
pub struct MAgent {
    id: String,
    inputs: Vec<ArtifactId>,
    outputs: Vec<OutputPort>,
    interface: Box<dyn InterfaceArtifact>,
    step_size: u64,
    local_clock: SimTime,
    cycles: u64,
}

impl std::fmt::Debug for MAgent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MAgent")
            .field("id", &self.id)
            .field("inputs", &self.inputs)
            .field("outputs", &self.outputs)
            .field("step_size", &self.step_size)
            .field("local_clock", &self.local_clock)
            .finish_non_exhaustive()
    }
}

impl MAgent {
    pub fn new(
        id: impl Into<String>,
        interface: Box<dyn InterfaceArtifact>,
        step_size: u64,
    ) -> Self {
        Self {
            id: id.into(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            interface,
            step_size,
            local_clock: SimTime::ZERO,
            cycles: 0,
        }
    }

    pub fn with_input(mut self, artifact: ArtifactId) -> Self {
        self.inputs.push(artifact);
        self
    }

    pub fn with_output(mut self, artifact: ArtifactId, stamping: Stamping) -> Self {
        self.outputs.push(OutputPort { artifact, stamping });
        self
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn inputs(&self) -> &[ArtifactId] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[OutputPort] {
        &self.outputs
    }

    pub fn step_size(&self) -> u64 {
        self.step_size
    }

    pub fn local_clock(&self) -> SimTime {
        self.local_clock
    }

    pub fn cycles(&self) -> u64 {
        self.cycles
    }

    pub fn interface(&self) -> &dyn InterfaceArtifact {
        self.interface.as_ref()
    }

    pub(crate) fn is_ready(&self, artifacts: &[CouplingArtifact]) -> bool {
        self.inputs
            .iter()
            .all(|&a| artifacts[a].is_available(self.local_clock))
    }

    pub(crate) fn init(
        &mut self,
        artifacts: &mut [CouplingArtifact],
        log: &mut EventLog,
    ) -> Result<(), KernelError> {
        self.interface
            .init_model()
            .map_err(|e| self.model_error(e))?;
        let outputs = self.outputs.clone();
        for port in outputs {
            match port.stamping {
                Stamping::Boundary { .. } => {
                    let payload = self
                        .interface
                        .observe_model()
                        .map_err(|e| self.model_error(e))?;
                    self.write(artifacts, log, port.artifact, self.local_clock, payload)?;
                }
                Stamping::Spread => artifacts[port.artifact].advance(self.local_clock),
            }
        }
        Ok(())
    }

    /// One read → update → step → observe → write cycle.
    pub(crate) fn cycle(
        &mut self,
        artifacts: &mut [CouplingArtifact],
        log: &mut EventLog,
    ) -> Result<(), KernelError> {
        self.cycles += 1;
        let t = self.local_clock;

        let mut inputs = Vec::with_capacity(self.inputs.len());
        for &a in &self.inputs {
            let art = &artifacts[a];
            let payload = art.read_event(t).map_err(|source| KernelError::Protocol {
                artifact: art.name().to_owned(),
                source,
            })?;
            log.push(LogRecord {
                tick: t,
                agent: self.id.clone(),
                op: Op::Read,
                artifact: art.name().to_owned(),
                payload_kind: payload.as_ref().map_or(ABSENT_KIND, Payload::kind),
                payload_size: payload.as_ref().map_or(0, Payload::len),
                cycle: self.cycles,
                clock: t,
                fingerprint: payload.as_ref().map_or(0, Payload::fingerprint),
            });
            inputs.push(payload);
        }

        self.interface
            .update_model(&inputs)
            .and_then(|()| self.interface.step_model())
            .map_err(|e| self.model_error(e))?;
        let next = t.plus(self.step_size);
        let observed = self
            .interface
            .observe_model()
            .map_err(|e| self.model_error(e))?;

        let outputs = self.outputs.clone();
        for port in outputs {
            match port.stamping {
                Stamping::Boundary { every } => {
                    if next.ticks().is_multiple_of(every) {
                        self.write(artifacts, log, port.artifact, next, observed.clone())?;
                    }
                }
                Stamping::Spread => {
                    let Payload::Displacements(staged) = &observed else {
                        return Err(self.model_error(ModelError::UnexpectedPayload {
                            expected: "displacement_list",
                            found: observed.kind(),
                        }));
                    };
                    let phases = self.step_size as u32;
                    for phase in 1..=phases {
                        let payload = Payload::Displacements(StagedDisplacements {
                            list: staged.list.clone(),
                            phase,
                            phases,
                        });
                        self.write(artifacts, log, port.artifact, t.plus(phase as u64), payload)?;
                    }
                }
            }
            artifacts[port.artifact].advance(next);
        }
        self.local_clock = next;
        Ok(())
    }

    fn write(
        &self,
        artifacts: &mut [CouplingArtifact],
        log: &mut EventLog,
        artifact: ArtifactId,
        t: SimTime,
        payload: Payload,
    ) -> Result<(), KernelError> {
        let art = &mut artifacts[artifact];
        let record = LogRecord {
            tick: t,
            agent: self.id.clone(),
            op: Op::Write,
            artifact: art.name().to_owned(),
            payload_kind: payload.kind(),
            payload_size: payload.len(),
            cycle: self.cycles,
            clock: self.local_clock,
            fingerprint: payload.fingerprint(),
        };
        art.write_event(&self.id, t, payload)
            .map_err(|source| KernelError::Protocol {
                artifact: art.name().to_owned(),
                source,
            })?;
        log.push(record);
        Ok(())
    }

    fn model_error(&self, source: ModelError) -> KernelError {
        KernelError::Model {
            agent: self.id.clone(),
            tick: self.local_clock,
            source,
        }
    }
}
