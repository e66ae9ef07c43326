//! Interface artifacts for the bird and flock models.

use crate::boids::{micro_step, observe, CommandSet, MicroParams, MicroState};
use crate::coupling::FlockObservation;
use crate::flocks::{displacements, macro_step, sync_registry, MacroParams, MacroState};
use crate::kernel::{InterfaceArtifact, ModelError, Payload, StagedDisplacements};

fn single_input(inputs: &[Option<Payload>]) -> Result<Option<&Payload>, ModelError> {
    match inputs {
        [] => Ok(None),
        [one] => Ok(one.as_ref()),
        more => Err(ModelError::InputArity {
            expected: 1,
            found: more.len(),
        }),
    }
}

/// Bird-level model. Commands received for a tick are consumed by the next
/// step; absent or empty command sets leave every bird autonomous.
#[derive(Debug, Clone)]
pub struct MicroModel {
    state: MicroState,
    params: MicroParams,
    pending: Option<CommandSet>,
}

impl MicroModel {
    pub fn new(state: MicroState, params: MicroParams) -> Self {
        Self {
            state,
            params,
            pending: None,
        }
    }

    pub fn state(&self) -> &MicroState {
        &self.state
    }
}

impl InterfaceArtifact for MicroModel {
    fn init_model(&mut self) -> Result<(), ModelError> {
        self.params.validate()?;
        Ok(())
    }

    fn update_model(&mut self, inputs: &[Option<Payload>]) -> Result<(), ModelError> {
        self.pending = match single_input(inputs)? {
            None => None,
            Some(Payload::Commands(c)) => Some(c.clone()),
            Some(other) => {
                return Err(ModelError::UnexpectedPayload {
                    expected: "command_set",
                    found: other.kind(),
                })
            }
        };
        Ok(())
    }

    fn step_model(&mut self) -> Result<(), ModelError> {
        let cmds = self.pending.take();
        self.state = micro_step(&self.state, cmds.as_ref(), &self.params)?;
        Ok(())
    }

    fn observe_model(&self) -> Result<Payload, ModelError> {
        Ok(Payload::MicroObservation(observe(&self.state)))
    }
}

/// Flock-level model.
///
/// When active it keeps its registry in sync with the flocks observed at
/// the bird level, steps the flock rules and reports each flock's
/// displacement. When passive it only records what it reads.
#[derive(Debug, Clone)]
pub struct MacroModel {
    state: MacroState,
    params: MacroParams,
    active: bool,
    before_step: Option<MacroState>,
    last_observed: Vec<FlockObservation>,
}

impl MacroModel {
    pub fn new(state: MacroState, params: MacroParams, active: bool) -> Self {
        Self {
            state,
            params,
            active,
            before_step: None,
            last_observed: Vec::new(),
        }
    }

    pub fn state(&self) -> &MacroState {
        &self.state
    }

    pub fn last_observed(&self) -> &[FlockObservation] {
        &self.last_observed
    }

    pub fn is_active(&self) -> bool {
        self.active
    }
}

impl InterfaceArtifact for MacroModel {
    fn init_model(&mut self) -> Result<(), ModelError> {
        self.params.validate()?;
        Ok(())
    }

    fn update_model(&mut self, inputs: &[Option<Payload>]) -> Result<(), ModelError> {
        self.last_observed = match single_input(inputs)? {
            None => Vec::new(),
            Some(Payload::Flocks(f)) => f.clone(),
            Some(other) => {
                return Err(ModelError::UnexpectedPayload {
                    expected: "flock_list",
                    found: other.kind(),
                })
            }
        };
        if self.active {
            self.state = sync_registry(&self.state, &self.last_observed)?;
        }
        Ok(())
    }

    fn step_model(&mut self) -> Result<(), ModelError> {
        if self.active {
            let next = macro_step(&self.state, &self.params);
            self.before_step = Some(std::mem::replace(&mut self.state, next));
        }
        Ok(())
    }

    fn observe_model(&self) -> Result<Payload, ModelError> {
        let list = match &self.before_step {
            Some(before) if self.active => displacements(before, &self.state)?,
            _ => Vec::new(),
        };
        Ok(Payload::Displacements(StagedDisplacements {
            list,
            phase: 1,
            phases: 1,
        }))
    }
}
