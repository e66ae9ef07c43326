//! Flock-level model: reified flocks as agents with position, heading and
//! radius, plus the registry that keeps them in step with the clusters
//! observed at the bird level.

use std::collections::{BTreeSet, HashSet};

use thiserror::Error;

use crate::assignment::max_weight_assignment;
use crate::boids::{steer, BirdId, TurnLimits};
use crate::coupling::FlockObservation;
use crate::geometry::{torus_delta, torus_distance, HeadingDeg, Position, TorusWorld, Vec2};
use crate::SimTime;

pub type FlockId = u32;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FlocksError {
    #[error("bird {0} appears in more than one flock observation")]
    DuplicateBird(BirdId),
    #[error("flock id sets differ between the two states")]
    IdMismatch,
    #[error("invalid macro parameters: {0}")]
    InvalidParams(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Flock {
    pub flock_id: FlockId,
    pub centroid: Position,
    pub heading: HeadingDeg,
    pub radius: f64,
    pub members: BTreeSet<BirdId>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MacroParams {
    pub vision: f64,
    pub min_separation: f64,
    pub max_align_turn: f64,
    pub max_cohere_turn: f64,
    pub max_separate_turn: f64,
    /// World units per macro step.
    pub speed: f64,
}

impl Default for MacroParams {
    fn default() -> Self {
        Self {
            vision: 10.0,
            min_separation: 1.0,
            max_align_turn: 5.0,
            max_cohere_turn: 3.0,
            max_separate_turn: 1.5,
            speed: 1.0,
        }
    }
}

impl MacroParams {
    /// Strong separation, weak cohesion and alignment.
    pub fn separation_heavy() -> Self {
        Self {
            max_separate_turn: 8.0,
            max_align_turn: 1.0,
            max_cohere_turn: 1.0,
            ..Self::default()
        }
    }

    /// Strong cohesion and alignment, weak separation.
    pub fn cohesion_heavy() -> Self {
        Self {
            max_align_turn: 8.0,
            max_cohere_turn: 8.0,
            max_separate_turn: 0.5,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), FlocksError> {
        let values = [
            ("vision", self.vision),
            ("min_separation", self.min_separation),
            ("max_align_turn", self.max_align_turn),
            ("max_cohere_turn", self.max_cohere_turn),
            ("max_separate_turn", self.max_separate_turn),
            ("speed", self.speed),
        ];
        match values.iter().find(|(_, v)| !(v.is_finite() && *v >= 0.0)) {
            Some((name, v)) => Err(FlocksError::InvalidParams(format!(
                "{name} must be a non-negative number, got {v}"
            ))),
            None => Ok(()),
        }
    }
}

impl From<&MacroParams> for TurnLimits {
    fn from(p: &MacroParams) -> Self {
        Self {
            min_separation: p.min_separation,
            align: p.max_align_turn,
            cohere: p.max_cohere_turn,
            separate: p.max_separate_turn,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MacroState {
    /// Ascending by `flock_id`.
    pub flocks: Vec<Flock>,
    pub next_id: FlockId,
    pub macro_tick: SimTime,
    pub world: TorusWorld,
}

impl MacroState {
    pub fn empty(world: TorusWorld) -> Self {
        Self {
            flocks: Vec::new(),
            next_id: 0,
            macro_tick: SimTime::ZERO,
            world,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Displacement {
    pub flock_id: FlockId,
    pub members: BTreeSet<BirdId>,
    pub v: Vec2,
    pub heading: HeadingDeg,
}

pub type DisplacementList = Vec<Displacement>;

/// Jaccard index as an exact ratio `(intersection, union)`.
pub fn jaccard(a: &BTreeSet<BirdId>, b: &BTreeSet<BirdId>) -> (usize, usize) {
    let inter = a.intersection(b).count();
    (inter, a.len() + b.len() - inter)
}

fn ratio(r: (usize, usize)) -> f64 {
    if r.1 == 0 {
        0.0
    } else {
        r.0 as f64 / r.1 as f64
    }
}

/// Matches registered flocks to observations on member sets.
///
/// The pairing maximizes the total Jaccard index over pairs that share at
/// least one bird. Matched flocks keep their id and take the observed
/// attributes, unmatched observations become flocks with fresh ids (in
/// observation order), unmatched flocks are dropped.
pub fn sync_registry(
    state: &MacroState,
    observations: &[FlockObservation],
) -> Result<MacroState, FlocksError> {
    let mut seen = HashSet::new();
    for obs in observations {
        for &id in &obs.members {
            if !seen.insert(id) {
                return Err(FlocksError::DuplicateBird(id));
            }
        }
    }

    let weights: Vec<Vec<f64>> = state
        .flocks
        .iter()
        .map(|f| {
            observations
                .iter()
                .map(|o| ratio(jaccard(&f.members, &o.members)))
                .collect()
        })
        .collect();
    let assignment = max_weight_assignment(&weights);

    let mut claimed = vec![false; observations.len()];
    let mut flocks = Vec::with_capacity(observations.len());
    for (row, (flock, choice)) in state.flocks.iter().zip(assignment).enumerate() {
        let Some(o) = choice.filter(|&o| weights[row][o] > 0.0) else {
            continue;
        };
        claimed[o] = true;
        flocks.push(adopt(flock.flock_id, &observations[o]));
    }

    let mut next_id = state.next_id;
    for (obs, _) in observations.iter().zip(&claimed).filter(|(_, c)| !**c) {
        flocks.push(adopt(next_id, obs));
        next_id += 1;
    }
    flocks.sort_by_key(|f| f.flock_id);

    Ok(MacroState {
        flocks,
        next_id,
        macro_tick: state.macro_tick,
        world: state.world,
    })
}

fn adopt(flock_id: FlockId, obs: &FlockObservation) -> Flock {
    Flock {
        flock_id,
        centroid: obs.centroid,
        heading: obs.heading,
        radius: obs.radius,
        members: obs.members.clone(),
    }
}

/// Distance between flock surfaces, never negative.
pub fn effective_distance(a: &Flock, b: &Flock, world: &TorusWorld) -> f64 {
    (torus_distance(a.centroid, b.centroid, world) - a.radius - b.radius).max(0.0)
}

/// One synchronous step of the flock-level rules. The set of flocks is left
/// unchanged; radius and membership are carried over.
pub fn macro_step(state: &MacroState, params: &MacroParams) -> MacroState {
    let world = &state.world;
    let flocks = state
        .flocks
        .iter()
        .map(|f| {
            let mut mates: Vec<_> = state
                .flocks
                .iter()
                .filter(|o| o.flock_id != f.flock_id)
                .map(|o| {
                    (
                        o.flock_id,
                        o.centroid,
                        o.heading,
                        effective_distance(f, o, world),
                    )
                })
                .filter(|m| m.3 <= params.vision)
                .collect();
            mates.sort_by_key(|m| m.0);
            let heading = steer(f.heading, f.centroid, &mates, params.into(), world);
            Flock {
                centroid: f
                    .centroid
                    .translate(heading.unit().scale(params.speed), world),
                heading,
                ..f.clone()
            }
        })
        .collect();
    MacroState {
        flocks,
        next_id: state.next_id,
        macro_tick: state.macro_tick.next(),
        world: *world,
    }
}

pub fn displacements(
    before: &MacroState,
    after: &MacroState,
) -> Result<DisplacementList, FlocksError> {
    if before.flocks.len() != after.flocks.len() {
        return Err(FlocksError::IdMismatch);
    }
    after
        .flocks
        .iter()
        .map(|a| {
            let b = before
                .flocks
                .iter()
                .find(|b| b.flock_id == a.flock_id)
                .ok_or(FlocksError::IdMismatch)?;
            Ok(Displacement {
                flock_id: a.flock_id,
                members: a.members.clone(),
                v: torus_delta(b.centroid, a.centroid, &after.world),
                heading: a.heading,
            })
        })
        .collect()
}
