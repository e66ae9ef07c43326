//! Individual-level flocking model.
//!
//! Birds follow bounded-turn separation, alignment and cohesion rules, or,
//! when a command is present for them, a rigid commanded displacement that
//! bypasses the flocking rules for that tick. All updates are synchronous:
//! every bird reads the pre-step state.

use std::collections::{BTreeMap, HashSet};

use rand::Rng;
use thiserror::Error;

use crate::geometry::{
    circular_mean, torus_delta, torus_distance, turn_towards, HeadingDeg, Position, TorusWorld,
    Vec2,
};
use crate::SimTime;

pub type BirdId = u32;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoidsError {
    #[error("command refers to unknown bird {0}")]
    UnknownBird(BirdId),
    #[error("invalid micro parameters: {0}")]
    InvalidParams(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bird {
    pub id: BirdId,
    pub pos: Position,
    pub heading: HeadingDeg,
}

/// Identifier, position and heading of every bird, ascending by id.
pub type MicroObservation = Vec<Bird>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MicroParams {
    pub vision: f64,
    pub min_separation: f64,
    pub max_align_turn: f64,
    pub max_cohere_turn: f64,
    pub max_separate_turn: f64,
    pub speed: f64,
}

impl Default for MicroParams {
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

impl MicroParams {
    pub fn validate(&self) -> Result<(), BoidsError> {
        let values = [
            ("vision", self.vision),
            ("min_separation", self.min_separation),
            ("max_align_turn", self.max_align_turn),
            ("max_cohere_turn", self.max_cohere_turn),
            ("max_separate_turn", self.max_separate_turn),
            ("speed", self.speed),
        ];
        for (name, v) in values {
            if !(v.is_finite() && v >= 0.0) {
                return Err(BoidsError::InvalidParams(format!(
                    "{name} must be a non-negative number, got {v}"
                )));
            }
        }
        if self.vision < self.min_separation {
            return Err(BoidsError::InvalidParams(format!(
                "vision ({}) must be at least min_separation ({})",
                self.vision, self.min_separation
            )));
        }
        Ok(())
    }
}

/// Displacement and heading imposed on one bird for one tick.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Command {
    pub v: Vec2,
    pub heading: HeadingDeg,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CommandSet {
    commands: BTreeMap<BirdId, Command>,
}

impl CommandSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the previous command for `id`, if any.
    pub fn insert(&mut self, id: BirdId, cmd: Command) -> Option<Command> {
        self.commands.insert(id, cmd)
    }

    pub fn get(&self, id: BirdId) -> Option<&Command> {
        self.commands.get(&id)
    }

    pub fn len(&self) -> usize {
        self.commands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.commands.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (BirdId, &Command)> {
        self.commands.iter().map(|(id, c)| (*id, c))
    }
}

impl FromIterator<(BirdId, Command)> for CommandSet {
    fn from_iter<I: IntoIterator<Item = (BirdId, Command)>>(iter: I) -> Self {
        Self {
            commands: iter.into_iter().collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MicroState {
    pub birds: Vec<Bird>,
    pub tick: SimTime,
    pub world: TorusWorld,
}

impl MicroState {
    pub fn new(birds: Vec<Bird>, world: TorusWorld) -> Self {
        Self {
            birds,
            tick: SimTime::ZERO,
            world,
        }
    }
}

/// `n` birds with ids `0..n`, uniform positions and headings.
pub fn init_random<R: Rng + ?Sized>(n: usize, world: TorusWorld, rng: &mut R) -> MicroState {
    let birds = (0..n)
        .map(|i| {
            let x = rng.gen_range(0.0..world.width());
            let y = rng.gen_range(0.0..world.height());
            let heading = HeadingDeg::new(rng.gen_range(0.0..360.0));
            Bird {
                id: i as BirdId,
                pos: Position::new(x, y),
                heading,
            }
        })
        .collect();
    MicroState::new(birds, world)
}

/// Other birds within `vision` (inclusive), ordered by id.
pub fn flockmates(bird: &Bird, state: &MicroState, params: &MicroParams) -> Vec<Bird> {
    let mut mates: Vec<Bird> = state
        .birds
        .iter()
        .filter(|o| {
            o.id != bird.id && torus_distance(bird.pos, o.pos, &state.world) <= params.vision
        })
        .copied()
        .collect();
    mates.sort_by_key(|b| b.id);
    mates
}

/// The bounded-turn rule shared by both levels.
///
/// `mates` is expected in ascending id order; `distance` is the metric used
/// for the nearest-mate search and separation test (plain torus distance for
/// birds, surface distance for flocks).
pub(crate) fn steer(
    heading: HeadingDeg,
    pos: Position,
    mates: &[(u32, Position, HeadingDeg, f64)],
    turns: TurnLimits,
    world: &TorusWorld,
) -> HeadingDeg {
    let Some(&(_, nearest_pos, _, nearest_dist)) = mates
        .iter()
        .min_by(|a, b| a.3.total_cmp(&b.3).then(a.0.cmp(&b.0)))
    else {
        return heading;
    };

    if nearest_dist < turns.min_separation {
        return match HeadingDeg::of_vector(torus_delta(nearest_pos, pos, world)) {
            Some(away) => turn_towards(heading, away, turns.separate),
            None => heading,
        };
    }

    let mut h = heading;
    let mate_headings: Vec<HeadingDeg> = mates.iter().map(|m| m.2).collect();
    if let Ok(mean) = circular_mean(&mate_headings) {
        h = turn_towards(h, mean, turns.align);
    }
    let pull: Vec2 = mates.iter().map(|m| torus_delta(pos, m.1, world)).sum();
    if let Some(towards) = HeadingDeg::of_vector(pull) {
        h = turn_towards(h, towards, turns.cohere);
    }
    h
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct TurnLimits {
    pub min_separation: f64,
    pub align: f64,
    pub cohere: f64,
    pub separate: f64,
}

impl From<&MicroParams> for TurnLimits {
    fn from(p: &MicroParams) -> Self {
        Self {
            min_separation: p.min_separation,
            align: p.max_align_turn,
            cohere: p.max_cohere_turn,
            separate: p.max_separate_turn,
        }
    }
}

pub fn step_autonomous(
    bird: &Bird,
    mates: &[Bird],
    params: &MicroParams,
    world: &TorusWorld,
) -> Bird {
    let annotated: Vec<_> = mates
        .iter()
        .map(|m| {
            (
                m.id,
                m.pos,
                m.heading,
                torus_distance(bird.pos, m.pos, world),
            )
        })
        .collect();
    let heading = steer(bird.heading, bird.pos, &annotated, params.into(), world);
    Bird {
        id: bird.id,
        pos: bird
            .pos
            .translate(heading.unit().scale(params.speed), world),
        heading,
    }
}

pub fn step_commanded(bird: &Bird, cmd: &Command, world: &TorusWorld) -> Bird {
    Bird {
        id: bird.id,
        pos: bird.pos.translate(cmd.v, world),
        heading: cmd.heading,
    }
}

/// One synchronous tick: commanded birds translate rigidly, the others run
/// the flocking rules against the pre-step state.
pub fn micro_step(
    state: &MicroState,
    cmds: Option<&CommandSet>,
    params: &MicroParams,
) -> Result<MicroState, BoidsError> {
    if let Some(cmds) = cmds {
        let ids: HashSet<BirdId> = state.birds.iter().map(|b| b.id).collect();
        if let Some((id, _)) = cmds.iter().find(|(id, _)| !ids.contains(id)) {
            return Err(BoidsError::UnknownBird(id));
        }
    }
    let world = &state.world;
    let birds = state
        .birds
        .iter()
        .map(|b| match cmds.and_then(|c| c.get(b.id)) {
            Some(cmd) => step_commanded(b, cmd, world),
            None => step_autonomous(b, &flockmates(b, state, params), params, world),
        })
        .collect();
    Ok(MicroState {
        birds,
        tick: state.tick.next(),
        world: *world,
    })
}

pub fn observe(state: &MicroState) -> MicroObservation {
    let mut out = state.birds.clone();
    out.sort_by_key(|b| b.id);
    out
}
