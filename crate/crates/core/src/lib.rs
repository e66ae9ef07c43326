//! Two-level co-simulation of bird flocking.
//!
//! The bird level ([`boids`]) and the flock level ([`flocks`]) are separate
//! models, each owned by an m-agent of the [`kernel`]. They exchange data
//! only through coupling artifacts: emergence reifies clusters of birds as
//! flocks, immergence turns flock displacements back into per-bird commands
//! ([`coupling`]). [`experiment`] wires the standard variants and runs
//! seeded replications.

pub mod assignment;
pub mod boids;
pub mod coupling;
pub mod experiment;
pub mod flocks;
pub mod geometry;
pub mod kernel;
pub mod models;

use std::fmt;

pub use boids::{Bird, BirdId, CommandSet, MicroObservation, MicroParams, MicroState};
pub use coupling::{ClusterParams, FlockObservation, RadiusRule};
pub use experiment::{ExperimentConfig, RunRecord, Variant, VariantSpec};
pub use flocks::{Displacement, DisplacementList, Flock, FlockId, MacroParams, MacroState};
pub use geometry::{HeadingDeg, Position, TorusWorld, Vec2};
pub use kernel::{EventLog, MultiModel};

/// Simulation time in micro ticks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct SimTime(pub u64);

impl SimTime {
    pub const ZERO: SimTime = SimTime(0);

    pub fn ticks(self) -> u64 {
        self.0
    }

    pub fn next(self) -> SimTime {
        SimTime(self.0 + 1)
    }

    pub fn plus(self, ticks: u64) -> SimTime {
        SimTime(self.0 + ticks)
    }
}

impl fmt::Display for SimTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}
