use std::collections::hash_map::DefaultHasher;
use std::hash::Hasher;

use crate::boids::{CommandSet, MicroObservation};
use crate::coupling::FlockObservation;
use crate::flocks::DisplacementList;
use crate::geometry::{HeadingDeg, Position, Vec2};

/// A flock displacement list tagged with the micro tick it is meant for:
/// sub-step `phase` (1-based) out of `phases`.
#[derive(Debug, Clone, PartialEq)]
pub struct StagedDisplacements {
    pub list: DisplacementList,
    pub phase: u32,
    pub phases: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    MicroObservation(MicroObservation),
    Flocks(Vec<FlockObservation>),
    Displacements(StagedDisplacements),
    Commands(CommandSet),
}

impl Payload {
    pub fn kind(&self) -> &'static str {
        match self {
            Payload::MicroObservation(_) => "micro_observation",
            Payload::Flocks(_) => "flock_list",
            Payload::Displacements(_) => "displacement_list",
            Payload::Commands(_) => "command_set",
        }
    }

    /// Number of items carried: birds, flocks, flock displacements, or
    /// per-bird commands.
    pub fn len(&self) -> usize {
        match self {
            Payload::MicroObservation(b) => b.len(),
            Payload::Flocks(f) => f.len(),
            Payload::Displacements(d) => d.list.len(),
            Payload::Commands(c) => c.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Total member count over the flocks carried, zero for bird-level data.
    pub fn member_total(&self) -> usize {
        match self {
            Payload::Flocks(f) => f.iter().map(|o| o.members.len()).sum(),
            Payload::Displacements(d) => d.list.iter().map(|x| x.members.len()).sum(),
            Payload::MicroObservation(_) | Payload::Commands(_) => 0,
        }
    }

    /// Stable digest of the full contents, bit-exact on floats.
    pub fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        h.write(self.kind().as_bytes());
        match self {
            Payload::MicroObservation(birds) => {
                h.write_usize(birds.len());
                for b in birds {
                    h.write_u32(b.id);
                    pos(&mut h, b.pos);
                    heading(&mut h, b.heading);
                }
            }
            Payload::Flocks(flocks) => {
                h.write_usize(flocks.len());
                for f in flocks {
                    h.write_usize(f.members.len());
                    f.members.iter().for_each(|m| h.write_u32(*m));
                    pos(&mut h, f.centroid);
                    heading(&mut h, f.heading);
                    h.write_u64(f.radius.to_bits());
                }
            }
            Payload::Displacements(d) => {
                h.write_u32(d.phase);
                h.write_u32(d.phases);
                h.write_usize(d.list.len());
                for x in &d.list {
                    h.write_u32(x.flock_id);
                    h.write_usize(x.members.len());
                    x.members.iter().for_each(|m| h.write_u32(*m));
                    vec2(&mut h, x.v);
                    heading(&mut h, x.heading);
                }
            }
            Payload::Commands(c) => {
                h.write_usize(c.len());
                for (id, cmd) in c.iter() {
                    h.write_u32(id);
                    vec2(&mut h, cmd.v);
                    heading(&mut h, cmd.heading);
                }
            }
        }
        h.finish()
    }
}

fn pos(h: &mut DefaultHasher, p: Position) {
    h.write_u64(p.x.to_bits());
    h.write_u64(p.y.to_bits());
}

fn vec2(h: &mut DefaultHasher, v: Vec2) {
    h.write_u64(v.dx.to_bits());
    h.write_u64(v.dy.to_bits());
}

fn heading(h: &mut DefaultHasher, d: HeadingDeg) {
    h.write_u64(d.degrees().to_bits());
}
