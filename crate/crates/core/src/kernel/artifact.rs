//! Coupling artifacts: timestamped mailboxes between one producer and its
//! consumers, with a pure transformation applied on every read.

use std::fmt;

use thiserror::Error;

use super::payload::Payload;
use crate::coupling::{emergence_transform, immergence_transform, ClusterParams, CouplingError};
use crate::geometry::TorusWorld;
use crate::SimTime;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ArtifactError {
    #[error("write at {t} does not follow last timestamp {last}")]
    NonMonotone { t: SimTime, last: SimTime },
    #[error("{writer} is not the producer of this artifact ({producer})")]
    NotProducer { writer: String, producer: String },
    #[error("read at {t} before producer guaranteed it (producer clock {clock:?})")]
    NotYetAvailable { t: SimTime, clock: Option<SimTime> },
    #[error("plain artifact changed cardinality from {input} to {output}")]
    Cardinality { input: usize, output: usize },
    #[error("transformer rejected {kind} payload")]
    WrongPayload { kind: &'static str },
    #[error(transparent)]
    Transform(#[from] CouplingError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArtifactKind {
    /// Preserves payload cardinality.
    Plain,
    /// May reduce or expand the information it carries.
    Interpretation,
}

/// Pure function applied to a payload each time it is read.
pub trait Transform: Send + Sync + fmt::Debug {
    fn kind(&self) -> ArtifactKind;

    fn apply(&self, payload: &Payload) -> Result<Payload, ArtifactError>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Identity;

impl Transform for Identity {
    fn kind(&self) -> ArtifactKind {
        ArtifactKind::Plain
    }

    fn apply(&self, payload: &Payload) -> Result<Payload, ArtifactError> {
        Ok(payload.clone())
    }
}

/// Bird snapshot to reified flock observations.
#[derive(Debug, Clone, Copy)]
pub struct Emergence {
    pub params: ClusterParams,
    pub world: TorusWorld,
}

impl Transform for Emergence {
    fn kind(&self) -> ArtifactKind {
        ArtifactKind::Interpretation
    }

    fn apply(&self, payload: &Payload) -> Result<Payload, ArtifactError> {
        match payload {
            Payload::MicroObservation(obs) => Ok(Payload::Flocks(emergence_transform(
                obs,
                &self.params,
                &self.world,
            ))),
            other => Err(ArtifactError::WrongPayload { kind: other.kind() }),
        }
    }
}

/// Staged flock displacements to the per-bird commands of that sub-step.
#[derive(Debug, Clone, Copy, Default)]
pub struct Immergence;

impl Transform for Immergence {
    fn kind(&self) -> ArtifactKind {
        ArtifactKind::Interpretation
    }

    fn apply(&self, payload: &Payload) -> Result<Payload, ArtifactError> {
        match payload {
            Payload::Displacements(staged) => {
                let mut sets = immergence_transform(&staged.list, staged.phases)?;
                let idx = staged.phase as usize;
                if idx == 0 || idx > sets.len() {
                    return Err(ArtifactError::WrongPayload {
                        kind: payload.kind(),
                    });
                }
                Ok(Payload::Commands(sets.swap_remove(idx - 1)))
            }
            other => Err(ArtifactError::WrongPayload { kind: other.kind() }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimestampedEvent {
    pub timestamp: SimTime,
    pub payload: Payload,
}

#[derive(Debug)]
pub struct CouplingArtifact {
    name: String,
    producer: String,
    transformer: Box<dyn Transform>,
    buffer: Vec<TimestampedEvent>,
    producer_clock: Option<SimTime>,
}

impl CouplingArtifact {
    pub fn new(
        name: impl Into<String>,
        producer: impl Into<String>,
        transformer: Box<dyn Transform>,
    ) -> Self {
        Self {
            name: name.into(),
            producer: producer.into(),
            transformer,
            buffer: Vec::new(),
            producer_clock: None,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn producer(&self) -> &str {
        &self.producer
    }

    pub fn kind(&self) -> ArtifactKind {
        self.transformer.kind()
    }

    pub fn producer_clock(&self) -> Option<SimTime> {
        self.producer_clock
    }

    pub fn events(&self) -> &[TimestampedEvent] {
        &self.buffer
    }

    /// Raw payload stamped `t`, without transformation.
    pub fn event_at(&self, t: SimTime) -> Option<&Payload> {
        self.buffer
            .binary_search_by_key(&t, |e| e.timestamp)
            .ok()
            .map(|i| &self.buffer[i].payload)
    }

    pub fn write_event(
        &mut self,
        writer: &str,
        t: SimTime,
        payload: Payload,
    ) -> Result<(), ArtifactError> {
        if writer != self.producer {
            return Err(ArtifactError::NotProducer {
                writer: writer.to_owned(),
                producer: self.producer.clone(),
            });
        }
        if let Some(last) = self.buffer.last().map(|e| e.timestamp) {
            if t <= last {
                return Err(ArtifactError::NonMonotone { t, last });
            }
        }
        self.buffer.push(TimestampedEvent {
            timestamp: t,
            payload,
        });
        self.advance(t);
        Ok(())
    }

    /// Records that the producer will never write at or before `t`.
    pub fn advance(&mut self, t: SimTime) {
        self.producer_clock = Some(self.producer_clock.map_or(t, |c| c.max(t)));
    }

    pub fn is_available(&self, t: SimTime) -> bool {
        self.producer_clock.is_some_and(|c| c >= t)
    }

    /// Transformed payload stamped `t`, or `None` when the producer passed
    /// `t` without writing.
    pub fn read_event(&self, t: SimTime) -> Result<Option<Payload>, ArtifactError> {
        if !self.is_available(t) {
            return Err(ArtifactError::NotYetAvailable {
                t,
                clock: self.producer_clock,
            });
        }
        self.event_at(t).map(|raw| self.transform(raw)).transpose()
    }

    pub fn transform(&self, raw: &Payload) -> Result<Payload, ArtifactError> {
        let out = self.transformer.apply(raw)?;
        if self.kind() == ArtifactKind::Plain && out.len() != raw.len() {
            return Err(ArtifactError::Cardinality {
                input: raw.len(),
                output: out.len(),
            });
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boids::{Bird, BirdId};
    use crate::flocks::Displacement;
    use crate::geometry::{HeadingDeg, Position, Vec2};
    use crate::kernel::payload::StagedDisplacements;

    fn obs(n: u32) -> Payload {
        Payload::MicroObservation(
            (0..n)
                .map(|i| Bird {
                    id: i as BirdId,
                    pos: Position::new(i as f64, 0.0),
                    heading: HeadingDeg::new(0.0),
                })
                .collect(),
        )
    }

    fn staged(phase: u32) -> Payload {
        Payload::Displacements(StagedDisplacements {
            list: vec![Displacement {
                flock_id: 0,
                members: [0, 1, 2].into_iter().collect(),
                v: Vec2::new(4.0, 0.0),
                heading: HeadingDeg::new(0.0),
            }],
            phase,
            phases: 4,
        })
    }

    fn plain() -> CouplingArtifact {
        CouplingArtifact::new("e", "A_m", Box::new(Identity))
    }

    #[test]
    fn writes_are_strictly_increasing() {
        let mut a = plain();
        a.write_event("A_m", SimTime(0), obs(2)).unwrap();
        assert_eq!(a.events().len(), 1);
        a.write_event("A_m", SimTime(4), obs(2)).unwrap();
        assert_eq!(
            a.events().iter().map(|e| e.timestamp).collect::<Vec<_>>(),
            vec![SimTime(0), SimTime(4)]
        );
        assert_eq!(a.producer_clock(), Some(SimTime(4)));
        assert_eq!(
            a.write_event("A_m", SimTime(4), obs(2)),
            Err(ArtifactError::NonMonotone {
                t: SimTime(4),
                last: SimTime(4)
            })
        );

        let mut b = plain();
        b.write_event("A_m", SimTime(0), obs(1)).unwrap();
        assert!(b.write_event("A_m", SimTime(0), obs(1)).is_err());
    }

    #[test]
    fn only_the_producer_writes() {
        let mut a = plain();
        assert!(matches!(
            a.write_event("A_M", SimTime(0), obs(1)),
            Err(ArtifactError::NotProducer { .. })
        ));
    }

    #[test]
    fn reads_block_until_producer_passes() {
        let mut a = plain();
        assert!(matches!(
            a.read_event(SimTime(0)),
            Err(ArtifactError::NotYetAvailable { .. })
        ));
        a.write_event("A_m", SimTime(0), obs(3)).unwrap();
        assert_eq!(a.read_event(SimTime(0)).unwrap(), Some(obs(3)));
        assert!(a.read_event(SimTime(1)).is_err());
    }

    #[test]
    fn passed_tick_without_event_reads_absent() {
        let mut i = CouplingArtifact::new("i", "A_M", Box::new(Immergence));
        i.advance(SimTime(4));
        assert_eq!(i.read_event(SimTime(1)).unwrap(), None);
    }

    #[test]
    fn immergence_reads_one_sub_step() {
        let mut i = CouplingArtifact::new("i", "A_M", Box::new(Immergence));
        for k in 1..=4 {
            i.write_event("A_M", SimTime(k as u64), staged(k)).unwrap();
        }
        let Some(Payload::Commands(c)) = i.read_event(SimTime(1)).unwrap() else {
            panic!("expected commands");
        };
        assert_eq!(c.len(), 3);
        assert_eq!(c.get(0).unwrap().v, Vec2::new(1.0, 0.0));
        // pure transform: repeated reads agree
        assert_eq!(
            i.read_event(SimTime(2)).unwrap(),
            i.read_event(SimTime(2)).unwrap()
        );
        assert_eq!(i.kind(), ArtifactKind::Interpretation);
    }

    #[test]
    fn transformers_reject_foreign_payloads() {
        assert!(Immergence.apply(&obs(1)).is_err());
        assert!(Immergence.apply(&staged(5)).is_err());
        let e = Emergence {
            params: ClusterParams::default(),
            world: TorusWorld::default(),
        };
        assert!(e.apply(&staged(1)).is_err());
    }

    #[derive(Debug)]
    struct Dropper;

    impl Transform for Dropper {
        fn kind(&self) -> ArtifactKind {
            ArtifactKind::Plain
        }

        fn apply(&self, _: &Payload) -> Result<Payload, ArtifactError> {
            Ok(Payload::Flocks(vec![]))
        }
    }

    #[test]
    fn plain_artifacts_must_preserve_cardinality() {
        let mut a = CouplingArtifact::new("x", "A_m", Box::new(Dropper));
        a.write_event("A_m", SimTime(0), obs(2)).unwrap();
        assert_eq!(
            a.read_event(SimTime(0)),
            Err(ArtifactError::Cardinality {
                input: 2,
                output: 0
            })
        );
    }
}
