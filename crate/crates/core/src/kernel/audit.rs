//! Post-run checks over an [`EventLog`] and the artifacts of the run.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use super::{ArtifactKind, EventLog, MultiModel, Op, Payload};

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    /// Index into the event log, when the problem is tied to one record.
    pub record: Option<usize>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.record {
            Some(i) => write!(f, "record {i}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

fn violation(record: Option<usize>, message: String) -> Violation {
    Violation { record, message }
}

/// Within every agent cycle, each read must carry a timestamp strictly
/// below every write of that cycle, and no read may be stamped before the
/// reader's local clock.
pub fn causality_violations(log: &EventLog) -> Vec<Violation> {
    let mut cycles: BTreeMap<(&str, u64), Vec<usize>> = BTreeMap::new();
    let mut out = Vec::new();
    for (i, r) in log.records().iter().enumerate() {
        if r.op == Op::Read && r.tick < r.clock {
            out.push(violation(
                Some(i),
                format!(
                    "{} read {}@{} after its clock reached {}",
                    r.agent, r.artifact, r.tick, r.clock
                ),
            ));
        }
        cycles
            .entry((r.agent.as_str(), r.cycle))
            .or_default()
            .push(i);
    }
    let records = log.records();
    for indices in cycles.values() {
        for &w in indices.iter().filter(|&&i| records[i].op == Op::Write) {
            for &r in indices.iter().filter(|&&i| records[i].op == Op::Read) {
                if records[r].tick >= records[w].tick {
                    out.push(violation(
                        Some(w),
                        format!(
                            "{} wrote {}@{} in the cycle that read {}@{}",
                            records[w].agent,
                            records[w].artifact,
                            records[w].tick,
                            records[r].artifact,
                            records[r].tick
                        ),
                    ));
                }
            }
        }
    }
    out
}

/// Every delivered payload must equal the transform of what was written at
/// that tick; writes must mirror the artifact buffers; each consumer reads
/// ticks in strictly increasing order; every event before the horizon is
/// consumed exactly once.
pub fn coherence_violations(model: &MultiModel, log: &EventLog) -> Vec<Violation> {
    let mut out = Vec::new();
    let records = log.records();

    for art in model.artifacts() {
        let name = art.name();
        let writes: Vec<(usize, &super::LogRecord)> = records
            .iter()
            .enumerate()
            .filter(|(_, r)| r.op == Op::Write && r.artifact == name)
            .collect();
        if writes.len() != art.events().len() {
            out.push(violation(
                None,
                format!(
                    "{name}: {} logged writes for {} buffered events",
                    writes.len(),
                    art.events().len()
                ),
            ));
        }
        for ((i, w), ev) in writes.iter().zip(art.events()) {
            if w.tick != ev.timestamp || w.fingerprint != ev.payload.fingerprint() {
                out.push(violation(
                    Some(*i),
                    format!(
                        "{name}: logged write differs from buffer at {}",
                        ev.timestamp
                    ),
                ));
            }
        }

        let mut consumed: HashMap<u64, usize> = HashMap::new();
        let mut last_read: HashMap<&str, u64> = HashMap::new();
        for (i, r) in records.iter().enumerate() {
            if r.op != Op::Read || r.artifact != name {
                continue;
            }
            let tick = r.tick.ticks();
            if let Some(prev) = last_read.insert(r.agent.as_str(), tick) {
                if tick <= prev {
                    out.push(violation(
                        Some(i),
                        format!("{name}: {} read {tick} after {prev}", r.agent),
                    ));
                }
            }
            let written_before = writes.iter().any(|(wi, w)| *wi < i && w.tick == r.tick);
            match art.event_at(r.tick) {
                Some(raw) => {
                    *consumed.entry(tick).or_default() += 1;
                    if !written_before {
                        out.push(violation(
                            Some(i),
                            format!("{name}@{tick} read before it was written"),
                        ));
                    }
                    match art.transform(raw) {
                        Ok(p) if p.fingerprint() == r.fingerprint && p.kind() == r.payload_kind => {}
                        _ => out.push(violation(
                            Some(i),
                            format!("{name}@{tick}: delivered payload differs from transform of the write"),
                        )),
                    }
                }
                None => {
                    if r.payload_kind != super::ABSENT_KIND {
                        out.push(violation(
                            Some(i),
                            format!("{name}@{tick}: payload delivered with no write"),
                        ));
                    }
                }
            }
        }

        let has_consumer = model.agents().iter().any(|a| {
            a.inputs()
                .iter()
                .any(|&id| model.artifacts()[id].name() == name)
        });
        if has_consumer {
            for ev in art
                .events()
                .iter()
                .filter(|e| e.timestamp < model.horizon())
            {
                let n = consumed.get(&ev.timestamp.ticks()).copied().unwrap_or(0);
                if n != 1 {
                    out.push(violation(
                        None,
                        format!("{name}@{}: consumed {n} times", ev.timestamp),
                    ));
                }
            }
        }
    }
    out
}

/// Cardinality contracts of every buffered event: plain artifacts preserve
/// item counts, emergence yields at most `birds / min_size` flocks, and
/// immergence yields exactly one command per flock member.
pub fn cardinality_violations(model: &MultiModel, min_size: usize) -> Vec<Violation> {
    let mut out = Vec::new();
    for art in model.artifacts() {
        for ev in art.events() {
            let t = ev.timestamp;
            let delivered = match art.transform(&ev.payload) {
                Ok(p) => p,
                Err(e) => {
                    out.push(violation(
                        None,
                        format!("{}@{t}: transform failed: {e}", art.name()),
                    ));
                    continue;
                }
            };
            let ok = match (art.kind(), &ev.payload, &delivered) {
                (ArtifactKind::Plain, raw, p) => raw.len() == p.len(),
                (_, Payload::MicroObservation(birds), Payload::Flocks(f)) => {
                    f.len() <= birds.len() / min_size.max(1)
                }
                (_, raw @ Payload::Displacements(_), Payload::Commands(c)) => {
                    c.len() == raw.member_total()
                }
                _ => false,
            };
            if !ok {
                out.push(violation(
                    None,
                    format!(
                        "{}@{t}: {} {} -> {} {}",
                        art.name(),
                        ev.payload.len(),
                        ev.payload.kind(),
                        delivered.len(),
                        delivered.kind()
                    ),
                ));
            }
        }
    }
    out
}
