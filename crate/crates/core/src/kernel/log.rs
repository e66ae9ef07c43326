use std::fmt;
use std::io::{self, Write};

use crate::SimTime;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Read,
    Write,
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Op::Read => "read",
            Op::Write => "write",
        })
    }
}

pub const ABSENT_KIND: &str = "absent";

#[derive(Debug, Clone, PartialEq)]
pub struct LogRecord {
    pub tick: SimTime,
    pub agent: String,
    pub op: Op,
    pub artifact: String,
    pub payload_kind: &'static str,
    pub payload_size: usize,
    /// Cycle index of the agent; 0 is initialization.
    pub cycle: u64,
    /// Agent's local clock when the operation happened.
    pub clock: SimTime,
    /// Digest of the payload as written, or as delivered for reads.
    pub fingerprint: u64,
}

/// Append-only record of every artifact read and write of a run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EventLog {
    records: Vec<LogRecord>,
}

impl EventLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, record: LogRecord) {
        self.records.push(record);
    }

    pub fn records(&self) -> &[LogRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// `tick;agent;op;artifact;payload_kind;payload_size` per line.
    pub fn write_export<W: Write>(&self, mut out: W) -> io::Result<()> {
        for r in &self.records {
            writeln!(
                out,
                "{};{};{};{};{};{}",
                r.tick, r.agent, r.op, r.artifact, r.payload_kind, r.payload_size
            )?;
        }
        Ok(())
    }

    pub fn export(&self) -> String {
        let mut buf = Vec::new();
        self.write_export(&mut buf)
            .expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("export is ASCII")
    }
}
