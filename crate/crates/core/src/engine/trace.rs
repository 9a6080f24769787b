use crate::network::{NetworkInstance, RumorId, StationId, TransmissionSet};
use crate::scalar::Real;
use crate::sinr::{receives, SinrParams};
use serde::Serialize;
use std::collections::BTreeSet;
use std::io::{self, Write};
use thiserror::Error;

pub const TRACE_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Delivery {
    pub sender: StationId,
    pub receiver: StationId,
    pub rumor: Option<RumorId>,
    pub bits: u32,
}

/// One round in which somebody transmitted; silent rounds are not stored.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RoundTrace {
    pub round: u64,
    pub transmitters: TransmissionSet,
    pub deliveries: Vec<Delivery>,
    pub wakeups: Vec<StationId>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Trace {
    pub rounds: Vec<RoundTrace>,
}

#[derive(Serialize)]
struct Record<'a> {
    schema: u32,
    #[serde(flatten)]
    round: &'a RoundTrace,
}

impl Trace {
    /// Newline-delimited JSON, one record per stored round.
    pub fn write_ndjson<W: Write>(&self, mut out: W) -> io::Result<()> {
        for r in &self.rounds {
            serde_json::to_writer(&mut out, &Record { schema: TRACE_SCHEMA_VERSION, round: r })?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn transmissions(&self) -> usize {
        self.rounds.iter().map(|r| r.transmitters.len()).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AuditError {
    #[error("round {round}: recorded deliveries {recorded:?} but the oracle gives {oracle:?}")]
    Mismatch { round: u64, recorded: Vec<(StationId, StationId)>, oracle: Vec<(StationId, StationId)> },
    #[error("round {round}: unknown station in trace")]
    Unknown { round: u64 },
}

/// Replays every round through the standalone reception oracle, checking every
/// (transmitter, station) pair, and demands the identical delivery set.
pub fn audit_trace<T: Real>(net: &NetworkInstance<T>, p: &SinrParams<T>, trace: &Trace) -> Result<(), AuditError> {
    for r in &trace.rounds {
        if r.transmitters.iter().any(|&t| !net.contains(t)) {
            return Err(AuditError::Unknown { round: r.round });
        }
        let mut oracle = BTreeSet::new();
        for &s in &r.transmitters {
            for v in net.ids() {
                if receives(s, v, &r.transmitters, net, p) {
                    oracle.insert((s, v));
                }
            }
        }
        let recorded: BTreeSet<_> = r.deliveries.iter().map(|d| (d.sender, d.receiver)).collect();
        if recorded.len() != r.deliveries.len() || recorded != oracle {
            return Err(AuditError::Mismatch {
                round: r.round,
                recorded: recorded.into_iter().collect(),
                oracle: oracle.into_iter().collect(),
            });
        }
    }
    Ok(())
}
