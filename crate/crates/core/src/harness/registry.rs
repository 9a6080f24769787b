//! Protocols by name, and runs dispatched over the scalar types the library supports.

use crate::engine::{audit_trace, run_protocol, Annotation, AuditError, EngineError, Protocol, RunConfig, Setting, Trace};
use crate::netgen::{adversary_run, AdversaryError, AdversaryReport};
use crate::network::{NetworkInstance, RumorId, StationId};
use crate::protocols::{Btd, CentralGranDependent, CentralGranIndependent, Flooding, GeneralMulticast, IdRoundRobin, LocalMulticast};
use crate::scalar::Real;
use crate::sinr::SinrParams;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum ProtocolKind {
    CentralGranIndependent,
    CentralGranDependent,
    LocalMulticast,
    GeneralMulticast,
    Btd,
    Flooding,
    IdRoundRobin,
}

impl ProtocolKind {
    pub const ALL: [ProtocolKind; 7] = [
        ProtocolKind::CentralGranIndependent,
        ProtocolKind::CentralGranDependent,
        ProtocolKind::LocalMulticast,
        ProtocolKind::GeneralMulticast,
        ProtocolKind::Btd,
        ProtocolKind::Flooding,
        ProtocolKind::IdRoundRobin,
    ];

    /// The multi-broadcast protocols proper, without the baselines.
    pub const MAIN: [ProtocolKind; 5] = [
        ProtocolKind::CentralGranIndependent,
        ProtocolKind::CentralGranDependent,
        ProtocolKind::LocalMulticast,
        ProtocolKind::GeneralMulticast,
        ProtocolKind::Btd,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProtocolKind::CentralGranIndependent => "central-gran-independent",
            ProtocolKind::CentralGranDependent => "central-gran-dependent",
            ProtocolKind::LocalMulticast => "local-multicast",
            ProtocolKind::GeneralMulticast => "general-multicast",
            ProtocolKind::Btd => "btd",
            ProtocolKind::Flooding => "flooding",
            ProtocolKind::IdRoundRobin => "id-round-robin",
        }
    }

    pub fn setting(self) -> Setting {
        match self {
            ProtocolKind::CentralGranIndependent | ProtocolKind::CentralGranDependent => Setting::FullTopology,
            ProtocolKind::LocalMulticast => Setting::NeighborsWithCoords,
            ProtocolKind::GeneralMulticast => Setting::OwnCoordsOnly,
            ProtocolKind::Btd | ProtocolKind::Flooding | ProtocolKind::IdRoundRobin => Setting::NeighborIdsOnly,
        }
    }
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProtocolKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        ProtocolKind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| {
            let names: Vec<_> = ProtocolKind::ALL.iter().map(|k| k.name()).collect();
            format!("unknown protocol {s:?}, expected one of {}", names.join(", "))
        })
    }
}

impl TryFrom<String> for ProtocolKind {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl From<ProtocolKind> for String {
    fn from(k: ProtocolKind) -> String {
        k.name().to_string()
    }
}

/// What a run leaves behind once the node states are dropped.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub rounds: u64,
    pub completion_round: Option<u64>,
    pub completed: bool,
    pub terminated: bool,
    pub trace: Trace,
    pub notes: Vec<Annotation>,
}

#[derive(Debug, thiserror::Error)]
pub enum ExecError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Audit(#[from] AuditError),
}

/// Scalar types with a complete protocol set.
pub trait Scalar: Real {
    fn execute(
        kind: ProtocolKind,
        net: &NetworkInstance<Self>,
        p: &SinrParams<Self>,
        sources: &BTreeMap<StationId, BTreeSet<RumorId>>,
        cfg: RunConfig,
        audit: bool,
    ) -> Result<Outcome, ExecError>;

    fn adversary(kind: ProtocolKind, delta: usize, p: &SinrParams<Self>, limit: u64) -> Result<AdversaryReport, AdversaryError>;
}

fn exec<T: Real, P: Protocol<T>>(
    proto: &P,
    net: &NetworkInstance<T>,
    p: &SinrParams<T>,
    sources: &BTreeMap<StationId, BTreeSet<RumorId>>,
    mut cfg: RunConfig,
    audit: bool,
) -> Result<Outcome, ExecError> {
    cfg.record_trace |= audit;
    let out = run_protocol(net, p, proto, sources, cfg)?;
    if audit {
        audit_trace(net, p, &out.trace)?;
    }
    Ok(Outcome {
        rounds: out.rounds,
        completion_round: out.completion_round,
        completed: out.completed,
        terminated: out.terminated,
        trace: out.trace,
        notes: out.notes,
    })
}

macro_rules! scalar {
    ($t:ty) => {
        impl Scalar for $t {
            fn execute(
                kind: ProtocolKind,
                net: &NetworkInstance<$t>,
                p: &SinrParams<$t>,
                sources: &BTreeMap<StationId, BTreeSet<RumorId>>,
                cfg: RunConfig,
                audit: bool,
            ) -> Result<Outcome, ExecError> {
                match kind {
                    ProtocolKind::CentralGranIndependent => exec(&CentralGranIndependent::default(), net, p, sources, cfg, audit),
                    ProtocolKind::CentralGranDependent => exec(&CentralGranDependent::default(), net, p, sources, cfg, audit),
                    ProtocolKind::LocalMulticast => exec(&LocalMulticast, net, p, sources, cfg, audit),
                    ProtocolKind::GeneralMulticast => exec(&GeneralMulticast, net, p, sources, cfg, audit),
                    ProtocolKind::Btd => exec(&Btd, net, p, sources, cfg, audit),
                    ProtocolKind::Flooding => exec(&Flooding::default(), net, p, sources, cfg, audit),
                    ProtocolKind::IdRoundRobin => exec(&IdRoundRobin, net, p, sources, cfg, audit),
                }
            }

            fn adversary(kind: ProtocolKind, delta: usize, p: &SinrParams<$t>, limit: u64) -> Result<AdversaryReport, AdversaryError> {
                match kind {
                    ProtocolKind::CentralGranIndependent => adversary_run(&CentralGranIndependent::default(), delta, p, limit),
                    ProtocolKind::CentralGranDependent => adversary_run(&CentralGranDependent::default(), delta, p, limit),
                    ProtocolKind::LocalMulticast => adversary_run(&LocalMulticast, delta, p, limit),
                    ProtocolKind::GeneralMulticast => adversary_run(&GeneralMulticast, delta, p, limit),
                    ProtocolKind::Btd => adversary_run(&Btd, delta, p, limit),
                    ProtocolKind::Flooding => adversary_run(&Flooding::default(), delta, p, limit),
                    ProtocolKind::IdRoundRobin => adversary_run(&IdRoundRobin, delta, p, limit),
                }
            }
        }
    };
}
scalar!(f64);
scalar!(f32);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for k in ProtocolKind::ALL {
            assert_eq!(k.name().parse::<ProtocolKind>().unwrap(), k);
        }
        assert!("gossip".parse::<ProtocolKind>().is_err());
    }
}
