use super::knowledge::{KnowledgeError, KnowledgeView, Setting};
use super::message::{Message, Outgoing, Payload};
use crate::network::{RumorId, StationId};
use crate::scalar::Real;
use serde::Serialize;
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProtocolError {
    #[error(transparent)]
    Knowledge(#[from] KnowledgeError),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
}

/// Free-form record a node attaches to a round, used by audits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Annotation {
    pub round: u64,
    pub node: StationId,
    pub tag: &'static str,
    pub data: Vec<i64>,
}

/// Per-round handle given to a node.
pub struct Ctx<'a, 'w, T: Real> {
    pub(crate) view: KnowledgeView<'w, T>,
    pub(crate) clock: Option<u64>,
    pub(crate) engine_round: u64,
    pub(crate) assume_global_clock: bool,
    pub(crate) notes: &'a mut Vec<Annotation>,
}

impl<'a, 'w, T: Real> Ctx<'a, 'w, T> {
    pub fn id(&self) -> StationId {
        self.view.id()
    }

    pub fn view(&self) -> &KnowledgeView<'w, T> {
        &self.view
    }

    pub fn is_awake(&self) -> bool {
        self.clock.is_some()
    }

    /// The piggybacked common clock: sources start at 0, woken nodes adopt the sender's reading.
    pub fn clock(&self) -> Result<u64, KnowledgeError> {
        self.clock.ok_or(KnowledgeError::Asleep)
    }

    /// Direct read of the engine round, allowed only under `assume_global_clock`.
    pub fn global_round(&self) -> Result<u64, KnowledgeError> {
        if self.assume_global_clock {
            Ok(self.engine_round)
        } else {
            Err(KnowledgeError::GlobalClock)
        }
    }

    pub fn annotate(&mut self, tag: &'static str, data: Vec<i64>) {
        self.notes.push(Annotation { round: self.engine_round, node: self.view.id(), tag, data });
    }
}

/// Per-node state machine. `act` runs for every node every round; a sleeping node must stay silent.
pub trait Node<T: Real> {
    type Payload: Payload;

    fn act(&mut self, ctx: &mut Ctx<'_, '_, T>) -> Result<Option<Outgoing<Self::Payload>>, ProtocolError>;

    fn receive(&mut self, ctx: &mut Ctx<'_, '_, T>, msg: &Message<Self::Payload>) -> Result<(), ProtocolError>;

    fn is_done(&self) -> bool;
}

/// Builds one node per station from what its setting allows it to know.
pub trait Protocol<T: Real> {
    type Node: Node<T>;

    fn name(&self) -> &'static str;

    fn setting(&self) -> Setting;

    fn build(&self, view: &KnowledgeView<'_, T>, rumors: &BTreeSet<RumorId>) -> Result<Self::Node, ProtocolError>;
}
