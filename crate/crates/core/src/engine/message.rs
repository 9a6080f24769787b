use crate::network::{RumorId, StationId};
use std::fmt::Debug;

/// Protocol-owned control bits of a message.
pub trait Payload: Clone + Debug {
    /// Size in bits when ids take `id_bits` bits each.
    fn bits(&self, id_bits: u32) -> u32;
}

impl Payload for () {
    fn bits(&self, _: u32) -> u32 {
        0
    }
}

/// What a node hands to the engine when it transmits.
#[derive(Debug, Clone, PartialEq)]
pub struct Outgoing<P> {
    pub rumor: Option<RumorId>,
    pub payload: P,
}

impl<P> Outgoing<P> {
    pub fn control(payload: P) -> Self {
        Outgoing { rumor: None, payload }
    }

    pub fn with_rumor(rumor: Option<RumorId>, payload: P) -> Self {
        Outgoing { rumor, payload }
    }
}

/// A delivered message. `clock` is the sender's round counter, piggybacked so that woken nodes
/// adopt the common clock; its bits count against the control budget.
#[derive(Debug, Clone, PartialEq)]
pub struct Message<P> {
    pub sender: StationId,
    pub rumor: Option<RumorId>,
    pub clock: u64,
    pub payload: P,
}
