//! Reference protocols without coordination: naive flooding and id-slot round robin.

use crate::engine::{Ctx, KnowledgeView, Message, Node, Outgoing, Protocol, ProtocolError, Setting};
use crate::network::RumorId;
use crate::scalar::Real;
use std::collections::BTreeSet;

/// Every awake node transmits every round, cycling through the rumors it holds.
#[derive(Debug, Clone, Default)]
pub struct Flooding {
    /// Nodes stop after this many rounds of their clock; `None` floods forever.
    pub budget: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct FloodNode {
    rumors: Vec<RumorId>,
    next: usize,
    budget: Option<u64>,
    clock: Option<u64>,
}

impl<T: Real> Protocol<T> for Flooding {
    type Node = FloodNode;

    fn name(&self) -> &'static str {
        "flooding"
    }

    fn setting(&self) -> Setting {
        Setting::NeighborIdsOnly
    }

    fn build(&self, _: &KnowledgeView<'_, T>, rumors: &BTreeSet<RumorId>) -> Result<FloodNode, ProtocolError> {
        Ok(FloodNode { rumors: rumors.iter().copied().collect(), next: 0, budget: self.budget, clock: None })
    }
}

impl<T: Real> Node<T> for FloodNode {
    type Payload = ();

    fn act(&mut self, ctx: &mut Ctx<'_, '_, T>) -> Result<Option<Outgoing<()>>, ProtocolError> {
        if !ctx.is_awake() {
            return Ok(None);
        }
        let t = ctx.clock()?;
        self.clock = Some(t + 1);
        if self.budget.map_or(false, |b| t >= b) {
            return Ok(None);
        }
        let rumor = (!self.rumors.is_empty()).then(|| {
            self.next = (self.next + 1) % self.rumors.len();
            self.rumors[self.next]
        });
        Ok(Some(Outgoing::with_rumor(rumor, ())))
    }

    fn receive(&mut self, ctx: &mut Ctx<'_, '_, T>, msg: &Message<()>) -> Result<(), ProtocolError> {
        self.clock.get_or_insert(ctx.clock()? + 1);
        if let Some(r) = msg.rumor {
            if !self.rumors.contains(&r) {
                self.rumors.push(r);
            }
        }
        Ok(())
    }

    fn is_done(&self) -> bool {
        matches!((self.budget, self.clock), (Some(b), Some(c)) if c >= b)
    }
}

/// Time division over the id space: in round `t` only the node with id `(t mod N) + 1` may
/// transmit, forwarding the oldest rumor it has not yet sent. Runs `(D + k + 1)` sweeps.
#[derive(Debug, Clone, Default)]
pub struct IdRoundRobin;

#[derive(Debug, Clone)]
pub struct RoundRobinNode {
    id: u32,
    n_ids: u64,
    queue: Vec<RumorId>,
    sent: usize,
    stop_at: u64,
    clock: Option<u64>,
}

impl<T: Real> Protocol<T> for IdRoundRobin {
    type Node = RoundRobinNode;

    fn name(&self) -> &'static str {
        "id-round-robin"
    }

    fn setting(&self) -> Setting {
        Setting::NeighborIdsOnly
    }

    fn build(&self, view: &KnowledgeView<'_, T>, rumors: &BTreeSet<RumorId>) -> Result<RoundRobinNode, ProtocolError> {
        let n_ids = view.id_space() as u64;
        let sweeps = (view.diameter()? + view.k() + 1) as u64;
        Ok(RoundRobinNode {
            id: view.id().0,
            n_ids,
            queue: rumors.iter().copied().collect(),
            sent: 0,
            stop_at: sweeps * n_ids,
            clock: None,
        })
    }
}

impl<T: Real> Node<T> for RoundRobinNode {
    type Payload = ();

    fn act(&mut self, ctx: &mut Ctx<'_, '_, T>) -> Result<Option<Outgoing<()>>, ProtocolError> {
        if !ctx.is_awake() {
            return Ok(None);
        }
        let t = ctx.clock()?;
        self.clock = Some(t + 1);
        if t >= self.stop_at || t % self.n_ids + 1 != self.id as u64 {
            return Ok(None);
        }
        let rumor = self.queue.get(self.sent).copied();
        if rumor.is_some() {
            self.sent += 1;
        }
        Ok(Some(Outgoing::with_rumor(rumor, ())))
    }

    fn receive(&mut self, ctx: &mut Ctx<'_, '_, T>, msg: &Message<()>) -> Result<(), ProtocolError> {
        self.clock.get_or_insert(ctx.clock()? + 1);
        if let Some(r) = msg.rumor {
            if !self.queue.contains(&r) {
                self.queue.push(r);
            }
        }
        Ok(())
    }

    fn is_done(&self) -> bool {
        self.clock.map_or(false, |c| c >= self.stop_at)
    }
}
