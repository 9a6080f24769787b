use super::knowledge::{KnowledgeView, World};
use super::message::{Message, Payload};
use super::node::{Annotation, Ctx, Node, Protocol, ProtocolError};
use super::trace::{Delivery, RoundTrace, Trace};
use crate::network::{NetworkInstance, RumorId, StationId, TransmissionSet};
use crate::scalar::Real;
use crate::selectors::ceil_log2;
use crate::sinr::{communication_graph, metrics_of, receives, SinrParams};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

pub const DEFAULT_C_MSG: u32 = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub limit: u64,
    /// Control budget is `c_msg · ⌈log₂ N⌉` bits per message, piggybacked clock included.
    pub c_msg: u32,
    pub assume_global_clock: bool,
    pub record_trace: bool,
    /// Declared bound on the number of rumors; defaults to the number present.
    pub declared_k: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { limit: 1_000_000, c_msg: DEFAULT_C_MSG, assume_global_clock: false, record_trace: true, declared_k: None }
    }
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("no sources given")]
    NoSources,
    #[error("source {0} is not a station")]
    UnknownSource(StationId),
    #[error("{present} distinct rumors exceed the declared k = {declared}")]
    TooManyRumors { present: usize, declared: usize },
    #[error("beta < 1 is unsupported: several senders could reach one receiver")]
    BetaBelowOne,
    #[error("round {round}: node {node} sent {bits} control bits, budget is {budget}")]
    OverBudget { round: u64, node: StationId, bits: u32, budget: u32 },
    #[error("round {round}: sleeping node {node} tried to transmit")]
    SleepingTransmitter { round: u64, node: StationId },
    #[error("round {round}: node {node} sent rumor {rumor:?} it does not hold")]
    UnknownRumor { round: u64, node: StationId, rumor: RumorId },
    #[error("round {round}: receiver {receiver} decoded several senders")]
    MultipleSuccesses { round: u64, receiver: StationId },
    #[error("round {round}: node {node}: {err}")]
    Protocol { round: u64, node: StationId, err: ProtocolError },
}

impl EngineError {
    /// Protocol-reported invariant violations and engine model violations, as opposed to bad input.
    pub fn is_invariant_violation(&self) -> bool {
        !matches!(
            self,
            EngineError::NoSources | EngineError::UnknownSource(_) | EngineError::TooManyRumors { .. } | EngineError::BetaBelowOne
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Coverage {
    pub nodes: usize,
    pub awake: usize,
    pub informed: usize,
    pub done: usize,
    pub rumors: usize,
}

#[derive(Debug)]
pub struct RunOutcome<Nd> {
    /// Rounds executed until every node reported done, or the limit.
    pub rounds: u64,
    /// First round count after which every node held every rumor.
    pub completion_round: Option<u64>,
    pub completed: bool,
    pub terminated: bool,
    pub coverage: Coverage,
    pub trace: Trace,
    pub notes: Vec<Annotation>,
    pub nodes: Vec<(StationId, Nd)>,
    pub known: Vec<BTreeSet<RumorId>>,
    pub wake_round: Vec<Option<u64>>,
}

/// Step-wise execution of one protocol on one network.
pub struct Simulation<'w, T: Real, P: Protocol<T>> {
    world: World<'w, T>,
    setting: super::knowledge::Setting,
    cfg: RunConfig,
    nodes: Vec<P::Node>,
    clock: Vec<Option<u64>>,
    wake_round: Vec<Option<u64>>,
    known: Vec<BTreeSet<RumorId>>,
    all_rumors: BTreeSet<RumorId>,
    round: u64,
    completion_round: Option<u64>,
    budget: u32,
    id_bits: u32,
    clock_bits: u32,
    trace: Trace,
    notes: Vec<Annotation>,
}

impl<'w, T: Real, P: Protocol<T>> Simulation<'w, T, P> {
    pub fn new(
        net: &'w NetworkInstance<T>,
        p: &'w SinrParams<T>,
        protocol: &P,
        sources: &BTreeMap<StationId, BTreeSet<RumorId>>,
        cfg: RunConfig,
    ) -> Result<Self, EngineError> {
        if p.beta < T::one() {
            return Err(EngineError::BetaBelowOne);
        }
        if sources.is_empty() {
            return Err(EngineError::NoSources);
        }
        let all_rumors: BTreeSet<RumorId> = sources.values().flatten().copied().collect();
        let k = cfg.declared_k.unwrap_or(all_rumors.len());
        if all_rumors.len() > k {
            return Err(EngineError::TooManyRumors { present: all_rumors.len(), declared: k });
        }
        let graph = communication_graph(net, p);
        let metrics = metrics_of(net, p, &graph);
        let world = World { net, params: p, graph, metrics, k };
        let n = net.len();
        let mut known = vec![BTreeSet::new(); n];
        let mut clock = vec![None; n];
        let mut wake_round = vec![None; n];
        for (&s, r) in sources {
            let i = net.index_of(s).ok_or(EngineError::UnknownSource(s))?;
            known[i] = r.clone();
            clock[i] = Some(0);
            wake_round[i] = Some(0);
        }
        let setting = protocol.setting();
        let mut nodes = Vec::with_capacity(n);
        for i in 0..n {
            let view = KnowledgeView::new(setting, i, &world);
            let node = protocol
                .build(&view, &known[i])
                .map_err(|err| EngineError::Protocol { round: 0, node: view.id(), err })?;
            nodes.push(node);
        }
        let id_bits = ceil_log2(net.id_space()) as u32;
        let clock_bits = 64 - cfg.limit.leading_zeros();
        let budget = cfg.c_msg * id_bits;
        let mut sim = Simulation {
            world,
            setting,
            cfg,
            nodes,
            clock,
            wake_round,
            known,
            all_rumors,
            round: 0,
            completion_round: None,
            budget,
            id_bits,
            clock_bits,
            trace: Trace::default(),
            notes: Vec::new(),
        };
        if sim.all_informed() {
            sim.completion_round = Some(0);
        }
        Ok(sim)
    }

    pub fn round(&self) -> u64 {
        self.round
    }

    pub fn nodes(&self) -> &[P::Node] {
        &self.nodes
    }

    pub fn known(&self) -> &[BTreeSet<RumorId>] {
        &self.known
    }

    pub fn all_informed(&self) -> bool {
        self.known.iter().all(|k| k.len() == self.all_rumors.len())
    }

    pub fn all_done(&self) -> bool {
        self.nodes.iter().all(Node::is_done)
    }

    pub fn finished(&self) -> bool {
        self.all_done() || self.round >= self.cfg.limit
    }

    /// Executes one round and returns its record (also for silent rounds).
    pub fn step(&mut self) -> Result<RoundTrace, EngineError> {
        let round = self.round;
        let world: &World<'_, T> = &self.world;
        let st = world.net.stations();
        let mut outgoing: Vec<(usize, Message<<P::Node as Node<T>>::Payload>)> = Vec::new();
        for i in 0..self.nodes.len() {
            let mut ctx = Ctx {
                view: KnowledgeView::new(self.setting, i, world),
                clock: self.clock[i],
                engine_round: round,
                assume_global_clock: self.cfg.assume_global_clock,
                notes: &mut self.notes,
            };
            let id = st[i].id;
            let out = self.nodes[i]
                .act(&mut ctx)
                .map_err(|err| EngineError::Protocol { round, node: id, err })?;
            let Some(out) = out else { continue };
            let Some(c) = self.clock[i] else {
                return Err(EngineError::SleepingTransmitter { round, node: id });
            };
            let bits = out.payload.bits(self.id_bits) + self.clock_bits;
            if bits > self.budget {
                return Err(EngineError::OverBudget { round, node: id, bits, budget: self.budget });
            }
            if let Some(r) = out.rumor {
                if !self.known[i].contains(&r) {
                    return Err(EngineError::UnknownRumor { round, node: id, rumor: r });
                }
            }
            outgoing.push((i, Message { sender: id, rumor: out.rumor, clock: c, payload: out.payload }));
        }
        let txset: TransmissionSet = outgoing.iter().map(|(i, _)| st[*i].id).collect();
        let mut deliveries = Vec::new();
        let mut wakeups = Vec::new();
        if !outgoing.is_empty() {
            let p = world.params;
            for v in 0..st.len() {
                if txset.contains(&st[v].id) {
                    continue;
                }
                // with beta >= 1 only a strongest sender can clear the SINR threshold
                let mut best = T::infinity();
                let mut cands: Vec<usize> = Vec::new();
                for (k, (i, _)) in outgoing.iter().enumerate() {
                    let d = st[*i].pos.dist(&st[v].pos);
                    if d < best {
                        best = d;
                        cands.clear();
                    }
                    if d == best {
                        cands.push(k);
                    }
                }
                if p.signal_at(best) < p.sensitivity() {
                    continue;
                }
                let hits: Vec<usize> =
                    cands.into_iter().filter(|&k| receives(outgoing[k].1.sender, st[v].id, &txset, world.net, p)).collect();
                if hits.len() > 1 {
                    return Err(EngineError::MultipleSuccesses { round, receiver: st[v].id });
                }
                let Some(&k) = hits.first() else { continue };
                let msg = &outgoing[k].1;
                if self.clock[v].is_none() {
                    self.clock[v] = Some(msg.clock);
                    self.wake_round[v] = Some(round);
                    wakeups.push(st[v].id);
                }
                if let Some(r) = msg.rumor {
                    self.known[v].insert(r);
                }
                let mut ctx = Ctx {
                    view: KnowledgeView::new(self.setting, v, world),
                    clock: self.clock[v],
                    engine_round: round,
                    assume_global_clock: self.cfg.assume_global_clock,
                    notes: &mut self.notes,
                };
                self.nodes[v]
                    .receive(&mut ctx, msg)
                    .map_err(|err| EngineError::Protocol { round, node: st[v].id, err })?;
                deliveries.push(Delivery {
                    sender: msg.sender,
                    receiver: st[v].id,
                    rumor: msg.rumor,
                    bits: msg.payload.bits(self.id_bits) + self.clock_bits,
                });
            }
        }
        for c in self.clock.iter_mut().flatten() {
            *c += 1;
        }
        self.round += 1;
        if self.completion_round.is_none() && self.all_informed() {
            self.completion_round = Some(self.round);
        }
        let rec = RoundTrace { round, transmitters: txset, deliveries, wakeups };
        if self.cfg.record_trace && !rec.transmitters.is_empty() {
            self.trace.rounds.push(rec.clone());
        }
        Ok(rec)
    }

    pub fn coverage(&self) -> Coverage {
        Coverage {
            nodes: self.nodes.len(),
            awake: self.clock.iter().filter(|c| c.is_some()).count(),
            informed: self.known.iter().filter(|k| k.len() == self.all_rumors.len()).count(),
            done: self.nodes.iter().filter(|n| n.is_done()).count(),
            rumors: self.all_rumors.len(),
        }
    }

    pub fn into_outcome(self) -> RunOutcome<P::Node> {
        let coverage = self.coverage();
        let terminated = self.all_done();
        let ids: Vec<StationId> = self.world.net.ids().collect();
        RunOutcome {
            rounds: self.round,
            completion_round: self.completion_round,
            completed: terminated && self.all_informed(),
            terminated,
            coverage,
            trace: self.trace,
            notes: self.notes,
            nodes: ids.into_iter().zip(self.nodes).collect(),
            known: self.known,
            wake_round: self.wake_round,
        }
    }
}

/// Runs until every node is done or `cfg.limit` rounds have passed.
pub fn run_protocol<T: Real, P: Protocol<T>>(
    net: &NetworkInstance<T>,
    p: &SinrParams<T>,
    protocol: &P,
    sources: &BTreeMap<StationId, BTreeSet<RumorId>>,
    cfg: RunConfig,
) -> Result<RunOutcome<P::Node>, EngineError> {
    let mut sim = Simulation::new(net, p, protocol, sources, cfg)?;
    while !sim.finished() {
        sim.step()?;
    }
    Ok(sim.into_outcome())
}
