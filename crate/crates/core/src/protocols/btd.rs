//! Spanning-tree multi-broadcast with neighbour ids only: token elimination, BTD construction
//! with every step emulated by a smallest-token exchange, Euler walks for counting and
//! synchronization, then rumor upload from leaves and stack-driven spreading by internal nodes.

use crate::engine::{Ctx, KnowledgeView, Message, Node, Outgoing, Payload, Protocol, ProtocolError, Setting};
use crate::network::{RumorId, StationId};
use crate::scalar::Real;
use crate::selectors::{shared_selector, shared_ssf, SetFamily};
use std::collections::{BTreeSet, VecDeque};
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Token,
    Check,
    Reply,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BtdMsg {
    Elect,
    /// First part of a smallest-token exchange: a traversal message of token `tau`.
    Part1 { kind: Kind, tau: StationId, dest: StationId },
    /// Second part: a destination repeats the token it accepts.
    Part2 { tau: StationId },
    /// Euler walk step. Walk 1 carries (visited count, internal count), walks 2 and 4 carry
    /// (step, internal count).
    Walk { walk: u8, dest: StationId, a: u32, b: u32 },
    /// Leaf rumor handed to its parent (rumor attached).
    Upload,
    /// Internal node spreading the top of its stack (rumor attached).
    Spread,
}

impl Payload for BtdMsg {
    fn bits(&self, id_bits: u32) -> u32 {
        let tag = 3;
        tag + match self {
            BtdMsg::Elect | BtdMsg::Upload | BtdMsg::Spread => 0,
            BtdMsg::Part1 { .. } => 2 + 2 * id_bits,
            BtdMsg::Part2 { .. } => id_bits,
            BtdMsg::Walk { .. } => 2 + id_bits + 2 * (id_bits + 1),
        }
    }
}

/// Common schedule: Stage 1 families and the smallest-token family.
#[derive(Debug, Clone)]
pub struct BtdPlan {
    pub cascade: Vec<Arc<SetFamily>>,
    pub sweep: Arc<SetFamily>,
    pub token_ssf: Arc<SetFamily>,
    pub n: usize,
    pub k: usize,
}

impl BtdPlan {
    pub fn new(n: usize, id_space: u32, k: usize) -> Result<Self, ProtocolError> {
        let mut cascade = Vec::new();
        let mut x = n as f64;
        loop {
            x *= 2.0 / 3.0;
            let xi = x.ceil() as u32;
            if xi < 2 {
                break;
            }
            let fam = shared_selector(id_space, xi, xi.div_ceil(2)).map_err(|e| ProtocolError::Contract(e.to_string()))?;
            cascade.push(fam);
        }
        let c = k.min(n).max(1) as u32;
        Ok(BtdPlan { cascade, sweep: shared_ssf(id_space, c), token_ssf: shared_ssf(id_space, c), n, k })
    }

    pub fn stage1_len(&self) -> u64 {
        self.cascade.iter().map(|f| f.len() as u64).sum::<u64>() + self.sweep.len() as u64
    }

    /// Rounds of one emulated traversal step.
    pub fn step_len(&self) -> u64 {
        2 * self.token_ssf.len() as u64
    }

    /// Spreading runs once the tree is known, each one slot per internal node.
    pub fn spread_runs(&self, internal: u64) -> u64 {
        2 * (internal + self.k as u64) + 2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    Elect,
    Emulate,
    Walk,
    Spread,
}

#[derive(Debug, Clone)]
pub struct BtdNode {
    plan: Arc<BtdPlan>,
    id: StationId,
    neighbors: Vec<StationId>,
    own: Vec<RumorId>,
    known: BTreeSet<RumorId>,
    mode: Mode,
    participating: bool,
    lost: bool,
    tau: Option<StationId>,
    visited: bool,
    parent: Option<StationId>,
    unmarked: BTreeSet<StationId>,
    child_todo: VecDeque<StationId>,
    children: Vec<StationId>,
    intent: Option<(Kind, StationId)>,
    pending: Option<(Kind, StationId, StationId)>,
    confirm: bool,
    step: Option<(u64, u8)>,
    outbox: VecDeque<(BtdMsg, Option<RumorId>)>,
    internal_rank: Option<u32>,
    internal_total: Option<u32>,
    traversal_end: Option<u64>,
    spread_start: Option<u64>,
    stack: Vec<RumorId>,
    now: u64,
}

impl BtdNode {
    pub fn parent(&self) -> Option<StationId> {
        self.parent
    }

    pub fn children(&self) -> &[StationId] {
        &self.children
    }

    pub fn token(&self) -> Option<StationId> {
        self.tau
    }

    pub fn is_internal(&self) -> bool {
        !self.children.is_empty()
    }

    /// Round at which tree construction and both counting walks are over.
    pub fn traversal_end(&self) -> Option<u64> {
        self.traversal_end
    }

    pub fn internal_total(&self) -> Option<u32> {
        self.internal_total
    }

    fn stage2_start(&self) -> u64 {
        self.plan.stage1_len()
    }

    fn reset(&mut self, tau: StationId) {
        self.tau = Some(tau);
        self.visited = false;
        self.parent = None;
        self.unmarked = self.neighbors.iter().copied().filter(|&v| v != tau).collect();
        self.child_todo.clear();
        self.children.clear();
        self.intent = None;
        self.pending = None;
        self.confirm = false;
    }

    /// Token rule: larger tokens are ignored, a smaller one replaces the current traversal.
    fn admit(&mut self, tau: StationId) -> bool {
        match self.tau {
            Some(t) if tau > t => false,
            Some(t) if tau == t => true,
            _ => {
                self.reset(tau);
                true
            }
        }
    }

    /// Next move of the current holder; `None` once the root has nothing left to do.
    fn next_intent(&mut self) -> Option<(Kind, StationId)> {
        if let Some(&z) = self.unmarked.iter().next() {
            self.unmarked.remove(&z);
            return Some((Kind::Check, z));
        }
        if let Some(c) = self.child_todo.pop_front() {
            return Some((Kind::Token, c));
        }
        self.parent.map(|p| (Kind::Token, p))
    }

    fn end_part1(&mut self) {
        self.intent = None;
        if self.pending.map_or(false, |(_, _, t)| Some(t) != self.tau) {
            self.pending = None;
        }
        self.confirm = self.pending.is_some();
    }

    fn end_step(&mut self, ctx: &mut Ctx<'_, '_, impl Real>, e: u64) -> Result<(), ProtocolError> {
        self.confirm = false;
        let Some((kind, from, tau)) = self.pending.take() else { return Ok(()) };
        if Some(tau) != self.tau {
            return Ok(());
        }
        ctx.annotate("st-hold", vec![e as i64, i64::from(tau.0)]);
        match kind {
            Kind::Check => {
                if self.visited || self.parent.is_some() {
                    return Ok(());
                }
                self.parent = Some(from);
                self.intent = Some((Kind::Reply, from));
                return Ok(());
            }
            Kind::Reply => {
                self.unmarked.remove(&from);
                self.children.push(from);
                self.child_todo.push_back(from);
            }
            Kind::Token => {
                if !self.visited {
                    self.visited = true;
                    if self.parent != Some(from) {
                        return Err(ProtocolError::Invariant(format!("{:?} got the token from {from:?}, not its marker", self.id)));
                    }
                }
            }
        }
        self.intent = self.next_intent();
        if self.intent.is_none() {
            // the root is done; Euler walks start with the next step
            let start = self.stage2_start() + (e + 1) * self.plan.step_len();
            ctx.annotate("btd-built", vec![start as i64]);
            self.begin_walk1(ctx);
        }
        Ok(())
    }

    fn begin_walk1(&mut self, ctx: &mut Ctx<'_, '_, impl Real>) {
        self.mode = Mode::Walk;
        let internal = u32::from(!self.children.is_empty());
        self.internal_rank = (internal == 1).then_some(0);
        self.seed_stack();
        ctx.annotate("btd-node", vec![-1, i64::from(internal)]);
        match self.children.first() {
            Some(&c) => self.outbox.push_back((BtdMsg::Walk { walk: 1, dest: c, a: 1, b: internal }, None)),
            None => self.finish_single(),
        }
    }

    fn finish_single(&mut self) {
        self.internal_total = Some(0);
        self.traversal_end = Some(self.now);
        self.spread_start = Some(self.now);
    }

    fn sync_step(&mut self, ctx: &mut Ctx<'_, '_, impl Real>, t: u64) -> Result<(), ProtocolError> {
        let s2 = self.stage2_start();
        if t < s2 || self.mode != Mode::Emulate {
            return Ok(());
        }
        let off = t - s2;
        let (e, part) = (off / self.plan.step_len(), if off % self.plan.step_len() < self.plan.token_ssf.len() as u64 { 1 } else { 2 });
        let Some(mut cur) = self.step else {
            self.step = Some((e, part));
            return Ok(());
        };
        while cur < (e, part) && self.mode == Mode::Emulate {
            if cur.1 == 1 {
                self.end_part1();
                cur.1 = 2;
            } else {
                self.end_step(ctx, cur.0)?;
                cur = (cur.0 + 1, 1);
            }
        }
        self.step = Some(cur);
        Ok(())
    }

    fn sync_stage1(&mut self, ctx: &mut Ctx<'_, '_, impl Real>, t: u64) {
        if self.mode == Mode::Elect && t >= self.stage2_start() {
            self.mode = Mode::Emulate;
            if self.participating && !self.lost {
                self.reset(self.id);
                self.visited = true;
                self.intent = self.next_intent();
                if self.intent.is_none() {
                    self.begin_walk1(ctx);
                }
            }
            self.participating = false;
        }
    }

    /// Stage 1 slot at `t`: (family, set index, whether it is the final sweep).
    fn stage1_slot(&self, t: u64) -> Option<(&SetFamily, usize, bool)> {
        let mut at = t as usize;
        for f in &self.plan.cascade {
            if at < f.len() {
                return Some((f, at, false));
            }
            at -= f.len();
        }
        (at < self.plan.sweep.len()).then(|| (&*self.plan.sweep, at, true))
    }

    fn on_walk(&mut self, ctx: &mut Ctx<'_, '_, impl Real>, from: StationId, walk: u8, a: u32, b: u32, t: u64) -> Result<(), ProtocolError> {
        self.mode = Mode::Walk;
        let n = self.plan.n as u32;
        let down = Some(from) == self.parent;
        let next = if down {
            self.children.first().copied().or(self.parent)
        } else {
            let i = self.children.iter().position(|&c| c == from).ok_or_else(|| {
                ProtocolError::Invariant(format!("walk reached {:?} from non-child {from:?}", self.id))
            })?;
            self.children.get(i + 1).copied().or(self.parent)
        };
        let (mut a2, mut b2) = (a, b);
        match walk {
            1 if down => {
                a2 = a + 1;
                if self.is_internal() {
                    self.internal_rank = Some(b);
                    b2 = b + 1;
                    self.seed_stack();
                }
                ctx.annotate("btd-node", vec![i64::from(from.0), i64::from(self.is_internal())]);
            }
            2 | 4 => {
                a2 = a + 1;
                self.internal_total = Some(b);
                let end = t + u64::from(2 * n - 1 - a);
                if walk == 2 {
                    self.traversal_end = Some(end);
                    if down {
                        ctx.annotate("btd-sync", vec![end as i64]);
                    }
                } else {
                    self.spread_start = Some(end);
                }
            }
            3 if down && !self.is_internal() => {
                for &r in &self.own {
                    self.outbox.push_back((BtdMsg::Upload, Some(r)));
                }
            }
            _ => {}
        }
        match next {
            Some(dest) => self.outbox.push_back((BtdMsg::Walk { walk, dest, a: a2, b: b2 }, None)),
            None => self.root_walk_done(ctx, walk, a, b, t)?,
        }
        Ok(())
    }

    fn root_walk_done(&mut self, ctx: &mut Ctx<'_, '_, impl Real>, walk: u8, a: u32, b: u32, t: u64) -> Result<(), ProtocolError> {
        let n = self.plan.n as u32;
        let first = *self.children.first().expect("a walk returned, so the root has children");
        match walk {
            1 => {
                ctx.annotate("btd-walk", vec![1, i64::from(a)]);
                if a != n {
                    return Err(ProtocolError::Invariant(format!("counting walk found {a} stations, expected {n}")));
                }
                self.internal_total = Some(b);
                self.outbox.push_back((BtdMsg::Walk { walk: 2, dest: first, a: 1, b }, None));
                self.traversal_end = Some(t + u64::from(2 * n - 1));
                ctx.annotate("btd-sync", vec![(t + u64::from(2 * n - 1)) as i64]);
            }
            2 => ctx.annotate("btd-walk", vec![2, i64::from(a)]),
            3 => {
                let i = self.internal_total.expect("walk 2 carried the internal count");
                self.outbox.push_back((BtdMsg::Walk { walk: 4, dest: first, a: 1, b: i }, None));
                self.spread_start = Some(t + u64::from(2 * n - 1));
            }
            _ => {}
        }
        Ok(())
    }

    fn spread_end(&self) -> Option<u64> {
        let i = u64::from(self.internal_total?);
        Some(self.spread_start? + self.plan.spread_runs(i) * i)
    }

    /// Internal nodes start spreading with their own rumors, oldest at the bottom.
    fn seed_stack(&mut self) {
        self.stack = self.own.clone();
        self.stack.extend(self.known.iter().filter(|r| !self.own.contains(r)));
    }

    fn learn(&mut self, r: RumorId) {
        if self.known.insert(r) && self.is_internal() {
            self.stack.push(r);
        }
    }
}

impl<T: Real> Node<T> for BtdNode {
    type Payload = BtdMsg;

    fn act(&mut self, ctx: &mut Ctx<'_, '_, T>) -> Result<Option<Outgoing<BtdMsg>>, ProtocolError> {
        if self.plan.n <= 1 || !ctx.is_awake() {
            return Ok(None);
        }
        let t = ctx.clock()?;
        self.now = self.now.max(t + 1);
        self.sync_stage1(ctx, t);
        self.sync_step(ctx, t)?;
        if self.traversal_end == Some(t) && self.parent.is_none() && self.is_internal() {
            // the root opens the upload walk
            self.outbox.push_back((BtdMsg::Walk { walk: 3, dest: self.children[0], a: 0, b: 0 }, None));
        }
        if let Some((msg, rumor)) = self.outbox.pop_front() {
            return Ok(Some(Outgoing::with_rumor(rumor, msg)));
        }
        match self.mode {
            Mode::Elect => {
                let Some((fam, idx, _)) = self.stage1_slot(t) else { return Ok(None) };
                Ok((self.participating && fam.contains(idx, self.id)).then(|| Outgoing::control(BtdMsg::Elect)))
            }
            Mode::Emulate => {
                let off = t - self.stage2_start();
                let len = self.plan.token_ssf.len() as u64;
                let idx = (off % self.plan.step_len()) as usize;
                if idx < len as usize {
                    let Some((kind, dest)) = self.intent else { return Ok(None) };
                    if !self.plan.token_ssf.contains(idx, self.id) {
                        return Ok(None);
                    }
                    let tau = self.tau.expect("a holder has a token");
                    if self.plan.token_ssf.sets()[..idx].iter().all(|s| s.binary_search(&self.id.0).is_err()) {
                        ctx.annotate("st-send", vec![(off / self.plan.step_len()) as i64, i64::from(tau.0), i64::from(dest.0)]);
                    }
                    Ok(Some(Outgoing::control(BtdMsg::Part1 { kind, tau, dest })))
                } else if self.confirm && self.plan.token_ssf.contains(idx - len as usize, self.id) {
                    let (_, _, tau) = self.pending.expect("confirming a pending message");
                    Ok(Some(Outgoing::control(BtdMsg::Part2 { tau })))
                } else {
                    Ok(None)
                }
            }
            Mode::Walk | Mode::Spread => {
                let (Some(start), Some(i)) = (self.spread_start, self.internal_total) else { return Ok(None) };
                if t < start || i == 0 {
                    return Ok(None);
                }
                self.mode = Mode::Spread;
                let (Some(rank), true) = (self.internal_rank, t < self.spread_end().unwrap_or(0)) else { return Ok(None) };
                if (t - start) % u64::from(i) != u64::from(rank) {
                    return Ok(None);
                }
                Ok(self.stack.pop().map(|r| Outgoing::with_rumor(Some(r), BtdMsg::Spread)))
            }
        }
    }

    fn receive(&mut self, ctx: &mut Ctx<'_, '_, T>, msg: &Message<BtdMsg>) -> Result<(), ProtocolError> {
        let t = ctx.clock()?;
        self.now = self.now.max(t + 1);
        self.sync_stage1(ctx, t);
        self.sync_step(ctx, t)?;
        if let Some(r) = msg.rumor {
            self.learn(r);
        }
        match msg.payload {
            BtdMsg::Elect => {
                if self.participating && msg.sender < self.id {
                    match self.stage1_slot(t) {
                        Some((_, _, true)) => self.lost = true,
                        _ => self.participating = false,
                    }
                }
            }
            BtdMsg::Part1 { kind, tau, dest } => {
                if self.mode != Mode::Emulate || !self.admit(tau) {
                    return Ok(());
                }
                if dest == self.id {
                    if self.pending.map_or(true, |(_, _, t0)| tau < t0) {
                        self.pending = Some((kind, msg.sender, tau));
                    }
                } else {
                    match kind {
                        Kind::Check | Kind::Token => self.unmarked.remove(&dest),
                        Kind::Reply => self.unmarked.remove(&msg.sender),
                    };
                }
            }
            BtdMsg::Part2 { tau } => {
                if self.mode == Mode::Emulate && self.tau.map_or(true, |t0| tau < t0) {
                    self.reset(tau);
                }
            }
            BtdMsg::Walk { walk, dest, a, b } => {
                if dest == self.id {
                    self.on_walk(ctx, msg.sender, walk, a, b, t)?;
                }
            }
            BtdMsg::Upload | BtdMsg::Spread => {}
        }
        Ok(())
    }

    fn is_done(&self) -> bool {
        self.plan.n <= 1 || self.spread_end().map_or(false, |e| self.now >= e)
    }
}

/// Multi-broadcast over a BTD spanning tree, knowing neighbour ids only.
#[derive(Debug, Clone, Default)]
pub struct Btd;

impl<T: Real> Protocol<T> for Btd {
    type Node = BtdNode;

    fn name(&self) -> &'static str {
        "btd"
    }

    fn setting(&self) -> Setting {
        Setting::NeighborIdsOnly
    }

    fn build(&self, view: &KnowledgeView<'_, T>, rumors: &BTreeSet<RumorId>) -> Result<BtdNode, ProtocolError> {
        let plan = Arc::new(BtdPlan::new(view.n(), view.id_space(), view.k())?);
        let mut neighbors = view.neighbor_ids()?;
        neighbors.sort();
        let own: Vec<RumorId> = rumors.iter().copied().collect();
        Ok(BtdNode {
            plan,
            id: view.id(),
            neighbors,
            known: own.iter().copied().collect(),
            participating: !own.is_empty(),
            own,
            mode: Mode::Elect,
            lost: false,
            tau: None,
            visited: false,
            parent: None,
            unmarked: BTreeSet::new(),
            child_todo: VecDeque::new(),
            children: Vec::new(),
            intent: None,
            pending: None,
            confirm: false,
            step: None,
            outbox: VecDeque::new(),
            internal_rank: None,
            internal_total: None,
            traversal_end: None,
            spread_start: None,
            stack: Vec::new(),
            now: 0,
        })
    }
}
