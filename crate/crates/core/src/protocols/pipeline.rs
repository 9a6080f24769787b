//! Box-structured multi-broadcast shared by the coordinate-aware protocols: sources elect one
//! root per pivotal box, rumors are gathered at the box leader, the backbone is built (or read off
//! the topology), and rumors are pushed along it in pipelined role slots.

use super::backbone::{dir_index, opposite, Role, ROLE_SLOTS};
use super::common::{Dilution, RumorQueue, Timeline};
use crate::engine::{Ctx, Message, Node, Outgoing, Payload, ProtocolError};
use crate::network::{RumorId, StationId};
use crate::scalar::Real;
use crate::selectors::SetFamily;
use crate::sinr::{dir_set, grid_box, GridCoord, Point, DIR_LEN};
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::sync::Arc;

/// Residue modulus for pivotal boxes: stations within range sit at box offsets in `[-2, 2]`.
const BOX_MOD: i64 = 10;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Ctl {
    /// Source announcement during collect, with the sender's box residues.
    Collect { res: (u8, u8) },
    /// Active station of a sub-grid cell during doubling, with the cell residues.
    Duel { res: (u16, u16), bits: u8 },
    /// Gather: one of the speaker's own rumors (attached).
    Rumor,
    Child { child: StationId },
    End { next: Option<StationId> },
    /// Discovery beacon with the sender's box residues.
    Hello { res: (u8, u8) },
    Wake,
    /// Directions `d` for which the sender has a neighbour in `C + d`.
    Mask { mask: u32 },
    Sender { dir: u8, receiver: StationId },
    Push,
}

impl Payload for Ctl {
    fn bits(&self, id_bits: u32) -> u32 {
        let tag = 4;
        tag + match self {
            Ctl::Collect { .. } | Ctl::Hello { .. } => 8,
            Ctl::Duel { bits, .. } => 2 * u32::from(*bits),
            Ctl::Rumor | Ctl::Wake | Ctl::Push => 0,
            Ctl::Child { .. } => id_bits,
            Ctl::End { .. } => id_bits + 1,
            Ctl::Mask { .. } => DIR_LEN as u32,
            Ctl::Sender { .. } => 5 + id_bits,
        }
    }
}

fn res10(c: GridCoord) -> (u8, u8) {
    let (a, b) = c.residues(BOX_MOD);
    (a as u8, b as u8)
}

/// Box of a station within range of `mine`, decoded from its residues.
fn decode_box(mine: GridCoord, res: (u8, u8)) -> GridCoord {
    let (a, b) = mine.residues(BOX_MOD);
    let f = |r: u8, m: i64| {
        let d = (i64::from(r) - m).rem_euclid(BOX_MOD);
        if d > BOX_MOD / 2 {
            d - BOX_MOD
        } else {
            d
        }
    };
    mine.shifted((f(res.0, a), f(res.1, b)))
}

/// One level of granularity doubling: cells of side `side`, each holding at most one active
/// station per quadrant.
#[derive(Debug, Clone)]
pub struct Level<T> {
    pub side: T,
    pub dil: Dilution,
    pub modulus_bits: u8,
}

#[derive(Debug, Clone)]
pub struct Plan<T> {
    pub dil: Dilution,
    pub collect: Option<Arc<SetFamily>>,
    /// Side of the base grid (at most one station per cell) and the doubling levels above it.
    pub base_side: T,
    pub levels: Vec<Level<T>>,
    pub gather_slots: u64,
    pub discovery_passes: u64,
    pub id_space: u32,
    pub epochs: u64,
    pub wake_slots: u64,
    pub mask_slots: u64,
    pub push_invocations: u64,
    pub timeline: Timeline,
}

impl<T: Real> Plan<T> {
    pub fn new(dil: Dilution, id_space: u32) -> Self {
        Plan {
            dil,
            collect: None,
            base_side: T::one(),
            levels: Vec::new(),
            gather_slots: 0,
            discovery_passes: 0,
            id_space,
            epochs: 0,
            wake_slots: 0,
            mask_slots: 0,
            push_invocations: 0,
            timeline: Timeline::default(),
        }
    }

    fn epoch_slots(&self) -> u64 {
        self.wake_slots + self.mask_slots + DIR_LEN as u64
    }

    fn level_len(l: &Level<T>) -> u64 {
        4 * l.dil.slot_len()
    }

    /// Lays the phases out on the clock; call after filling in the fields.
    pub fn finish(mut self) -> Self {
        let s = self.dil.slot_len();
        let mut tl = Timeline::default();
        tl.push("collect", self.collect.as_ref().map_or(0, |f| f.len() as u64));
        tl.push("double", self.levels.iter().map(Self::level_len).sum());
        tl.push("gather", self.gather_slots * s);
        tl.push("discover", self.discovery_passes * u64::from(self.id_space));
        tl.push("build", self.epochs * self.epoch_slots() * s);
        tl.push("push", self.push_invocations * ROLE_SLOTS as u64 * s);
        self.timeline = tl;
        self
    }

    pub fn total_rounds(&self) -> u64 {
        self.timeline.total()
    }
}

/// Initial knowledge a station brings into the pipeline.
#[derive(Debug, Clone)]
pub struct Setup<T> {
    pub id: StationId,
    pub pos: Point<T>,
    pub cell: GridCoord,
    pub n: usize,
    pub own: Vec<RumorId>,
    /// Neighbours with their pivotal boxes, when known up front.
    pub neighbors: Option<BTreeMap<StationId, GridCoord>>,
    /// Backbone roles, when computed from the full topology.
    pub roles: Option<BTreeSet<Role>>,
}

#[derive(Debug, Clone)]
pub struct PipelineNode<T> {
    plan: Arc<Plan<T>>,
    id: StationId,
    pos: Point<T>,
    cell: GridCoord,
    n: usize,
    own: Vec<RumorId>,
    rumors: RumorQueue,
    active: bool,
    heard: BTreeSet<StationId>,
    parent: Option<StationId>,
    children: Vec<StationId>,
    /// Elimination steps already settled: 0 before collect ends, then one per doubling level.
    settled: usize,
    queue: VecDeque<StationId>,
    gather_started: bool,
    speaker: Option<StationId>,
    script: Vec<(Ctl, Option<RumorId>)>,
    cursor: usize,
    neighbors: BTreeMap<StationId, GridCoord>,
    members: BTreeSet<StationId>,
    members_known: bool,
    built: bool,
    building: bool,
    epoch: Option<u64>,
    masks: BTreeMap<StationId, u32>,
    roles: BTreeSet<Role>,
    roles_noted: bool,
    now: u64,
}

impl<T: Real> PipelineNode<T> {
    pub fn new(plan: Arc<Plan<T>>, s: Setup<T>) -> Self {
        let mut rumors = RumorQueue::default();
        for &r in &s.own {
            rumors.insert(r);
        }
        let members_known = s.neighbors.is_some();
        let neighbors = s.neighbors.unwrap_or_default();
        let mut members: BTreeSet<StationId> = neighbors.iter().filter(|(_, c)| **c == s.cell).map(|(id, _)| *id).collect();
        members.insert(s.id);
        let built = s.roles.is_some();
        PipelineNode {
            plan,
            id: s.id,
            pos: s.pos,
            cell: s.cell,
            n: s.n,
            active: !s.own.is_empty(),
            own: s.own,
            rumors,
            heard: BTreeSet::new(),
            parent: None,
            children: Vec::new(),
            settled: 0,
            queue: VecDeque::new(),
            gather_started: false,
            speaker: None,
            script: Vec::new(),
            cursor: 0,
            neighbors,
            members,
            members_known,
            built,
            building: false,
            epoch: None,
            masks: BTreeMap::new(),
            roles: s.roles.unwrap_or_default(),
            roles_noted: false,
            now: 0,
        }
    }

    pub fn parent(&self) -> Option<StationId> {
        self.parent
    }

    pub fn children(&self) -> &[StationId] {
        &self.children
    }

    pub fn roles(&self) -> &BTreeSet<Role> {
        &self.roles
    }

    pub fn box_members(&self) -> &BTreeSet<StationId> {
        &self.members
    }

    pub fn neighbors(&self) -> &BTreeMap<StationId, GridCoord> {
        &self.neighbors
    }

    pub fn cell(&self) -> GridCoord {
        self.cell
    }

    pub fn rumors(&self) -> &[RumorId] {
        self.rumors.all()
    }

    /// Root of its box after elimination.
    pub fn is_root(&self) -> bool {
        !self.own.is_empty() && self.parent.is_none()
    }

    pub fn leader(&self) -> Option<StationId> {
        self.members_known.then(|| *self.members.first().expect("self is a member"))
    }

    fn level_cell(&self, side: T) -> GridCoord {
        grid_box(self.pos, side)
    }

    fn level_side(&self, l: usize) -> T {
        if l == 0 {
            self.plan.base_side
        } else {
            self.plan.levels[l - 1].side
        }
    }

    fn cell_res(&self, l: usize) -> (u16, u16) {
        let lev = &self.plan.levels[l];
        let (a, b) = self.level_cell(lev.side).residues(1i64 << lev.modulus_bits);
        (a as u16, b as u16)
    }

    /// Ends an elimination step: losers take the smallest station heard as parent, winners adopt
    /// everyone they heard as children.
    fn settle(&mut self) {
        if self.active {
            match self.heard.first() {
                Some(&m) if m < self.id => {
                    self.active = false;
                    self.parent = Some(m);
                }
                _ => self.children.extend(self.heard.iter().copied()),
            }
        }
        self.heard.clear();
        self.settled += 1;
    }

    fn steps_before(&self, phase: &str, off: u64) -> usize {
        let collect = usize::from(self.plan.collect.is_some());
        match phase {
            "collect" => 0,
            "double" => {
                let mut at = 0;
                for (i, l) in self.plan.levels.iter().enumerate() {
                    at += Plan::level_len(l);
                    if off < at {
                        return collect + i;
                    }
                }
                collect + self.plan.levels.len()
            }
            _ => collect + self.plan.levels.len(),
        }
    }

    fn start_gather(&mut self) {
        if !self.gather_started {
            self.gather_started = true;
            if self.is_root() {
                self.speaker = Some(self.id);
            }
        }
    }

    fn build_script(&mut self) {
        self.script.clear();
        self.cursor = 0;
        for &r in &self.own {
            self.script.push((Ctl::Rumor, Some(r)));
        }
        for &c in &self.children {
            self.script.push((Ctl::Child { child: c }, None));
            self.queue.push_back(c);
        }
        let next = self.queue.pop_front();
        self.script.push((Ctl::End { next }, None));
    }

    fn act_gather(&mut self, off: u64) -> Option<Outgoing<Ctl>> {
        self.start_gather();
        if self.speaker != Some(self.id) {
            return None;
        }
        self.plan.dil.owned_slot(self.cell, off)?;
        if self.script.is_empty() {
            self.build_script();
        }
        let (ctl, rumor) = self.script.get(self.cursor)?.clone();
        self.cursor += 1;
        if let Ctl::End { next } = ctl {
            self.speaker = next;
        }
        Some(Outgoing::with_rumor(rumor, ctl))
    }

    fn act_double(&mut self, mut off: u64) -> Option<Outgoing<Ctl>> {
        if !self.active {
            return None;
        }
        for (l, lev) in self.plan.levels.iter().enumerate() {
            let len = Plan::level_len(lev);
            if off >= len {
                off -= len;
                continue;
            }
            let q = off / lev.dil.slot_len();
            let my_q = self.level_cell(self.level_side(l)).quadrant() as u64;
            let cell = self.level_cell(lev.side);
            if q != my_q || lev.dil.owned_slot(cell, off).is_none() {
                return None;
            }
            return Some(Outgoing::control(Ctl::Duel { res: self.cell_res(l), bits: lev.modulus_bits }));
        }
        None
    }

    fn my_mask(&self) -> u32 {
        let mut m = 0;
        for c in self.neighbors.values() {
            if let Some(d) = dir_index(self.cell.offset_to(*c)) {
                m |= 1 << d;
            }
        }
        m
    }

    fn rank(&self) -> u64 {
        self.members.iter().position(|&m| m == self.id).expect("self is a member") as u64
    }

    fn finish_build(&mut self) {
        if self.building {
            self.built = true;
            self.building = false;
            if self.leader() == Some(self.id) {
                self.roles.insert(Role::Leader);
            }
        }
    }

    fn enter_epoch(&mut self, e: u64, at_start: bool) {
        if self.epoch == Some(e) {
            return;
        }
        self.finish_build();
        self.masks.clear();
        self.epoch = Some(e);
        if !self.built && (self.plan.wake_slots == 0 || at_start) {
            self.building = true;
        }
    }

    fn is_sender(&self, d: usize) -> bool {
        let bit = 1u32 << d;
        self.my_mask() & bit != 0 && !self.masks.iter().any(|(&u, &m)| u < self.id && m & bit != 0)
    }

    fn act_build(&mut self, off: u64) -> Option<Outgoing<Ctl>> {
        let s = self.plan.dil.slot_len();
        let epoch_len = self.plan.epoch_slots() * s;
        let w = off % epoch_len;
        if !self.building {
            return None;
        }
        let slot = self.plan.dil.owned_slot(self.cell, w)?;
        let (wake, mask) = (self.plan.wake_slots, self.plan.mask_slots);
        if slot < wake {
            (slot == self.rank()).then(|| Outgoing::control(Ctl::Wake))
        } else if slot < wake + mask {
            (slot - wake == self.rank()).then(|| Outgoing::control(Ctl::Mask { mask: self.my_mask() }))
        } else {
            let d = (slot - wake - mask) as usize;
            if !self.is_sender(d) {
                return None;
            }
            self.roles.insert(Role::Sender(d));
            let target = self.cell.shifted(dir_set()[d]);
            let receiver = self.neighbors.iter().filter(|(_, c)| **c == target).map(|(id, _)| *id).min()?;
            Some(Outgoing::control(Ctl::Sender { dir: d as u8, receiver }))
        }
    }

    fn act_push(&mut self, off: u64) -> Option<Outgoing<Ctl>> {
        let slot = self.plan.dil.owned_slot(self.cell, off)? as usize % ROLE_SLOTS;
        if !self.roles.iter().any(|r| r.slot() == slot) {
            return None;
        }
        let r = self.rumors.next_unsent()?;
        Some(Outgoing::with_rumor(Some(r), Ctl::Push))
    }

    /// Whether a gather message received at `off` came from this station's own box: the sub-round
    /// fixes the sender's box residues modulo `delta >= 5`, and senders in range are at most two
    /// boxes away.
    fn own_box_slot(&self, off: u64) -> bool {
        off % self.plan.dil.slot_len() == self.plan.dil.sub_round(self.cell)
    }

    /// Records the final roles once, as role slots, when the push phase is reached.
    fn note_roles(&mut self, ctx: &mut Ctx<'_, '_, T>, phase: &str) {
        if phase == "push" && !self.roles_noted {
            self.roles_noted = true;
            ctx.annotate("roles", self.roles.iter().map(|r| r.slot() as i64).collect());
        }
    }

    fn sync(&mut self, phase: &str, off: u64) {
        let target = self.steps_before(phase, off);
        while self.settled < target {
            self.settle();
        }
        match phase {
            "build" => {
                self.members_known = true;
                let epoch_len = self.plan.epoch_slots() * self.plan.dil.slot_len();
                self.enter_epoch(off / epoch_len, off % epoch_len == 0);
            }
            "push" => {
                self.members_known = true;
                self.finish_build();
            }
            _ => {}
        }
    }
}

impl<T: Real> Node<T> for PipelineNode<T> {
    type Payload = Ctl;

    fn act(&mut self, ctx: &mut Ctx<'_, '_, T>) -> Result<Option<Outgoing<Ctl>>, ProtocolError> {
        if self.n <= 1 || !ctx.is_awake() {
            return Ok(None);
        }
        let t = ctx.clock()?;
        self.now = self.now.max(t + 1);
        let Some((phase, off)) = self.plan.timeline.locate(t) else { return Ok(None) };
        self.sync(phase, off);
        self.note_roles(ctx, phase);
        let out = match phase {
            "collect" => {
                let fam = self.plan.collect.as_ref().expect("collect phase has a family");
                (self.active && fam.contains(off as usize, self.id)).then(|| Outgoing::control(Ctl::Collect { res: res10(self.cell) }))
            }
            "double" => self.act_double(off),
            "gather" => self.act_gather(off),
            "discover" => {
                let slot = off % u64::from(self.plan.id_space);
                (slot + 1 == u64::from(self.id.0)).then(|| Outgoing::control(Ctl::Hello { res: res10(self.cell) }))
            }
            "build" => self.act_build(off),
            "push" => self.act_push(off),
            _ => None,
        };
        Ok(out)
    }

    fn receive(&mut self, ctx: &mut Ctx<'_, '_, T>, msg: &Message<Ctl>) -> Result<(), ProtocolError> {
        let t = ctx.clock()?;
        self.now = self.now.max(t + 1);
        if let Some(r) = msg.rumor {
            self.rumors.insert(r);
        }
        let Some((phase, off)) = self.plan.timeline.locate(t) else { return Ok(()) };
        self.sync(phase, off);
        self.note_roles(ctx, phase);
        match &msg.payload {
            Ctl::Collect { res } => {
                if self.active && *res == res10(self.cell) {
                    self.heard.insert(msg.sender);
                }
            }
            Ctl::Duel { res, .. } => {
                let l = self.settled - usize::from(self.plan.collect.is_some());
                if self.active && l < self.plan.levels.len() && *res == self.cell_res(l) {
                    self.heard.insert(msg.sender);
                }
            }
            Ctl::Rumor => {}
            Ctl::Child { .. } | Ctl::End { .. } if !self.own_box_slot(off) => {}
            Ctl::Child { child } => self.queue.push_back(*child),
            Ctl::End { next } => {
                self.gather_started = true;
                self.queue.pop_front();
                self.speaker = *next;
            }
            Ctl::Hello { res } => {
                let c = decode_box(self.cell, *res);
                self.neighbors.insert(msg.sender, c);
                if c == self.cell {
                    self.members.insert(msg.sender);
                }
            }
            Ctl::Wake => {
                if self.neighbors.get(&msg.sender) == Some(&self.cell) && !self.built {
                    self.building = true;
                }
            }
            Ctl::Mask { mask } => {
                if self.neighbors.get(&msg.sender) == Some(&self.cell) {
                    self.masks.insert(msg.sender, *mask);
                }
            }
            Ctl::Sender { dir, receiver } => {
                if *receiver == self.id {
                    self.roles.insert(Role::Receiver(opposite(usize::from(*dir))));
                }
            }
            Ctl::Push => {}
        }
        Ok(())
    }

    fn is_done(&self) -> bool {
        self.n <= 1 || self.now >= self.plan.total_rounds()
    }
}
