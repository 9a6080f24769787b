//! The per-box backbone: box leaders, directional senders and their receivers.

use crate::network::{NetworkInstance, StationId};
use crate::scalar::Real;
use crate::sinr::{dir_set, pivotal_box, CommGraph, GridCoord, SinrParams, DIR_LEN};
use std::collections::{BTreeMap, BTreeSet, VecDeque};

/// Push slots per invocation: leader, then one per sender direction, then one per receiver direction.
pub const ROLE_SLOTS: usize = 1 + 2 * DIR_LEN;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    Leader,
    Sender(usize),
    Receiver(usize),
}

impl Role {
    pub fn slot(self) -> usize {
        match self {
            Role::Leader => 0,
            Role::Sender(d) => 1 + d,
            Role::Receiver(d) => 1 + DIR_LEN + d,
        }
    }

    pub fn from_slot(slot: usize) -> Option<Role> {
        match slot {
            0 => Some(Role::Leader),
            s if s <= DIR_LEN => Some(Role::Sender(s - 1)),
            s if s < ROLE_SLOTS => Some(Role::Receiver(s - 1 - DIR_LEN)),
            _ => None,
        }
    }
}

/// Index in `dir_set()` of the reversed offset.
pub fn opposite(d: usize) -> usize {
    let dirs = dir_set();
    let (a, b) = dirs[d];
    dirs.iter().position(|&x| x == (-a, -b)).expect("direction set is symmetric")
}

pub fn dir_index(off: (i64, i64)) -> Option<usize> {
    dir_set().iter().position(|&x| x == off)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoxRoles {
    pub leader: StationId,
    pub senders: [Option<StationId>; DIR_LEN],
    pub receivers: [Option<StationId>; DIR_LEN],
}

impl BoxRoles {
    pub fn new(leader: StationId) -> Self {
        Self { leader, senders: [None; DIR_LEN], receivers: [None; DIR_LEN] }
    }

    pub fn members(&self) -> BTreeSet<StationId> {
        let mut s: BTreeSet<_> = self.senders.iter().chain(&self.receivers).flatten().copied().collect();
        s.insert(self.leader);
        s
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Backbone {
    pub boxes: BTreeMap<GridCoord, BoxRoles>,
}

impl Backbone {
    pub fn members(&self) -> BTreeSet<StationId> {
        self.boxes.values().flat_map(|b| b.members()).collect()
    }

    pub fn roles_of(&self, id: StationId) -> Vec<Role> {
        let mut out = Vec::new();
        for b in self.boxes.values() {
            if b.leader == id {
                out.push(Role::Leader);
            }
            for d in 0..DIR_LEN {
                if b.senders[d] == Some(id) {
                    out.push(Role::Sender(d));
                }
                if b.receivers[d] == Some(id) {
                    out.push(Role::Receiver(d));
                }
            }
        }
        out
    }

    /// Largest hop distance between backbone members inside the induced subgraph.
    pub fn diameter(&self, g: &CommGraph) -> Option<usize> {
        let members = self.members();
        let idx: Vec<usize> = (0..g.len()).filter(|&i| members.contains(&g.id(i))).collect();
        let inside: BTreeSet<usize> = idx.iter().copied().collect();
        let mut worst = 0;
        for &s in &idx {
            let mut dist = vec![usize::MAX; g.len()];
            dist[s] = 0;
            let mut q = VecDeque::from([s]);
            while let Some(u) = q.pop_front() {
                for &v in g.adjacency(u) {
                    if inside.contains(&v) && dist[v] == usize::MAX {
                        dist[v] = dist[u] + 1;
                        q.push_back(v);
                    }
                }
            }
            for &t in &idx {
                if dist[t] == usize::MAX {
                    return None;
                }
                worst = worst.max(dist[t]);
            }
        }
        Some(worst)
    }
}

pub fn boxes_of<T: Real>(net: &NetworkInstance<T>, p: &SinrParams<T>) -> Vec<GridCoord> {
    net.stations().iter().map(|s| pivotal_box(s.pos, p)).collect()
}

/// Backbone from full topology: leader `min C`, sender `s_C^d = min` of the box members with a
/// neighbour in `C+d`, receiver `r_C^d = min` neighbour in `C` of `s_{C+d}^{-d}`.
pub fn compute_backbone<T: Real>(net: &NetworkInstance<T>, p: &SinrParams<T>, g: &CommGraph) -> Backbone {
    let boxes = boxes_of(net, p);
    let dirs = dir_set();
    let mut bb = Backbone::default();
    for (i, b) in boxes.iter().enumerate() {
        let id = g.id(i);
        bb.boxes.entry(*b).and_modify(|r| r.leader = r.leader.min(id)).or_insert_with(|| BoxRoles::new(id));
    }
    for (u, b) in boxes.iter().enumerate() {
        for &v in g.adjacency(u) {
            let Some(d) = dir_index(b.offset_to(boxes[v])) else { continue };
            let slot = &mut bb.boxes.get_mut(b).expect("box present").senders[d];
            let id = g.id(u);
            if slot.map_or(true, |s| id < s) {
                *slot = Some(id);
            }
        }
    }
    let index: BTreeMap<StationId, usize> = (0..g.len()).map(|i| (g.id(i), i)).collect();
    let keys: Vec<GridCoord> = bb.boxes.keys().copied().collect();
    for c in keys {
        for d in 0..DIR_LEN {
            let Some(s) = bb.boxes[&c].senders[d] else { continue };
            let target = c.shifted(dirs[d]);
            let su = index[&s];
            let r = g.adjacency(su).iter().filter(|&&v| boxes[v] == target).map(|&v| g.id(v)).min();
            if let (Some(r), Some(tb)) = (r, bb.boxes.get_mut(&target)) {
                tb.receivers[opposite(d)] = Some(r);
            }
        }
    }
    bb
}

/// Backbone from the roles stations report for themselves; every box with a role needs a leader.
pub fn assemble_backbone<T: Real>(
    net: &NetworkInstance<T>,
    p: &SinrParams<T>,
    roles: &BTreeMap<StationId, BTreeSet<Role>>,
) -> Result<Backbone, String> {
    let mut leaders = BTreeMap::new();
    for (id, rs) in roles {
        if rs.contains(&Role::Leader) {
            let pos = net.stations()[net.index_of(*id).ok_or(format!("{id:?} is not a station"))?].pos;
            if leaders.insert(pivotal_box(pos, p), *id).is_some() {
                return Err(format!("two leaders claim the box of {id:?}"));
            }
        }
    }
    let mut bb = Backbone::default();
    for (c, l) in leaders {
        bb.boxes.insert(c, BoxRoles::new(l));
    }
    for (id, rs) in roles {
        let pos = net.stations()[net.index_of(*id).ok_or(format!("{id:?} is not a station"))?].pos;
        let c = pivotal_box(pos, p);
        let b = bb.boxes.get_mut(&c).ok_or_else(|| format!("{id:?} holds a role in a box without leader"))?;
        for r in rs {
            let slot = match r {
                Role::Leader => continue,
                Role::Sender(d) => &mut b.senders[*d],
                Role::Receiver(d) => &mut b.receivers[*d],
            };
            if slot.replace(*id).is_some() {
                return Err(format!("role {r:?} of box {c:?} is claimed twice"));
            }
        }
    }
    Ok(bb)
}

/// Checks the backbone against its defining properties and the structural guarantees used by
/// the push phase: at most 41 members per box, domination, and connectivity when `g` is connected.
pub fn check_backbone<T: Real>(bb: &Backbone, net: &NetworkInstance<T>, p: &SinrParams<T>, g: &CommGraph) -> Result<(), String> {
    let expected = compute_backbone(net, p, g);
    if *bb != expected {
        for (c, roles) in &expected.boxes {
            match bb.boxes.get(c) {
                None => return Err(format!("box {c:?} missing")),
                Some(got) if got != roles => return Err(format!("box {c:?}: got {got:?}, expected {roles:?}")),
                _ => {}
            }
        }
        return Err("backbone has boxes without stations".into());
    }
    let boxes = boxes_of(net, p);
    let dirs = dir_set();
    for (c, roles) in &bb.boxes {
        if roles.members().len() > ROLE_SLOTS {
            return Err(format!("box {c:?} has more than {ROLE_SLOTS} backbone members"));
        }
        for d in 0..DIR_LEN {
            if let (Some(s), Some(r)) = (roles.senders[d], bb.boxes.get(&c.shifted(dirs[d])).and_then(|t| t.receivers[opposite(d)])) {
                let (si, ri) = (net.index_of(s).expect("member"), net.index_of(r).expect("member"));
                if !g.has_edge(si, ri) || boxes[si] != *c || boxes[ri] != c.shifted(dirs[d]) {
                    return Err(format!("sender {s:?} and receiver {r:?} of box {c:?} direction {d} are not linked"));
                }
            }
        }
    }
    let members = bb.members();
    for u in 0..g.len() {
        if !members.contains(&g.id(u)) && !g.adjacency(u).iter().any(|&v| members.contains(&g.id(v))) {
            return Err(format!("{:?} is not dominated", g.id(u)));
        }
    }
    let connected = g.bfs(0).iter().all(Option::is_some);
    if connected && !g.is_empty() && bb.diameter(g).is_none() {
        return Err("backbone is disconnected".into());
    }
    Ok(())
}
