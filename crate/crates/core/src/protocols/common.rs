//! Shared timing and sizing helpers for the scheduled protocols.

use crate::network::RumorId;
use crate::selectors::ceil_log2;
use crate::sinr::GridCoord;

/// `max(1, log2 x)`, the logarithm used in round budgets.
pub fn lg(x: f64) -> f64 {
    if x <= 2.0 {
        1.0
    } else {
        x.log2()
    }
}

/// Bits needed to write a value in `0..=max`.
pub fn bits_for(max: u64) -> u32 {
    (64 - max.leading_zeros()).max(1)
}

/// Rounds of the plain clock grouped into diluted slots of `delta²` rounds. In every slot a
/// pivotal box `(i, j)` owns the single sub-round `(i mod δ)·δ + (j mod δ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dilution {
    pub delta: u32,
}

impl Dilution {
    pub fn slot_len(&self) -> u64 {
        u64::from(self.delta) * u64::from(self.delta)
    }

    pub fn sub_round(&self, cell: GridCoord) -> u64 {
        let (a, b) = cell.residues(i64::from(self.delta));
        (a as u64) * u64::from(self.delta) + b as u64
    }

    /// Slot index if `offset` is the sub-round owned by `cell`.
    pub fn owned_slot(&self, cell: GridCoord, offset: u64) -> Option<u64> {
        let len = self.slot_len();
        (offset % len == self.sub_round(cell)).then_some(offset / len)
    }
}

/// Consecutive named phases on the common clock.
#[derive(Debug, Clone, Default)]
pub struct Timeline {
    phases: Vec<(&'static str, u64)>,
}

impl Timeline {
    pub fn push(&mut self, name: &'static str, len: u64) {
        self.phases.push((name, len));
    }

    pub fn total(&self) -> u64 {
        self.phases.iter().map(|p| p.1).sum()
    }

    pub fn start_of(&self, name: &str) -> Option<u64> {
        let mut at = 0;
        for &(n, len) in &self.phases {
            if n == name {
                return Some(at);
            }
            at += len;
        }
        None
    }

    /// Phase containing clock reading `t` with the offset into it.
    pub fn locate(&self, t: u64) -> Option<(&'static str, u64)> {
        let mut at = 0;
        for &(n, len) in &self.phases {
            if t < at + len {
                return Some((n, t - at));
            }
            at += len;
        }
        None
    }

    pub fn phases(&self) -> &[(&'static str, u64)] {
        &self.phases
    }
}

/// Rumors in arrival order with a cursor for "first not yet sent" forwarding.
#[derive(Debug, Clone, Default)]
pub struct RumorQueue {
    order: Vec<RumorId>,
    sent: usize,
}

impl RumorQueue {
    pub fn insert(&mut self, r: RumorId) -> bool {
        if self.order.contains(&r) {
            return false;
        }
        self.order.push(r);
        true
    }

    pub fn next_unsent(&mut self) -> Option<RumorId> {
        let r = self.order.get(self.sent).copied()?;
        self.sent += 1;
        Some(r)
    }

    pub fn all(&self) -> &[RumorId] {
        &self.order
    }

    pub fn contains(&self, r: RumorId) -> bool {
        self.order.contains(&r)
    }
}

pub fn id_bits(n_space: u32) -> u32 {
    ceil_log2(n_space) as u32
}
