use super::{Point, SinrParams};
use crate::scalar::Real;
use serde::{Deserialize, Serialize};

/// Box `C(i, j)` of a grid with side `c`, covering `[c·i, c·(i+1)) × [c·j, c·(j+1))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GridCoord {
    pub i: i64,
    pub j: i64,
}

impl GridCoord {
    pub fn new(i: i64, j: i64) -> Self {
        Self { i, j }
    }

    pub fn shifted(self, (d1, d2): (i64, i64)) -> Self {
        Self::new(self.i + d1, self.j + d2)
    }

    /// Residue pair `(i mod m, j mod m)` with non-negative components.
    pub fn residues(self, m: i64) -> (i64, i64) {
        (self.i.rem_euclid(m), self.j.rem_euclid(m))
    }

    pub fn offset_to(self, other: GridCoord) -> (i64, i64) {
        (other.i - self.i, other.j - self.j)
    }

    /// Box of the grid with side `2·side` containing this box (grids nested at the origin).
    pub fn parent(self) -> Self {
        Self::new(self.i.div_euclid(2), self.j.div_euclid(2))
    }

    /// Position of this box inside its parent box, `0..4`.
    pub fn quadrant(self) -> usize {
        (self.i.rem_euclid(2) * 2 + self.j.rem_euclid(2)) as usize
    }
}

pub fn grid_box<T: Real>(pt: Point<T>, side: T) -> GridCoord {
    let f = |v: T| (v / side).floor().to_i64().expect("coordinate fits in i64");
    GridCoord::new(f(pt.x), f(pt.y))
}

/// Box of the pivotal grid `G_gamma` containing `pt`.
pub fn pivotal_box<T: Real>(pt: Point<T>, p: &SinrParams<T>) -> GridCoord {
    grid_box(pt, p.gamma())
}

pub const DIR_LEN: usize = 20;

/// Offsets `(d1, d2) ∈ [-2,2]² \ {(0,0)}` at which two half-open pivotal boxes can hold
/// stations within range of each other.
///
/// The per-axis gap between boxes at offset `d` is `max(0, |d|-1)·gamma`, and a positive gap is
/// never attained because it is bounded by an excluded side. With `r² = 2·gamma²` a pair of
/// boxes qualifies iff `gx² + gy² < 2`.
pub fn dir_set() -> Vec<(i64, i64)> {
    let mut out = Vec::with_capacity(DIR_LEN);
    for d1 in -2i64..=2 {
        for d2 in -2i64..=2 {
            if (d1, d2) == (0, 0) {
                continue;
            }
            let gx = (d1.abs() - 1).max(0);
            let gy = (d2.abs() - 1).max(0);
            if gx * gx + gy * gy < 2 {
                out.push((d1, d2));
            }
        }
    }
    out
}
