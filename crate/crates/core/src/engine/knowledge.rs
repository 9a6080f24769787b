use crate::network::{NetworkInstance, StationId};
use crate::scalar::Real;
use crate::sinr::{CommGraph, Metrics, Point, SinrParams};
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Setting {
    FullTopology,
    NeighborsWithCoords,
    OwnCoordsOnly,
    NeighborIdsOnly,
}

impl fmt::Display for Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Setting::FullTopology => "full-topology",
            Setting::NeighborsWithCoords => "neighbors-with-coords",
            Setting::OwnCoordsOnly => "own-coords-only",
            Setting::NeighborIdsOnly => "neighbor-ids-only",
        })
    }
}

impl std::str::FromStr for Setting {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "full-topology" => Setting::FullTopology,
            "neighbors-with-coords" => Setting::NeighborsWithCoords,
            "own-coords-only" => Setting::OwnCoordsOnly,
            "neighbor-ids-only" => Setting::NeighborIdsOnly,
            _ => return Err(format!("unknown knowledge setting `{s}`")),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KnowledgeError {
    #[error("{field} is not visible in the {setting} setting")]
    Hidden { field: &'static str, setting: Setting },
    #[error("the engine round is only readable with assume-global-clock")]
    GlobalClock,
    #[error("a sleeping node has no clock")]
    Asleep,
}

/// Everything the engine knows; nodes only see it through a [`KnowledgeView`].
#[derive(Debug)]
pub struct World<'a, T: Real> {
    pub(crate) net: &'a NetworkInstance<T>,
    pub(crate) params: &'a SinrParams<T>,
    pub(crate) graph: CommGraph,
    pub(crate) metrics: Metrics,
    pub(crate) k: usize,
}

/// Per-node gate over the world: accessors outside the node's setting return an error.
#[derive(Debug, Clone, Copy)]
pub struct KnowledgeView<'a, T: Real> {
    setting: Setting,
    idx: usize,
    world: &'a World<'a, T>,
}

impl<'a, T: Real> KnowledgeView<'a, T> {
    pub(crate) fn new(setting: Setting, idx: usize, world: &'a World<'a, T>) -> Self {
        KnowledgeView { setting, idx, world }
    }

    fn allow(&self, field: &'static str, ok: &[Setting]) -> Result<(), KnowledgeError> {
        if ok.contains(&self.setting) {
            Ok(())
        } else {
            Err(KnowledgeError::Hidden { field, setting: self.setting })
        }
    }

    pub fn setting(&self) -> Setting {
        self.setting
    }

    pub fn id(&self) -> StationId {
        self.world.graph.id(self.idx)
    }

    pub fn n(&self) -> usize {
        self.world.net.len()
    }

    pub fn id_space(&self) -> u32 {
        self.world.net.id_space()
    }

    pub fn k(&self) -> usize {
        self.world.k
    }

    pub fn params(&self) -> &SinrParams<T> {
        self.world.params
    }

    pub fn own_position(&self) -> Result<Point<T>, KnowledgeError> {
        use Setting::*;
        self.allow("own position", &[FullTopology, NeighborsWithCoords, OwnCoordsOnly])?;
        Ok(self.world.net.stations()[self.idx].pos)
    }

    pub fn neighbor_ids(&self) -> Result<Vec<StationId>, KnowledgeError> {
        use Setting::*;
        self.allow("neighbor ids", &[FullTopology, NeighborsWithCoords, NeighborIdsOnly])?;
        Ok(self.world.graph.neighbor_ids(self.idx))
    }

    pub fn neighbors_with_positions(&self) -> Result<Vec<(StationId, Point<T>)>, KnowledgeError> {
        use Setting::*;
        self.allow("neighbor positions", &[FullTopology, NeighborsWithCoords])?;
        let st = self.world.net.stations();
        Ok(self.world.graph.adjacency(self.idx).iter().map(|&j| (st[j].id, st[j].pos)).collect())
    }

    pub fn network(&self) -> Result<&'a NetworkInstance<T>, KnowledgeError> {
        self.allow("topology", &[Setting::FullTopology])?;
        Ok(self.world.net)
    }

    pub fn graph(&self) -> Result<&'a CommGraph, KnowledgeError> {
        self.allow("topology", &[Setting::FullTopology])?;
        Ok(&self.world.graph)
    }

    pub fn diameter(&self) -> Result<usize, KnowledgeError> {
        use Setting::*;
        self.allow("diameter", &[FullTopology, NeighborsWithCoords, NeighborIdsOnly])?;
        Ok(self.world.metrics.diameter)
    }

    pub fn max_degree(&self) -> Result<usize, KnowledgeError> {
        use Setting::*;
        self.allow("max degree", &[FullTopology, NeighborsWithCoords, NeighborIdsOnly])?;
        Ok(self.world.metrics.max_degree)
    }

    pub fn granularity(&self) -> Result<f64, KnowledgeError> {
        self.allow("granularity", &[Setting::FullTopology])?;
        Ok(self.world.metrics.granularity)
    }
}
