//! Station identities and network instances.

use crate::scalar::Real;
use crate::sinr::Point;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use thiserror::Error;

/// Station label from the id space `[N] = {1..N}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct StationId(pub u32);

impl fmt::Display for StationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Rumor label. Rumors are numbered by the harness; a rumor's id is unrelated to its source's id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RumorId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Station<T> {
    pub id: StationId,
    pub pos: Point<T>,
}

#[derive(Debug, Error, PartialEq)]
pub enum NetworkError {
    #[error("station id {0} outside [1, {1}]")]
    IdOutOfRange(StationId, u32),
    #[error("duplicate station id {0}")]
    DuplicateId(StationId),
    #[error("stations {0} and {1} share a position")]
    DuplicatePosition(StationId, StationId),
    #[error("station {0} has a non-finite coordinate")]
    NonFinite(StationId),
    #[error("unknown station {0}")]
    UnknownStation(StationId),
    #[error("network is empty")]
    Empty,
}

/// Stations on the plane with unique ids in `[1, N]` and pairwise distinct positions.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkInstance<T> {
    id_space: u32,
    stations: Vec<Station<T>>,
    index: HashMap<StationId, usize>,
}

/// Transmitters of one round.
pub type TransmissionSet = BTreeSet<StationId>;

impl<T: Real> NetworkInstance<T> {
    pub fn new(mut stations: Vec<Station<T>>, id_space: u32) -> Result<Self, NetworkError> {
        if stations.is_empty() {
            return Err(NetworkError::Empty);
        }
        stations.sort_by_key(|s| s.id);
        let mut index = HashMap::with_capacity(stations.len());
        for (i, s) in stations.iter().enumerate() {
            if s.id.0 == 0 || s.id.0 > id_space {
                return Err(NetworkError::IdOutOfRange(s.id, id_space));
            }
            if !s.pos.is_finite() {
                return Err(NetworkError::NonFinite(s.id));
            }
            if index.insert(s.id, i).is_some() {
                return Err(NetworkError::DuplicateId(s.id));
            }
        }
        let mut by_pos: Vec<usize> = (0..stations.len()).collect();
        by_pos.sort_by(|&a, &b| {
            let (pa, pb) = (stations[a].pos, stations[b].pos);
            pa.x.partial_cmp(&pb.x).unwrap().then(pa.y.partial_cmp(&pb.y).unwrap())
        });
        for w in by_pos.windows(2) {
            if stations[w[0]].pos == stations[w[1]].pos {
                return Err(NetworkError::DuplicatePosition(stations[w[0]].id, stations[w[1]].id));
            }
        }
        Ok(Self { id_space, stations, index })
    }

    /// Convenience constructor assigning ids `1..=n` in order.
    pub fn from_points(points: &[Point<T>], id_space: u32) -> Result<Self, NetworkError> {
        let stations = points
            .iter()
            .enumerate()
            .map(|(i, &pos)| Station { id: StationId(i as u32 + 1), pos })
            .collect();
        Self::new(stations, id_space)
    }

    pub fn id_space(&self) -> u32 {
        self.id_space
    }

    pub fn len(&self) -> usize {
        self.stations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stations.is_empty()
    }

    /// Stations sorted by id.
    pub fn stations(&self) -> &[Station<T>] {
        &self.stations
    }

    pub fn ids(&self) -> impl Iterator<Item = StationId> + '_ {
        self.stations.iter().map(|s| s.id)
    }

    pub fn index_of(&self, id: StationId) -> Option<usize> {
        self.index.get(&id).copied()
    }

    pub fn position(&self, id: StationId) -> Result<Point<T>, NetworkError> {
        self.index_of(id).map(|i| self.stations[i].pos).ok_or(NetworkError::UnknownStation(id))
    }

    pub fn contains(&self, id: StationId) -> bool {
        self.index.contains_key(&id)
    }
}
