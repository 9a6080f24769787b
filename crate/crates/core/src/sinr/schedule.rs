use super::GridCoord;
use crate::network::StationId;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ScheduleError {
    #[error("dilution modulus must be positive")]
    ZeroDelta,
    #[error("only general schedules can be diluted")]
    NotGeneral,
    #[error("bit sequence of station {0} has length {1}, expected {2}")]
    Length(StationId, usize, usize),
}

/// Broadcast schedule over the id space: general (per id) or geometric (per id and grid residue pair).
#[derive(Debug, Clone, PartialEq)]
pub enum Schedule {
    General { len: usize, seqs: BTreeMap<StationId, Vec<bool>> },
    Geometric { len: usize, delta: u32, seqs: BTreeMap<(StationId, u32, u32), Vec<bool>> },
}

impl Schedule {
    pub fn general(len: usize, seqs: BTreeMap<StationId, Vec<bool>>) -> Result<Self, ScheduleError> {
        for (&id, s) in &seqs {
            if s.len() != len {
                return Err(ScheduleError::Length(id, s.len(), len));
            }
        }
        Ok(Schedule::General { len, seqs })
    }

    pub fn len(&self) -> usize {
        match self {
            Schedule::General { len, .. } | Schedule::Geometric { len, .. } => *len,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Whether station `id` located in box `cell` transmits in round `t` (taken modulo the length).
    pub fn transmits(&self, id: StationId, cell: GridCoord, t: usize) -> bool {
        if self.is_empty() {
            return false;
        }
        match self {
            Schedule::General { len, seqs } => seqs.get(&id).map_or(false, |s| s[t % len]),
            Schedule::Geometric { len, delta, seqs } => {
                let (a, b) = cell.residues(*delta as i64);
                seqs.get(&(id, a as u32, b as u32)).map_or(false, |s| s[t % len])
            }
        }
    }
}

/// `delta`-dilution of a general schedule: round `t` is split into `delta²` sub-rounds and
/// bit `t·delta² + a·delta + b` of `S'(v, a, b)` equals bit `t` of `S(v)` (rounds counted from 0).
pub fn dilute(s: &Schedule, delta: u32) -> Result<Schedule, ScheduleError> {
    if delta == 0 {
        return Err(ScheduleError::ZeroDelta);
    }
    let Schedule::General { len, seqs } = s else {
        return Err(ScheduleError::NotGeneral);
    };
    let d = delta as usize;
    let new_len = len * d * d;
    let mut out = BTreeMap::new();
    for (&v, bits) in seqs {
        for a in 0..d {
            for b in 0..d {
                let mut seq = vec![false; new_len];
                for (t, &bit) in bits.iter().enumerate() {
                    seq[t * d * d + a * d + b] = bit;
                }
                out.insert((v, a as u32, b as u32), seq);
            }
        }
    }
    Ok(Schedule::Geometric { len: new_len, delta, seqs: out })
}
