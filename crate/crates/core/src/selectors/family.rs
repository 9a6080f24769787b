use crate::network::StationId;
use crate::sinr::{Schedule, ScheduleError};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SelectorError {
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("malformed family text at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("exhaustive verification limited to N <= {limit}, got {n}")]
    TooLarge { n: u32, limit: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilyKind {
    Ssf { x: u32 },
    Selector { x: u32, y: u32 },
}

/// Indexed family of subsets of `[N] = {1..N}`; set `t` is the transmitter set of round `t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetFamily {
    universe: u32,
    kind: FamilyKind,
    sets: Vec<Vec<u32>>,
}

impl SetFamily {
    /// Sets are sorted and deduplicated; ids outside `[1, universe]` are rejected.
    pub fn new(universe: u32, kind: FamilyKind, mut sets: Vec<Vec<u32>>) -> Result<Self, SelectorError> {
        if universe == 0 {
            return Err(SelectorError::Params("universe must be positive".into()));
        }
        for s in &mut sets {
            s.sort_unstable();
            s.dedup();
            if let Some(&bad) = s.iter().find(|&&v| v == 0 || v > universe) {
                return Err(SelectorError::Params(format!("id {bad} outside [1, {universe}]")));
            }
        }
        Ok(SetFamily { universe, kind, sets })
    }

    pub fn universe(&self) -> u32 {
        self.universe
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn sets(&self) -> &[Vec<u32>] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn contains(&self, t: usize, id: StationId) -> bool {
        self.sets[t].binary_search(&id.0).is_ok()
    }

    pub fn max_set_size(&self) -> usize {
        self.sets.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn to_schedule(&self) -> Result<Schedule, ScheduleError> {
        let len = self.sets.len();
        let mut seqs: BTreeMap<StationId, Vec<bool>> =
            (1..=self.universe).map(|v| (StationId(v), vec![false; len])).collect();
        for (t, s) in self.sets.iter().enumerate() {
            for &v in s {
                seqs.get_mut(&StationId(v)).expect("validated id")[t] = true;
            }
        }
        Schedule::general(len, seqs)
    }
}

impl fmt::Display for SetFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            FamilyKind::Ssf { x } => writeln!(f, "SSF {} {} {}", self.universe, x, self.sets.len())?,
            FamilyKind::Selector { x, y } => writeln!(f, "SEL {} {} {} {}", self.universe, x, y, self.sets.len())?,
        }
        for s in &self.sets {
            let line: Vec<String> = s.iter().map(u32::to_string).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

impl FromStr for SetFamily {
    type Err = SelectorError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let err = |line: usize, msg: &str| SelectorError::Parse { line, msg: msg.to_string() };
        let mut lines = text.lines();
        let header: Vec<&str> = lines.next().ok_or_else(|| err(1, "missing header"))?.split_whitespace().collect();
        let num = |s: &str| s.parse::<u32>().map_err(|_| err(1, "bad header number"));
        let (universe, kind, len) = match header.as_slice() {
            ["SSF", n, x, len] => (num(n)?, FamilyKind::Ssf { x: num(x)? }, num(len)?),
            ["SEL", n, x, y, len] => (num(n)?, FamilyKind::Selector { x: num(x)?, y: num(y)? }, num(len)?),
            _ => return Err(err(1, "expected `SSF N x len` or `SEL N x y len`")),
        };
        let mut sets = Vec::with_capacity(len as usize);
        for (i, line) in lines.enumerate() {
            if sets.len() == len as usize {
                if line.trim().is_empty() {
                    continue;
                }
                return Err(err(i + 2, "more sets than declared"));
            }
            let set = line
                .split_whitespace()
                .map(|t| t.parse::<u32>().map_err(|_| err(i + 2, "bad id")))
                .collect::<Result<Vec<_>, _>>()?;
            if set.windows(2).any(|w| w[0] >= w[1]) {
                return Err(err(i + 2, "ids must be strictly increasing"));
            }
            sets.push(set);
        }
        if sets.len() != len as usize {
            return Err(err(len as usize + 1, "fewer sets than declared"));
        }
        SetFamily::new(universe, kind, sets)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let f = SetFamily::new(5, FamilyKind::Selector { x: 2, y: 1 }, vec![vec![3, 1], vec![], vec![5]]).unwrap();
        let text = f.to_string();
        assert_eq!(text, "SEL 5 2 1 3\n1 3\n\n5\n");
        assert_eq!(text.parse::<SetFamily>().unwrap(), f);
    }

    #[test]
    fn rejects_bad_text() {
        assert!("SSF 4 2 2\n1 2\n".parse::<SetFamily>().is_err());
        assert!("SSF 4 2 1\n2 1\n".parse::<SetFamily>().is_err());
        assert!("SSF 4 2 1\n7\n".parse::<SetFamily>().is_err());
        assert!("XYZ 4 2 1\n1\n".parse::<SetFamily>().is_err());
    }

    #[test]
    fn schedule_matches_membership() {
        let f = SetFamily::new(3, FamilyKind::Ssf { x: 3 }, vec![vec![1], vec![2], vec![3]]).unwrap();
        let s = f.to_schedule().unwrap();
        assert_eq!(s.len(), 3);
        let c = crate::sinr::GridCoord::new(0, 0);
        for t in 0..3 {
            for v in 1..=3 {
                assert_eq!(s.transmits(StationId(v), c, t), f.contains(t, StationId(v)));
            }
        }
    }
}
