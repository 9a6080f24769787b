use super::lower_bound::{blocking_threshold, family_ids, gen_lower_bound_family};
use super::GenError;
use crate::engine::{EngineError, Protocol, RoundTrace, RunConfig, Simulation};
use crate::network::{NetworkInstance, RumorId, StationId};
use crate::scalar::Real;
use crate::sinr::SinrParams;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AdversaryError {
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error("network F_{j}: {err}")]
    Engine { j: usize, err: EngineError },
    #[error("round {round}: target of surviving network F_{j} was informed")]
    TargetInformed { round: u64, j: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdversaryReport {
    pub delta: usize,
    pub c: usize,
    /// Rounds until no candidate network was left, or until the survivors stopped or hit the limit.
    pub forced_rounds: u64,
    /// Surviving family size after each round.
    pub survivors: Vec<usize>,
    pub final_survivors: Vec<usize>,
    /// Networks dropped because their layer-one/two history split from the majority.
    pub divergence_removals: usize,
}

impl AdversaryReport {
    /// The lower bound `⌊Δ/c⌋ − 1` the forced round count must reach.
    pub fn bound(&self) -> u64 {
        (self.delta / self.c).saturating_sub(1) as u64
    }
}

// What layers one and two see in a round: who transmitted there and what they decoded.
fn transcript(rec: &RoundTrace, w: StationId) -> (Vec<StationId>, Vec<(StationId, StationId)>) {
    let tx = rec.transmitters.iter().copied().filter(|&v| v != w).collect();
    let rx = rec.deliveries.iter().filter(|d| d.receiver != w).map(|d| (d.sender, d.receiver)).collect();
    (tx, rx)
}

/// Runs `protocol` on all of `F_0 … F_{Δ−1}` in lockstep, the source holding one rumor. After every
/// round the networks whose `v_j` transmitted with at most `c` layer-two stations are discarded,
/// since only there can `w_j` have heard anything; the rest share one history.
pub fn adversary_run<T: Real, P: Protocol<T>>(
    protocol: &P,
    delta: usize,
    p: &SinrParams<T>,
    limit: u64,
) -> Result<AdversaryReport, AdversaryError> {
    let c = blocking_threshold(p);
    let (s, layer, w) = family_ids(delta);
    let nets: Vec<NetworkInstance<T>> =
        (0..delta).map(|j| gen_lower_bound_family(delta, j, p)).collect::<Result<_, _>>()?;
    let sources = BTreeMap::from([(s, BTreeSet::from([RumorId(0)]))]);
    let cfg = RunConfig { limit, record_trace: false, declared_k: Some(1), ..RunConfig::default() };
    let mut sims: Vec<Option<Simulation<'_, T, P>>> = Vec::with_capacity(delta);
    for (j, net) in nets.iter().enumerate() {
        let sim = Simulation::new(net, p, protocol, &sources, cfg.clone()).map_err(|err| AdversaryError::Engine { j, err })?;
        sims.push(Some(sim));
    }
    let layer_set: BTreeSet<StationId> = layer.iter().copied().collect();
    let w_idx = delta + 1;
    let mut survivors = Vec::new();
    let mut divergence_removals = 0;
    let mut round = 0;
    loop {
        let alive: Vec<usize> = (0..delta).filter(|&j| sims[j].is_some()).collect();
        if alive.is_empty() || alive.iter().all(|&j| sims[j].as_ref().expect("alive").finished()) {
            break;
        }
        let mut records = BTreeMap::new();
        for &j in &alive {
            let sim = sims[j].as_mut().expect("alive");
            let rec = sim.step().map_err(|err| AdversaryError::Engine { j, err })?;
            records.insert(j, rec);
        }
        for (&j, rec) in &records {
            let l2 = rec.transmitters.intersection(&layer_set).count();
            if rec.transmitters.contains(&layer[j]) && l2 <= c {
                sims[j] = None;
            }
        }
        let mut classes: BTreeMap<_, Vec<usize>> = BTreeMap::new();
        for (&j, rec) in &records {
            if sims[j].is_some() {
                classes.entry(transcript(rec, w)).or_default().push(j);
            }
        }
        if classes.len() > 1 {
            let keep = classes.values().max_by_key(|v| (v.len(), std::cmp::Reverse(v[0]))).expect("non-empty").clone();
            for js in classes.values().filter(|v| **v != keep) {
                for &j in js {
                    sims[j] = None;
                    divergence_removals += 1;
                }
            }
        }
        round += 1;
        for j in 0..delta {
            if let Some(sim) = &sims[j] {
                if !sim.known()[w_idx].is_empty() {
                    return Err(AdversaryError::TargetInformed { round, j });
                }
            }
        }
        survivors.push(sims.iter().filter(|s| s.is_some()).count());
    }
    Ok(AdversaryReport {
        delta,
        c,
        forced_rounds: round,
        final_survivors: (0..delta).filter(|&j| sims[j].is_some()).collect(),
        survivors,
        divergence_removals,
    })
}
