use sinrcast::engine::*;
use sinrcast::protocols::baseline::{Flooding, IdRoundRobin};
use sinrcast::sinr::{communication_graph, receives};
use sinrcast::*;
use std::collections::{BTreeMap, BTreeSet};

fn net(points: &[(f64, f64)]) -> Network {
    let pts: Vec<Pt> = points.iter().map(|&(x, y)| Pt::new(x, y)).collect();
    Network::from_points(&pts, 64).unwrap()
}

fn src(pairs: &[(u32, u32)]) -> BTreeMap<StationId, BTreeSet<RumorId>> {
    let mut m: BTreeMap<StationId, BTreeSet<RumorId>> = BTreeMap::new();
    for &(s, r) in pairs {
        m.entry(StationId(s)).or_default().insert(RumorId(r));
    }
    m
}

fn cfg(limit: u64) -> RunConfig {
    RunConfig { limit, ..RunConfig::default() }
}

// scattered points on a jittered lattice with spacing below the range
fn lattice(n: usize, spacing: f64) -> Network {
    let side = (n as f64).sqrt().ceil() as usize;
    let pts: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let (a, b) = ((i % side) as f64, (i / side) as f64);
            (a * spacing + 0.013 * ((i * 7) % 5) as f64, b * spacing + 0.011 * ((i * 3) % 7) as f64)
        })
        .collect();
    net(&pts)
}

#[test]
fn single_node_completes_immediately() {
    let p = Params::default();
    let out = run_protocol(&net(&[(0.0, 0.0)]), &p, &Flooding { budget: Some(0) }, &src(&[(1, 0)]), cfg(10)).unwrap();
    assert_eq!(out.completion_round, Some(0));
    assert_eq!(out.rounds, 1);
    assert!(out.completed);
}

#[test]
fn neighbor_woken_in_first_round() {
    let p = Params::default();
    let g = p.gamma();
    let n = net(&[(0.1 * g, 0.1 * g), (0.8 * g, 0.7 * g)]);
    let out = run_protocol(&n, &p, &Flooding { budget: Some(3) }, &src(&[(1, 7)]), cfg(10)).unwrap();
    assert_eq!(out.completion_round, Some(1));
    assert_eq!(out.wake_round, vec![Some(0), Some(0)]);
    assert_eq!(out.trace.rounds[0].wakeups, vec![StationId(2)]);
    assert!(out.known[1].contains(&RumorId(7)));
}

#[test]
fn unreachable_node_leaves_run_incomplete() {
    let p = Params::default();
    let n = net(&[(0.0, 0.0), (5.0, 0.0)]);
    let out = run_protocol(&n, &p, &Flooding { budget: Some(5) }, &src(&[(1, 0)]), cfg(20)).unwrap();
    assert!(!out.completed);
    assert_eq!(out.rounds, 20);
    assert_eq!(out.coverage.informed, 1);
    assert_eq!(out.coverage.awake, 1);
}

#[test]
fn round_robin_completes_and_audits() {
    let p = Params::default();
    let n = lattice(30, p.range() * 0.7);
    assert!(sinrcast::sinr::compute_metrics(&n, &p).connected);
    let s = src(&[(1, 0), (17, 1), (30, 2)]);
    let out = run_protocol(&n, &p, &IdRoundRobin, &s, cfg(100_000)).unwrap();
    assert!(out.completed, "{:?}", out.coverage);
    audit_trace(&n, &p, &out.trace).unwrap();
    // one transmitter per round: every neighbor of the sender hears it
    let g = communication_graph(&n, &p);
    for r in &out.trace.rounds {
        let &s = r.transmitters.iter().next().unwrap();
        let idx = n.index_of(s).unwrap();
        assert_eq!(r.deliveries.len(), g.adjacency(idx).len());
    }
}

#[test]
fn flooding_trace_replays_through_oracle() {
    let p = Params::default();
    let n = lattice(40, p.range() * 0.45);
    let out = run_protocol(&n, &p, &Flooding { budget: Some(30) }, &src(&[(3, 0), (20, 1)]), cfg(40)).unwrap();
    audit_trace(&n, &p, &out.trace).unwrap();
    // independent re-derivation: pairwise oracle and half-duplex on recorded rounds
    for r in &out.trace.rounds {
        for d in &r.deliveries {
            assert!(!r.transmitters.contains(&d.receiver));
            assert!(receives(d.sender, d.receiver, &r.transmitters, &n, &p));
        }
        let receivers: BTreeSet<_> = r.deliveries.iter().map(|d| d.receiver).collect();
        assert_eq!(receivers.len(), r.deliveries.len());
    }
}

#[test]
fn audit_detects_tampering() {
    let p = Params::default();
    let g = p.gamma();
    let n = net(&[(0.0, 0.0), (0.5 * g, 0.0)]);
    let out = run_protocol(&n, &p, &Flooding { budget: Some(1) }, &src(&[(1, 0)]), cfg(5)).unwrap();
    let mut t = out.trace.clone();
    t.rounds[0].deliveries.clear();
    assert!(matches!(audit_trace(&n, &p, &t), Err(AuditError::Mismatch { .. })));
}

#[test]
fn runs_are_deterministic() {
    let p = Params::default();
    let n = lattice(25, p.range() * 0.6);
    let s = src(&[(2, 0), (9, 1)]);
    let a = run_protocol(&n, &p, &IdRoundRobin, &s, cfg(50_000)).unwrap();
    let b = run_protocol(&n, &p, &IdRoundRobin, &s, cfg(50_000)).unwrap();
    assert_eq!(a.trace, b.trace);
    let (mut x, mut y) = (Vec::new(), Vec::new());
    a.trace.write_ndjson(&mut x).unwrap();
    b.trace.write_ndjson(&mut y).unwrap();
    assert_eq!(x, y);
    let first: serde_json::Value = serde_json::from_slice(x.split(|&c| c == b'\n').next().unwrap()).unwrap();
    assert_eq!(first["schema"], TRACE_SCHEMA_VERSION);
    assert!(first["transmitters"].is_array());
}

#[test]
fn wakeup_and_rumor_monotonicity() {
    let p = Params::default();
    let n = lattice(36, p.range() * 0.65);
    let s = src(&[(5, 0), (6, 1)]);
    let out = run_protocol(&n, &p, &IdRoundRobin, &s, cfg(100_000)).unwrap();
    let mut first_tx: BTreeMap<StationId, u64> = BTreeMap::new();
    for r in &out.trace.rounds {
        for &t in &r.transmitters {
            first_tx.entry(t).or_insert(r.round);
        }
        for d in &r.deliveries {
            assert!(d.rumor.map_or(true, |x| x.0 < 2));
        }
    }
    for (i, st) in n.stations().iter().enumerate() {
        if s.contains_key(&st.id) {
            continue;
        }
        if let (Some(w), Some(&t)) = (out.wake_round[i], first_tx.get(&st.id)) {
            assert!(t > w);
        }
    }
}

// ---- contract checks with purpose-built nodes ----

#[derive(Clone, Debug)]
struct Fat(u32);
impl Payload for Fat {
    fn bits(&self, _: u32) -> u32 {
        self.0
    }
}

#[derive(Clone, Copy, Debug)]
enum Misbehave {
    Oversized,
    WakeAll,
    ReadEngineRound,
    ReadNeighbors,
    ForeignRumor,
    RecordClock,
}

struct Probe(Misbehave);
#[derive(Debug)]
struct ProbeNode {
    mode: Misbehave,
    done: bool,
}

impl Protocol<f64> for Probe {
    type Node = ProbeNode;
    fn name(&self) -> &'static str {
        "probe"
    }
    fn setting(&self) -> Setting {
        Setting::OwnCoordsOnly
    }
    fn build(&self, _: &KnowledgeView<'_, f64>, _: &BTreeSet<RumorId>) -> Result<ProbeNode, ProtocolError> {
        Ok(ProbeNode { mode: self.0, done: false })
    }
}

impl Node<f64> for ProbeNode {
    type Payload = Fat;
    fn act(&mut self, ctx: &mut Ctx<'_, '_, f64>) -> Result<Option<Outgoing<Fat>>, ProtocolError> {
        match self.mode {
            Misbehave::Oversized if ctx.is_awake() => Ok(Some(Outgoing::control(Fat(10_000)))),
            Misbehave::WakeAll => Ok(Some(Outgoing::control(Fat(1)))),
            Misbehave::ReadEngineRound => {
                ctx.global_round()?;
                Ok(None)
            }
            Misbehave::ReadNeighbors => {
                ctx.view().neighbor_ids()?;
                Ok(None)
            }
            Misbehave::ForeignRumor if ctx.is_awake() => Ok(Some(Outgoing::with_rumor(Some(RumorId(99)), Fat(1)))),
            Misbehave::RecordClock if ctx.is_awake() => {
                let c = ctx.clock()?;
                self.done = c >= 3;
                Ok((ctx.id() == StationId(1) && c == 2).then(|| Outgoing::control(Fat(1))))
            }
            _ => Ok(None),
        }
    }
    fn receive(&mut self, ctx: &mut Ctx<'_, '_, f64>, msg: &Message<Fat>) -> Result<(), ProtocolError> {
        let c = ctx.clock()? as i64;
        ctx.annotate("clock", vec![c, msg.clock as i64]);
        Ok(())
    }
    fn is_done(&self) -> bool {
        self.done
    }
}

fn pair() -> Network {
    net(&[(0.0, 0.0), (0.3, 0.0)])
}

#[test]
fn oversized_message_aborts() {
    let e = run_protocol(&pair(), &Params::default(), &Probe(Misbehave::Oversized), &src(&[(1, 0)]), cfg(5)).unwrap_err();
    assert!(matches!(e, EngineError::OverBudget { node: StationId(1), .. }));
    assert!(e.is_invariant_violation());
}

#[test]
fn sleeping_transmitter_aborts() {
    let e = run_protocol(&pair(), &Params::default(), &Probe(Misbehave::WakeAll), &src(&[(1, 0)]), cfg(5)).unwrap_err();
    assert!(matches!(e, EngineError::SleepingTransmitter { node: StationId(2), round: 0 }));
}

#[test]
fn engine_round_hidden_without_flag() {
    let e = run_protocol(&pair(), &Params::default(), &Probe(Misbehave::ReadEngineRound), &src(&[(1, 0)]), cfg(5)).unwrap_err();
    assert!(matches!(e, EngineError::Protocol { err: ProtocolError::Knowledge(KnowledgeError::GlobalClock), .. }));
    let ok = RunConfig { assume_global_clock: true, ..cfg(5) };
    let out = run_protocol(&pair(), &Params::default(), &Probe(Misbehave::ReadEngineRound), &src(&[(1, 0)]), ok).unwrap();
    assert_eq!(out.rounds, 5);
}

#[test]
fn knowledge_gate_blocks_neighbor_lists() {
    let e = run_protocol(&pair(), &Params::default(), &Probe(Misbehave::ReadNeighbors), &src(&[(1, 0)]), cfg(5)).unwrap_err();
    assert!(matches!(
        e,
        EngineError::Protocol { err: ProtocolError::Knowledge(KnowledgeError::Hidden { setting: Setting::OwnCoordsOnly, .. }), .. }
    ));
}

#[test]
fn rumor_must_be_held() {
    let e = run_protocol(&pair(), &Params::default(), &Probe(Misbehave::ForeignRumor), &src(&[(1, 0)]), cfg(5)).unwrap_err();
    assert!(matches!(e, EngineError::UnknownRumor { rumor: RumorId(99), .. }));
}

#[test]
fn piggybacked_clock_matches_engine_round() {
    let out = run_protocol(&pair(), &Params::default(), &Probe(Misbehave::RecordClock), &src(&[(1, 0)]), cfg(20)).unwrap();
    let notes: Vec<_> = out.notes.iter().filter(|a| a.tag == "clock").collect();
    assert_eq!(notes.len(), 1);
    assert_eq!(notes[0].round, 2);
    assert_eq!(notes[0].data, vec![2, 2]);
}

#[test]
fn input_contracts() {
    let p = Params::default();
    assert!(matches!(run_protocol(&pair(), &p, &Flooding::default(), &BTreeMap::new(), cfg(5)), Err(EngineError::NoSources)));
    let bad = RunConfig { declared_k: Some(1), ..cfg(5) };
    assert!(matches!(
        run_protocol(&pair(), &p, &Flooding::default(), &src(&[(1, 0), (2, 1)]), bad),
        Err(EngineError::TooManyRumors { .. })
    ));
    let low = Params::new(3.0, 0.5, 1.0, 0.5, 1.0);
    assert!(low.is_err());
}
