use sinrcast::engine::*;
use sinrcast::netgen::*;
use sinrcast::network::TransmissionSet;
use sinrcast::protocols::baseline::{Flooding, IdRoundRobin};
use sinrcast::sinr::{communication_graph, receives};
use sinrcast::*;
use std::collections::{BTreeMap, BTreeSet};

#[test]
fn random_trivial_sizes() {
    let p = Params::default();
    let one = gen_random(1, 1.0, 0.1, 3, &p).unwrap();
    let m = compute_metrics(&one, &p);
    assert_eq!((m.connected, m.diameter, m.max_degree), (true, 0, 0));
    let two = gen_random(2, p.range() * 0.7, 0.01, 4, &p).unwrap();
    let m = compute_metrics(&two, &p);
    assert_eq!((m.connected, m.diameter), (true, 1));
}

#[test]
fn separation_bounds_granularity() {
    let p = Params::default();
    let net = gen_random(100, 3.0, p.range() / 16.0, 11, &p).unwrap();
    let m = compute_metrics(&net, &p);
    assert!(m.connected);
    assert!(m.granularity <= 16.0 + 1e-9);
    assert_eq!(net.id_space(), 200);
}

#[test]
fn generators_are_seed_deterministic() {
    let p = Params::default();
    let a = gen_growth(60, 0.05, 0.8, 5, &p).unwrap();
    let b = gen_growth(60, 0.05, 0.8, 5, &p).unwrap();
    let c = gen_growth(60, 0.05, 0.8, 6, &p).unwrap();
    assert_eq!(write_instance(&a, &p), write_instance(&b, &p));
    assert_ne!(write_instance(&a, &p), write_instance(&c, &p));
    assert!(compute_metrics(&a, &p).connected);
}

#[test]
fn infeasible_density_is_an_error() {
    let p = Params::default();
    assert!(matches!(gen_random(50, 0.1, 0.05, 1, &p), Err(GenError::Infeasible { .. })));
    assert!(gen_random(0, 1.0, 0.1, 1, &p).is_err());
}

#[test]
fn instance_text_round_trip() {
    let p = Params::default();
    let net = gen_growth(12, 0.05, 0.9, 2, &p).unwrap();
    let text = write_instance(&net, &p);
    assert!(text.starts_with(&format!("NET 12 64 {:.12}\n", p.range())));
    let back: Network = read_instance(&text).unwrap();
    assert_eq!(back.ids().collect::<Vec<_>>(), net.ids().collect::<Vec<_>>());
    for (a, b) in back.stations().iter().zip(net.stations()) {
        assert!(a.pos.dist(&b.pos) < 1e-11);
    }
    assert!(read_instance::<f64>("NET 2 64 0.8\n1 0 0\n").is_err());
    assert!(read_instance::<f64>("NET 1 64 0.8\n1 0 0\n").is_ok());
}

#[test]
fn line_metrics() {
    let p = Params::default();
    let net = gen_line(7, p.range() * 0.999).unwrap();
    let m = compute_metrics(&net, &p);
    assert_eq!((m.diameter, m.max_degree), (6, 2));
}

fn subsets(items: &[StationId], k: usize) -> Vec<Vec<StationId>> {
    if k == 0 {
        return vec![vec![]];
    }
    if items.len() < k {
        return vec![];
    }
    let mut out = subsets(&items[1..], k);
    for mut s in subsets(&items[1..], k - 1) {
        s.push(items[0]);
        out.push(s);
    }
    out
}

#[test]
fn family_structure_by_exhaustive_oracle() {
    for alpha in [2.5, 3.0, 4.0] {
        let p = Params::normalized(alpha, 0.5).unwrap();
        let c = blocking_threshold(&p);
        assert_eq!(c, (2f64.powf(alpha / 2.0)).ceil() as usize);
        for delta in [4usize, 8, 12] {
            let (s, layer, w) = family_ids(delta);
            for j in 0..delta {
                let net = gen_lower_bound_family(delta, j, &p).unwrap();
                let g = communication_graph(&net, &p);
                let w_idx = net.index_of(w).unwrap();
                assert_eq!(g.neighbor_ids(w_idx), vec![layer[j]]);
                let s_idx = net.index_of(s).unwrap();
                assert_eq!(g.neighbor_ids(s_idx), layer);
                assert!(receives(layer[j], w, &TransmissionSet::from([layer[j]]), &net, &p));
                for set in subsets(&layer, c + 1) {
                    let tx: TransmissionSet = set.into_iter().collect();
                    assert!(tx.iter().all(|&v| !receives(v, w, &tx, &net, &p)), "alpha={alpha} delta={delta} j={j}");
                }
            }
        }
    }
}

#[test]
fn family_metrics() {
    let p = Params::default();
    for delta in [4usize, 8, 12] {
        let net = gen_lower_bound_family(delta, 1, &p).unwrap();
        let m = compute_metrics(&net, &p);
        // every v_i reaches w_j via v_j, and s via one hop
        assert_eq!(m.diameter, 2);
        assert_eq!(m.max_degree, delta + 1);
        assert!((m.granularity - 2f64.sqrt() * delta as f64).abs() < 1e-6);
    }
}

#[test]
fn family_rejects_bad_parameters() {
    let p = Params::default();
    assert!(gen_lower_bound_family(3, 0, &p).is_err());
    assert!(gen_lower_bound_family(5, 5, &p).is_err());
    let b2 = Params::new(3.0, 2.0, 1.0, 0.5, 1.0).unwrap();
    assert!(gen_lower_bound_family(5, 0, &b2).is_err());
}

#[test]
fn chains() {
    let p = Params::default();
    let one = chain_networks(5, 3, &[2], &p).unwrap();
    assert_eq!(one.len(), 7);
    assert_eq!(compute_metrics(&one, &p).diameter, 2);
    let three = chain_networks(4, 7, &[0, 3, 1], &p).unwrap();
    assert!(three.len() <= 16);
    let m = compute_metrics(&three, &p);
    assert_eq!(m.diameter, 6);
    assert_eq!(m.max_degree, 5);
    assert!(chain_networks(4, 6, &[0, 1], &p).is_err());
    assert!(chain_networks(4, 7, &[0], &p).is_err());
}

#[test]
fn naive_flooding_never_reaches_target() {
    let p = Params::default();
    let net = gen_lower_bound_family(8, 3, &p).unwrap();
    let (s, _, w) = family_ids(8);
    let src = BTreeMap::from([(s, BTreeSet::from([RumorId(0)]))]);
    let out = run_protocol(&net, &p, &Flooding::default(), &src, RunConfig { limit: 200, ..RunConfig::default() }).unwrap();
    assert!(!out.completed);
    assert!(out.known[net.index_of(w).unwrap()].is_empty());
    audit_trace(&net, &p, &out.trace).unwrap();
}

// s speaks once, then v_0 alone forever
#[derive(Debug)]
struct SoloV0;
#[derive(Debug)]
struct SoloNode(StationId);

impl Protocol<f64> for SoloV0 {
    type Node = SoloNode;
    fn name(&self) -> &'static str {
        "solo-v0"
    }
    fn setting(&self) -> Setting {
        Setting::NeighborIdsOnly
    }
    fn build(&self, v: &KnowledgeView<'_, f64>, _: &BTreeSet<RumorId>) -> Result<SoloNode, ProtocolError> {
        Ok(SoloNode(v.id()))
    }
}

impl Node<f64> for SoloNode {
    type Payload = ();
    fn act(&mut self, ctx: &mut Ctx<'_, '_, f64>) -> Result<Option<Outgoing<()>>, ProtocolError> {
        let Ok(t) = ctx.clock() else { return Ok(None) };
        let speak = (t == 0 && self.0 == StationId(1)) || (t > 0 && self.0 == StationId(2));
        Ok(speak.then(|| Outgoing::with_rumor(Some(RumorId(0)), ())))
    }
    fn receive(&mut self, _: &mut Ctx<'_, '_, f64>, _: &Message<()>) -> Result<(), ProtocolError> {
        Ok(())
    }
    fn is_done(&self) -> bool {
        false
    }
}

#[test]
fn adversary_against_solo_transmitter() {
    let p = Params::default();
    let rep = adversary_run(&SoloV0, 8, &p, 50).unwrap();
    assert_eq!(rep.c, 3);
    assert_eq!(rep.forced_rounds, 50);
    assert_eq!(rep.final_survivors, (1..8).collect::<Vec<_>>());
    assert_eq!(rep.survivors[0], 8);
    assert_eq!(rep.survivors[1], 7);
}

#[test]
fn adversary_against_round_robin_and_flooding() {
    let p = Params::default();
    for delta in [4usize, 8, 12] {
        let rr = adversary_run(&IdRoundRobin, delta, &p, 10_000).unwrap();
        assert!(rr.forced_rounds >= rr.bound(), "{rr:?}");
        // one layer-two station per slot: each network falls in the slot of its v_j
        assert!(rr.final_survivors.is_empty());
        assert!(rr.forced_rounds >= delta as u64);
        let fl = adversary_run(&Flooding { budget: Some(100) }, delta, &p, 10_000).unwrap();
        assert_eq!(fl.final_survivors.len(), delta);
        assert!(fl.forced_rounds >= fl.bound());
    }
}
