use sinrcast::engine::*;
use sinrcast::netgen::gen_growth;
use sinrcast::protocols::*;
use sinrcast::sinr::{communication_graph, pivotal_box};
use sinrcast::*;
use std::collections::{BTreeMap, BTreeSet};

type Sources = BTreeMap<StationId, BTreeSet<RumorId>>;

fn cfg() -> RunConfig {
    RunConfig { limit: 4_000_000, record_trace: true, ..RunConfig::default() }
}

fn net_of(pts: &[(f64, f64)]) -> Network {
    let pts: Vec<Pt> = pts.iter().map(|&(x, y)| Pt::new(x, y)).collect();
    Network::from_points(&pts, 64).unwrap()
}

fn src(pairs: &[(u32, u32)]) -> Sources {
    let mut m: Sources = BTreeMap::new();
    for &(s, r) in pairs {
        m.entry(StationId(s)).or_default().insert(RumorId(r));
    }
    m
}

fn run(net: &Network, s: &Sources) -> RunOutcome<BtdNode> {
    let p = Params::default();
    let out = run_protocol(net, &p, &Btd, s, cfg()).unwrap();
    assert!(out.completed, "uninformed nodes: {:?}", out.coverage);
    assert!(out.terminated);
    audit_trace(net, &p, &out.trace).unwrap();
    out
}

fn node(out: &RunOutcome<BtdNode>, id: u32) -> &BtdNode {
    &out.nodes.iter().find(|(s, _)| s.0 == id).unwrap().1
}

/// Parents must form one tree over every station, along graph edges, with children lists agreeing.
fn check_tree(net: &Network, out: &RunOutcome<BtdNode>) -> StationId {
    let g = communication_graph(net, &Params::default());
    let roots: Vec<StationId> = out.nodes.iter().filter(|(_, n)| n.parent().is_none()).map(|(id, _)| *id).collect();
    assert_eq!(roots.len(), 1, "roots {roots:?}");
    for (id, n) in &out.nodes {
        if let Some(p) = n.parent() {
            assert!(g.has_edge(net.index_of(*id).unwrap(), net.index_of(p).unwrap()));
            assert!(node(out, p.0).children().contains(id));
        }
        for c in n.children() {
            assert_eq!(node(out, c.0).parent(), Some(*id));
        }
        // walking up reaches the root
        let mut at = *id;
        for _ in 0..out.nodes.len() {
            match node(out, at.0).parent() {
                Some(p) => at = p,
                None => break,
            }
        }
        assert_eq!(at, roots[0]);
    }
    roots[0]
}

fn path(n: usize) -> Network {
    net_of(&(0..n).map(|i| (0.5 * i as f64, 0.0)).collect::<Vec<_>>())
}

#[test]
fn two_nodes_send_the_token_out_and_back() {
    let net = path(2);
    let out = run(&net, &src(&[(1, 0)]));
    assert_eq!(node(&out, 2).parent(), Some(StationId(1)));
    assert_eq!(node(&out, 1).children(), &[StationId(2)]);
    let sends: Vec<&Vec<i64>> = out.notes.iter().filter(|a| a.tag == "st-send").map(|a| &a.data).collect();
    // check, reply, token out, token back
    assert_eq!(sends.len(), 4);
    assert_eq!(sends.last().unwrap()[2], 1);
}

#[test]
fn star_leaves_hang_off_the_centre() {
    let mut pts = vec![(0.0, 0.0)];
    for i in 0..5 {
        let a = std::f64::consts::TAU * i as f64 / 5.0;
        pts.push((0.8 * a.cos(), 0.8 * a.sin()));
    }
    let net = net_of(&pts);
    let out = run(&net, &src(&[(1, 0), (4, 1)]));
    assert_eq!(check_tree(&net, &out), StationId(1));
    assert_eq!(node(&out, 1).children(), &[StationId(2), StationId(3), StationId(4), StationId(5), StationId(6)]);
    assert_eq!(node(&out, 1).internal_total(), Some(1));
}

#[test]
fn single_station_finishes_at_once() {
    let net = path(1);
    let out = run(&net, &src(&[(1, 0)]));
    assert_eq!(out.rounds, 0);
}

#[test]
fn of_two_adjacent_sources_one_survives() {
    let net = net_of(&[(0.0, 0.0), (0.3, 0.0), (0.6, 0.0)]);
    let out = run(&net, &src(&[(2, 0), (3, 1)]));
    let first: BTreeSet<i64> = out.notes.iter().filter(|a| a.tag == "st-send" && a.data[0] == 0).map(|a| a.data[1]).collect();
    assert_eq!(first, BTreeSet::from([2]));
    assert_eq!(check_tree(&net, &out), StationId(2));
}

#[test]
fn spanning_tree_and_common_termination() {
    let p = Params::default();
    for seed in 0..3u64 {
        let net = gen_growth(50, 0.05, 0.9, seed, &p).unwrap();
        let ids: Vec<StationId> = net.ids().collect();
        let s: Sources = (0..8).map(|r| (ids[(r * 6 + seed as usize) % 50], BTreeSet::from([RumorId(r as u32)]))).collect();
        let out = run(&net, &s);
        let root = check_tree(&net, &out);
        assert_eq!(root, *s.keys().next().unwrap());
        let ends: BTreeSet<Option<u64>> = out.nodes.iter().map(|(_, n)| n.traversal_end()).collect();
        assert_eq!(ends.len(), 1, "termination rounds differ: {ends:?}");
        let walks: Vec<&Vec<i64>> = out.notes.iter().filter(|a| a.tag == "btd-walk").map(|a| &a.data).collect();
        assert_eq!(walks.len(), 2);
        assert_eq!(walks[0][1], 50);
        assert_eq!(walks[1][1], 2 * 50 - 2);
        // at most 37 internal nodes per pivotal box
        let mut per_box: BTreeMap<_, usize> = BTreeMap::new();
        for (id, n) in &out.nodes {
            if n.is_internal() {
                *per_box.entry(pivotal_box(net.stations()[net.index_of(*id).unwrap()].pos, &p)).or_default() += 1;
            }
        }
        assert!(per_box.values().all(|&c| c <= 37));
        smallest_token_properties(&net, &out);
    }
}

/// Per emulated step: each token has at most one holder and it is the addressed station,
/// holders sit in distinct pivotal boxes, and the globally smallest token is always delivered.
fn smallest_token_properties(net: &Network, out: &RunOutcome<BtdNode>) {
    let p = Params::default();
    let mut sent: BTreeMap<(i64, i64), i64> = BTreeMap::new();
    let mut held: BTreeMap<i64, Vec<(i64, StationId)>> = BTreeMap::new();
    for a in &out.notes {
        match a.tag {
            "st-send" => assert!(sent.insert((a.data[0], a.data[1]), a.data[2]).is_none(), "token sent twice in a step"),
            "st-hold" => held.entry(a.data[0]).or_default().push((a.data[1], a.node)),
            _ => {}
        }
    }
    let smallest = sent.keys().map(|k| k.1).min().unwrap();
    let last = sent.keys().filter(|k| k.1 == smallest).map(|k| k.0).max().unwrap();
    for e in 0..=last {
        assert!(sent.contains_key(&(e, smallest)), "smallest token stalled in step {e}");
    }
    for (e, hs) in &held {
        let mut tokens = BTreeSet::new();
        let mut boxes = BTreeSet::new();
        for (tau, at) in hs {
            assert!(tokens.insert(*tau), "token {tau} held twice in step {e}");
            assert_eq!(sent.get(&(*e, *tau)), Some(&i64::from(at.0)));
            assert!(boxes.insert(pivotal_box(net.stations()[net.index_of(*at).unwrap()].pos, &p)), "two holders in one box");
        }
    }
    for (&(e, tau), &dest) in &sent {
        if tau == smallest {
            assert!(held.get(&e).is_some_and(|hs| hs.contains(&(tau, StationId(dest as u32)))));
        }
    }
}

#[test]
fn rumor_from_the_far_leaf_reaches_everyone() {
    let net = path(8);
    let out = run(&net, &src(&[(1, 0), (8, 1)]));
    assert_eq!(check_tree(&net, &out), StationId(1));
    assert!(!node(&out, 8).is_internal());
    assert_eq!(node(&out, 1).internal_total(), Some(7));
    let upload = out.trace.rounds.iter().flat_map(|r| &r.deliveries).find(|d| d.sender == StationId(8) && d.rumor.is_some());
    assert_eq!(upload.map(|d| d.receiver), Some(StationId(7)));
}

#[test]
fn stacked_rumors_leave_in_lifo_order() {
    let net = path(3);
    let out = run(&net, &src(&[(2, 0), (2, 1), (2, 2)]));
    assert_eq!(node(&out, 2).children(), &[StationId(1), StationId(3)]);
    let mut order = Vec::new();
    for r in &out.trace.rounds {
        if let Some(d) = r.deliveries.iter().find(|d| d.sender == StationId(2) && d.rumor.is_some()) {
            order.push(d.rumor.unwrap().0);
        }
    }
    assert_eq!(order, vec![2, 1, 0]);
}

