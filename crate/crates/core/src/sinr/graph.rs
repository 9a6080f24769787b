use super::{receives_at, SinrParams};
use crate::network::{NetworkInstance, StationId};
use crate::scalar::Real;
use serde::Serialize;
use std::collections::VecDeque;

/// Undirected communication graph, indexed like `NetworkInstance::stations`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommGraph {
    ids: Vec<StationId>,
    adj: Vec<Vec<usize>>,
}

impl CommGraph {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn id(&self, idx: usize) -> StationId {
        self.ids[idx]
    }

    pub fn adjacency(&self, idx: usize) -> &[usize] {
        &self.adj[idx]
    }

    pub fn neighbor_ids(&self, idx: usize) -> Vec<StationId> {
        self.adj[idx].iter().map(|&j| self.ids[j]).collect()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a].binary_search(&b).is_ok()
    }

    /// Hop distances from `src`; `None` for unreachable vertices.
    pub fn bfs(&self, src: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.len()];
        dist[src] = Some(0);
        let mut q = VecDeque::from([src]);
        while let Some(u) = q.pop_front() {
            let du = dist[u].expect("queued vertices have distances");
            for &w in &self.adj[u] {
                if dist[w].is_none() {
                    dist[w] = Some(du + 1);
                    q.push_back(w);
                }
            }
        }
        dist
    }
}

/// Edge `{u, v}` iff `v` hears `u` transmitting alone, i.e. `dist(u, v) ≤ r`.
pub fn communication_graph<T: Real>(net: &NetworkInstance<T>, p: &SinrParams<T>) -> CommGraph {
    let st = net.stations();
    let mut adj = vec![Vec::new(); st.len()];
    for a in 0..st.len() {
        for b in a + 1..st.len() {
            if receives_at(st[a].pos, st[b].pos, &[], p) {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
    }
    CommGraph { ids: st.iter().map(|s| s.id).collect(), adj }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Metrics {
    /// Hop diameter; over the largest eccentricity inside components when disconnected.
    pub diameter: usize,
    pub max_degree: usize,
    /// `r` over the minimum pairwise distance; 1 for a single station.
    pub granularity: f64,
    pub connected: bool,
}

pub fn compute_metrics<T: Real>(net: &NetworkInstance<T>, p: &SinrParams<T>) -> Metrics {
    metrics_of(net, p, &communication_graph(net, p))
}

pub fn metrics_of<T: Real>(net: &NetworkInstance<T>, p: &SinrParams<T>, g: &CommGraph) -> Metrics {
    let mut diameter = 0;
    let mut connected = true;
    for s in 0..g.len() {
        for d in g.bfs(s) {
            match d {
                Some(d) => diameter = diameter.max(d),
                None => connected = false,
            }
        }
    }
    let st = net.stations();
    let mut min_d = f64::INFINITY;
    for a in 0..st.len() {
        for b in a + 1..st.len() {
            min_d = min_d.min(st[a].pos.dist(&st[b].pos).to_f64_lossy());
        }
    }
    let granularity = if min_d.is_finite() { p.range().to_f64_lossy() / min_d } else { 1.0 };
    Metrics {
        diameter,
        max_degree: (0..g.len()).map(|i| g.adjacency(i).len()).max().unwrap_or(0),
        granularity,
        connected,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sinr::Point;

    fn net(points: &[(f64, f64)]) -> NetworkInstance<f64> {
        let pts: Vec<_> = points.iter().map(|&(x, y)| Point::new(x, y)).collect();
        NetworkInstance::from_points(&pts, 64).unwrap()
    }

    #[test]
    fn range_boundary_edges() {
        let p = SinrParams::default();
        let r = p.range();
        // exactly r is decided by the last ulp of powf, so probe either side of it
        assert_eq!(communication_graph(&net(&[(0.0, 0.0), (r * (1.0 - 1e-12), 0.0)]), &p).edge_count(), 1);
        assert_eq!(communication_graph(&net(&[(0.0, 0.0), (r * (1.0 + 1e-12), 0.0)]), &p).edge_count(), 0);
        assert_eq!(communication_graph(&net(&[(0.0, 0.0), (2.0 * r, 0.0)]), &p).edge_count(), 0);
    }

    #[test]
    fn pair_metrics() {
        let p = SinrParams::default();
        let r = p.range();
        let m = compute_metrics(&net(&[(0.0, 0.0), (r / 2.0, 0.0)]), &p);
        assert_eq!((m.diameter, m.max_degree, m.connected), (1, 1, true));
        assert!((m.granularity - 2.0).abs() < 1e-12);
    }

    #[test]
    fn path_metrics() {
        let p = SinrParams::default();
        let r = p.range();
        let pts: Vec<_> = (0..6).map(|i| (i as f64 * r * 0.999, 0.0)).collect();
        let m = compute_metrics(&net(&pts), &p);
        assert_eq!((m.diameter, m.max_degree, m.connected), (5, 2, true));
    }

    #[test]
    fn single_station() {
        let p = SinrParams::default();
        let m = compute_metrics(&net(&[(1.0, 1.0)]), &p);
        assert_eq!((m.diameter, m.max_degree, m.connected, m.granularity), (0, 0, true, 1.0));
    }
}
