use super::random::default_id_space;
use super::GenError;
use crate::network::{NetworkInstance, Station, StationId, TransmissionSet};
use crate::scalar::Real;
use crate::sinr::{receives, Point, SinrParams};

// w_j sits just inside the range of v_j so that floating-point rounding cannot decide the edge.
const INSIDE: f64 = 1.0 - 1e-9;

/// Blocking threshold `c = ⌈2^{α/2}⌉`: more than `c` simultaneous layer-two transmitters jam `w_j`.
pub fn blocking_threshold<T: Real>(p: &SinrParams<T>) -> usize {
    let a = p.alpha.to_f64_lossy();
    (2f64.powf(a / 2.0) - 1e-12).ceil() as usize
}

/// Ids in a family instance: source 1, layer two `2..=Δ+1`, target `Δ+2`.
pub fn family_ids(delta: usize) -> (StationId, Vec<StationId>, StationId) {
    let layer = (0..delta).map(|i| StationId(i as u32 + 2)).collect();
    (StationId(1), layer, StationId(delta as u32 + 2))
}

/// Instance `F_j`: source at the origin, `v_i = (γi/Δ, γ)`, `w_j = (γj/Δ, γ + r)` pulled
/// inward by a relative `1e-9`. The three structural properties are checked by the oracle.
pub fn gen_lower_bound_family<T: Real>(delta: usize, j: usize, p: &SinrParams<T>) -> Result<NetworkInstance<T>, GenError> {
    if delta < 4 || j >= delta {
        return Err(GenError::Params(format!("need Δ >= 4 and 0 <= j < Δ, got Δ={delta}, j={j}")));
    }
    if p.beta != T::one() {
        return Err(GenError::Params("the blocking argument needs beta = 1".into()));
    }
    let (g, r) = (p.gamma(), p.range());
    let d = T::lit(delta as f64);
    let (s, layer, w) = family_ids(delta);
    let mut st = vec![Station { id: s, pos: Point::new(T::zero(), T::zero()) }];
    for (i, &v) in layer.iter().enumerate() {
        st.push(Station { id: v, pos: Point::new(g * T::lit(i as f64) / d, g) });
    }
    st.push(Station { id: w, pos: Point::new(g * T::lit(j as f64) / d, g + r * T::lit(INSIDE)) });
    let net = NetworkInstance::new(st, default_id_space(delta + 2))?;
    check_family(&net, delta, j, p)?;
    Ok(net)
}

fn check_family<T: Real>(net: &NetworkInstance<T>, delta: usize, j: usize, p: &SinrParams<T>) -> Result<(), GenError> {
    let (s, layer, w) = family_ids(delta);
    let solo = |a: StationId, b: StationId| receives(a, b, &TransmissionSet::from([a]), net, p);
    if let Some(v) = layer.iter().find(|&&v| !solo(s, v)) {
        return Err(GenError::Structure(format!("{v} is outside the source's range")));
    }
    for (i, &v) in layer.iter().enumerate() {
        if solo(v, w) != (i == j) {
            return Err(GenError::Structure(format!("w adjacency to {v} is wrong")));
        }
    }
    if solo(s, w) {
        return Err(GenError::Structure("w hears the source".into()));
    }
    // worst case for w: v_j together with the c other layer stations farthest from w
    let c = blocking_threshold(p);
    let wp = net.position(w)?;
    let mut others: Vec<(T, StationId)> =
        layer.iter().filter(|&&v| v != layer[j]).map(|&v| (net.position(v).expect("member").dist(&wp), v)).collect();
    others.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite distances"));
    if others.len() >= c {
        let mut tx: TransmissionSet = others[..c].iter().map(|&(_, v)| v).collect();
        tx.insert(layer[j]);
        if let Some(&v) = tx.iter().find(|&&v| receives(v, w, &tx, net, p)) {
            return Err(GenError::Structure(format!("{} layer transmitters fail to jam w (sender {v})", c + 1)));
        }
    }
    Ok(())
}

/// Concatenates `(D−1)/2` family instances, the source of each equal to the target of the previous.
pub fn chain_networks<T: Real>(delta: usize, diameter: usize, js: &[usize], p: &SinrParams<T>) -> Result<NetworkInstance<T>, GenError> {
    if diameter < 3 || diameter % 2 == 0 || js.len() != (diameter - 1) / 2 {
        return Err(GenError::Params(format!("need odd D >= 3 and (D-1)/2 choices, got D={diameter}, {} choices", js.len())));
    }
    let mut pts: Vec<Point<T>> = vec![Point::new(T::zero(), T::zero())];
    let mut origin = Point::new(T::zero(), T::zero());
    for &j in js {
        let f = gen_lower_bound_family(delta, j, p)?;
        let st = f.stations();
        for s in &st[1..] {
            pts.push(origin.offset(s.pos.x, s.pos.y));
        }
        let last = pts[pts.len() - 1];
        origin = last;
    }
    Ok(NetworkInstance::from_points(&pts, default_id_space(pts.len()))?)
}

