use super::SinrParams;
use crate::scalar::Real;

const DIRECT_RINGS: usize = 4096;
const MAX_DELTA: u32 = 1 << 16;

/// Upper bound on the interference at a receiver within `reach` of a sender, when at most
/// `multiplicity` stations transmit per box of side `cell_side` and only boxes whose offset is a
/// multiple of `delta` in both coordinates are active. Ring `i` (Chebyshev distance `i·delta`
/// boxes) is charged `8(i+1)` boxes, each at distance at least `(i·delta − 1)·side − reach`.
/// Returns `None` when the first ring may reach the receiver.
pub fn interference_ring_bound<T: Real>(
    p: &SinrParams<T>,
    delta: u32,
    cell_side: T,
    reach: T,
    multiplicity: usize,
) -> Option<T> {
    let (alpha, power) = (p.alpha.to_f64_lossy(), p.power.to_f64_lossy());
    let (side, reach) = (cell_side.to_f64_lossy(), reach.to_f64_lossy());
    let d = delta as f64;
    if delta == 0 || (d - 1.0) * side <= reach {
        return None;
    }
    let mut sum = 0.0;
    for i in 1..=DIRECT_RINGS {
        let fi = i as f64;
        let dist = (fi * d - 1.0) * side - reach;
        sum += 8.0 * (fi + 1.0) * power * dist.powf(-alpha);
    }
    // tail: (i+1) ≤ 2i and (i·δ−1)·side − reach ≥ i·a for i > M
    let m = DIRECT_RINGS as f64;
    let a = d * side - (side + reach) / (m + 1.0);
    sum += 16.0 * power * a.powf(-alpha) * m.powf(2.0 - alpha) / (alpha - 2.0);
    Some(T::lit(sum * multiplicity as f64))
}

/// Smallest `delta` for which a transmission over distance `reach` survives the worst-case
/// interference of a `delta`-diluted schedule with up to `multiplicity` transmitters per box.
pub fn min_dilution<T: Real>(p: &SinrParams<T>, cell_side: T, reach: T, multiplicity: usize) -> Option<u32> {
    let signal = p.signal_at(reach).to_f64_lossy();
    let (beta, noise) = (p.beta.to_f64_lossy(), p.noise.to_f64_lossy());
    (1..=MAX_DELTA).find(|&delta| {
        interference_ring_bound(p, delta, cell_side, reach, multiplicity)
            .map_or(false, |i| signal >= beta * (noise + i.to_f64_lossy()))
    })
}

/// Dilution that makes one transmitter per pivotal box heard throughout its range.
pub fn safe_dilution_constant<T: Real>(p: &SinrParams<T>) -> u32 {
    min_dilution(p, p.gamma(), p.range(), 1).expect("alpha > 2 makes the ring series converge")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sinr::{receives_at, Point};

    #[test]
    fn defaults_need_eight() {
        let p = SinrParams::<f64>::default();
        assert_eq!(safe_dilution_constant(&p), 8);
        let r = p.range();
        let bound7 = interference_ring_bound(&p, 7, p.gamma(), r, 1).unwrap();
        assert!(p.signal_at(r) < p.beta * (p.noise + bound7));
    }

    #[test]
    fn first_ring_must_clear_reach() {
        let p = SinrParams::<f64>::default();
        assert!(interference_ring_bound(&p, 1, p.gamma(), p.range(), 1).is_none());
        assert!(interference_ring_bound(&p, 2, p.gamma(), p.range(), 1).is_none());
        assert!(interference_ring_bound(&p, 3, p.gamma(), p.range(), 1).is_some());
    }

    #[test]
    fn multiplicity_never_lowers_delta() {
        let p = SinrParams::<f64>::default();
        let mut last = 0;
        for m in [1, 2, 5, 20, 100] {
            let d = min_dilution(&p, p.gamma(), p.range(), m).unwrap();
            assert!(d >= last);
            last = d;
        }
    }

    // Packs one interferer per active box at its point closest to the receiver and checks the
    // resulting configuration through the reception oracle.
    #[test]
    fn dense_packing_still_received() {
        let p = SinrParams::<f64>::default();
        let (g, r) = (p.gamma(), p.range());
        let delta = safe_dilution_constant(&p) as i64;
        let sender = Point::new(0.0, 0.0);
        let receiver = Point::new(r * 0.999_999, 0.0);
        let mut inter = Vec::new();
        for u in -12i64..=12 {
            for v in -12i64..=12 {
                if u == 0 && v == 0 {
                    continue;
                }
                let (bi, bj) = (u * delta, v * delta);
                let x = (receiver.x).clamp(bi as f64 * g, (bi + 1) as f64 * g - 1e-9);
                let y = (receiver.y).clamp(bj as f64 * g, (bj + 1) as f64 * g - 1e-9);
                inter.push(Point::new(x, y));
            }
        }
        assert!(receives_at(sender, receiver, &inter, &p));
    }

    #[test]
    fn f32_matches_f64() {
        let p64 = SinrParams::<f64>::default();
        let p32 = SinrParams::<f32>::default();
        assert_eq!(safe_dilution_constant(&p64), safe_dilution_constant(&p32));
    }
}
