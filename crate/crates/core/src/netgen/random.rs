use super::GenError;
use crate::network::{NetworkInstance, Station, StationId};
use crate::scalar::Real;
use crate::sinr::{compute_metrics, Point, SinrParams};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const POINT_ATTEMPTS: usize = 10_000;
const NETWORK_ATTEMPTS: u64 = 200;

/// Id space used for an `n`-station instance.
pub fn default_id_space(n: usize) -> u32 {
    (2 * n).max(64) as u32
}

fn assign_ids<T: Real>(rng: &mut ChaCha8Rng, pts: Vec<Point<T>>) -> Result<NetworkInstance<T>, GenError> {
    let space = default_id_space(pts.len());
    let ids = sample(rng, space as usize, pts.len());
    let stations = pts.into_iter().zip(ids).map(|(pos, i)| Station { id: StationId(i as u32 + 1), pos }).collect();
    Ok(NetworkInstance::new(stations, space)?)
}

fn far_enough<T: Real>(pts: &[Point<T>], q: &Point<T>, min_sep: T) -> bool {
    pts.iter().all(|p| p.dist(q) >= min_sep)
}

/// Uniform rejection sampling in `[0, side]²` with pairwise distance at least `min_sep`,
/// redrawn until the communication graph is connected. Ids are a random subset of the id space.
pub fn gen_random<T: Real>(
    n: usize,
    side: T,
    min_sep: T,
    seed: u64,
    p: &SinrParams<T>,
) -> Result<NetworkInstance<T>, GenError> {
    if n == 0 || !(min_sep > T::zero()) || !(side >= T::zero()) {
        return Err(GenError::Params(format!("n={n}, side={side}, min_sep={min_sep}")));
    }
    for attempt in 0..NETWORK_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9).wrapping_add(attempt));
        let mut pts: Vec<Point<T>> = Vec::with_capacity(n);
        while pts.len() < n {
            let q = (0..POINT_ATTEMPTS)
                .map(|_| Point::new(side * T::lit(rng.gen::<f64>()), side * T::lit(rng.gen::<f64>())))
                .find(|q| far_enough(&pts, q, min_sep))
                .ok_or(GenError::Infeasible { placed: pts.len(), n })?;
            pts.push(q);
        }
        let net = assign_ids(&mut rng, pts)?;
        if compute_metrics(&net, p).connected {
            return Ok(net);
        }
    }
    Err(GenError::NotConnected { attempts: NETWORK_ATTEMPTS })
}

/// Connected growth: each new station lands at distance in `[min_sep, spread·r)` from a
/// uniformly chosen earlier one, keeping pairwise distance at least `min_sep`.
pub fn gen_growth<T: Real>(
    n: usize,
    min_sep: T,
    spread: T,
    seed: u64,
    p: &SinrParams<T>,
) -> Result<NetworkInstance<T>, GenError> {
    let reach = p.range() * spread.min(T::lit(0.999));
    if n == 0 || !(min_sep > T::zero()) || !(reach > min_sep) {
        return Err(GenError::Params(format!("n={n}, min_sep={min_sep}, spread={spread}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts = vec![Point::new(T::zero(), T::zero())];
    while pts.len() < n {
        let q = (0..POINT_ATTEMPTS)
            .map(|_| {
                let base = pts[rng.gen_range(0..pts.len())];
                let angle = T::lit(rng.gen::<f64>() * std::f64::consts::TAU);
                let d = min_sep + (reach - min_sep) * T::lit(rng.gen::<f64>());
                base.offset(d * angle.cos(), d * angle.sin())
            })
            .find(|q| far_enough(&pts, q, min_sep))
            .ok_or(GenError::Infeasible { placed: pts.len(), n })?;
        pts.push(q);
    }
    assign_ids(&mut rng, pts)
}

/// One station per point on a horizontal line with the given spacing.
pub fn gen_line<T: Real>(n: usize, spacing: T) -> Result<NetworkInstance<T>, GenError> {
    let pts: Vec<Point<T>> = (0..n).map(|i| Point::new(spacing * T::lit(i as f64), T::zero())).collect();
    Ok(NetworkInstance::from_points(&pts, default_id_space(n))?)
}
