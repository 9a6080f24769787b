use super::family::{FamilyKind, SelectorError, SetFamily};
use super::ssf::binomial;
use super::{ceil_log2, combinations, random_pool_set};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Documented length constant: built selectors with `y ≤ x/2` have length at most
/// `C_SEL · x · ⌈log₂ N⌉`.
pub const C_SEL: usize = 2;

/// Above this universe size selectors are drawn pseudorandomly and not verified.
pub const SELECTOR_VERIFY_LIMIT: u32 = 64;

const GREEDY_SUBSET_LIMIT: u64 = 60_000;
const POOL: usize = 48;

pub fn build_selector(n: u32, x: u32, y: u32) -> Result<SetFamily, SelectorError> {
    if y == 0 || y > x || x > n {
        return Err(SelectorError::Params(format!("need 1 <= y <= x <= N, got N={n}, x={x}, y={y}")));
    }
    let kind = FamilyKind::Selector { x, y };
    if x == 1 {
        return SetFamily::new(n, kind, vec![(1..=n).collect()]);
    }
    let singletons = || (1..=n).map(|v| vec![v]).collect::<Vec<_>>();
    let sets = if n <= SELECTOR_VERIFY_LIMIT && binomial(n as u64, x as u64) <= GREEDY_SUBSET_LIMIT {
        let g = greedy_selector(n, x, y);
        if g.len() < n as usize {
            g
        } else {
            singletons()
        }
    } else {
        let len = C_SEL * x as usize * ceil_log2(n);
        if len >= n as usize {
            singletons()
        } else {
            pseudorandom(n, x, len)
        }
    };
    SetFamily::new(n, kind, sets)
}

fn pseudorandom(n: u32, x: u32, len: usize) -> Vec<Vec<u32>> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5e1 ^ ((n as u64) << 32) ^ x as u64);
    (0..len).map(|_| (1..=n).filter(|_| rng.gen_range(0..x) == 0).collect()).collect()
}

fn greedy_selector(n: u32, x: u32, y: u32) -> Vec<Vec<u32>> {
    let ids: Vec<u32> = (0..n).collect();
    // (subset mask, isolated-so-far mask)
    let mut open: Vec<(u64, u64)> = Vec::new();
    combinations(&ids, x as usize, &mut |a| open.push((a.iter().fold(0u64, |m, &v| m | 1 << v), 0)));
    let mut rng = ChaCha8Rng::seed_from_u64(0x5e1ec7 ^ ((n as u64) << 40) ^ ((x as u64) << 20) ^ y as u64);
    let gain = |s: u64, (a, iso): (u64, u64)| {
        let hit = s & a;
        hit.count_ones() == 1 && hit & iso == 0
    };
    let mut out = Vec::new();
    while !open.is_empty() {
        let mut best = (0usize, 0u64);
        for _ in 0..POOL {
            let s = random_pool_set(&mut rng, n, x);
            let g = open.iter().filter(|&&d| gain(s, d)).count();
            if g > best.0 {
                best = (g, s);
            }
        }
        let s = if best.0 == 0 {
            let (a, iso) = open[0];
            let rest = a & !iso;
            rest & rest.wrapping_neg()
        } else {
            best.1
        };
        for d in open.iter_mut() {
            if gain(s, *d) {
                d.1 |= s & d.0;
            }
        }
        open.retain(|&(_, iso)| iso.count_ones() < y);
        out.push((0..n).filter(|&v| s >> v & 1 == 1).map(|v| v + 1).collect());
    }
    out
}

/// Exhaustive check over all size-`x` subsets of `[N]`.
pub fn verify_selector(f: &SetFamily, n: u32, x: u32, y: u32) -> Result<bool, SelectorError> {
    if n > SELECTOR_VERIFY_LIMIT {
        return Err(SelectorError::TooLarge { n, limit: SELECTOR_VERIFY_LIMIT });
    }
    if y == 0 || y > x || x > n || f.universe() != n {
        return Ok(false);
    }
    let masks: Vec<u64> = f.sets().iter().map(|s| s.iter().fold(0u64, |m, &v| m | 1 << (v - 1))).collect();
    let ids: Vec<u32> = (0..n).collect();
    let mut ok = true;
    combinations(&ids, x as usize, &mut |a| {
        if !ok {
            return;
        }
        let a = a.iter().fold(0u64, |m, &v| m | 1 << v);
        let iso = masks.iter().map(|s| s & a).filter(|h| h.count_ones() == 1).fold(0u64, |m, h| m | h);
        ok = iso.count_ones() >= y;
    });
    Ok(ok)
}

pub(crate) fn selector_length_bound(n: u32, x: u32) -> usize {
    C_SEL * x as usize * ceil_log2(n)
}
