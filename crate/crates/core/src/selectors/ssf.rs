use super::family::{FamilyKind, SelectorError, SetFamily};
use super::{ceil_log2, combinations, random_pool_set};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;

/// Documented length constant: every built `(N,x)`-SSF has length at most `C_SSF · x² · ⌈log₂ N⌉`.
pub const C_SSF: usize = 2;

const GREEDY_DEMAND_LIMIT: u64 = 60_000;
const POOL: usize = 48;

/// Builds an `(N,x)`-SSF, the shortest among the identity family, a Reed–Solomon
/// (Kautz–Singleton) code family and, for small parameters, a greedy cover.
pub fn build_ssf(n: u32, x: u32) -> Result<SetFamily, SelectorError> {
    if x == 0 || x > n {
        return Err(SelectorError::Params(format!("need 1 <= x <= N, got N={n}, x={x}")));
    }
    let kind = FamilyKind::Ssf { x };
    if x == 1 {
        return SetFamily::new(n, kind, vec![(1..=n).collect()]);
    }
    let mut best: Vec<Vec<u32>> = (1..=n).map(|v| vec![v]).collect();
    if let Some(ks) = kautz_singleton(n, x) {
        if ks.len() < best.len() {
            best = ks;
        }
    }
    if n <= 64 && ssf_demand_count(n, x) <= GREEDY_DEMAND_LIMIT {
        let g = greedy_ssf(n, x);
        if g.len() < best.len() {
            best = g;
        }
    }
    SetFamily::new(n, kind, best)
}

fn ssf_demand_count(n: u32, x: u32) -> u64 {
    n as u64 * binomial(n as u64 - 1, x as u64 - 1)
}

pub(crate) fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

fn is_prime(q: u64) -> bool {
    q >= 2 && (2..).take_while(|d| d * d <= q).all(|d| q % d != 0)
}

fn next_prime(mut q: u64) -> u64 {
    while !is_prime(q) {
        q += 1;
    }
    q
}

// Polynomials of degree <= m over GF(q) agree in at most m points, so a prime q > (x-1)·m
// leaves every id some evaluation point where it differs from x-1 others.
fn kautz_singleton(n: u32, x: u32) -> Option<Vec<Vec<u32>>> {
    let mut best: Option<(u64, u64)> = None;
    for m in 1..=32u64 {
        let mut q = next_prime((x as u64 - 1) * m + 1);
        while (q as f64).powi(m as i32 + 1) < n as f64 {
            q = next_prime(q + 1);
        }
        if best.map_or(true, |(bq, _)| q < bq) {
            best = Some((q, m));
        }
    }
    let (q, m) = best?;
    if q * q > 4 * n as u64 + 64 {
        return None;
    }
    let mut sets = vec![Vec::new(); (q * q) as usize];
    for v in 1..=n {
        let mut digits = Vec::with_capacity(m as usize + 1);
        let mut rest = (v - 1) as u64;
        for _ in 0..=m {
            digits.push(rest % q);
            rest /= q;
        }
        for a in 0..q {
            let b = digits.iter().rev().fold(0, |acc, &c| (acc * a + c) % q);
            sets[(a * q + b) as usize].push(v);
        }
    }
    sets.retain(|s| !s.is_empty());
    Some(sets)
}

fn greedy_ssf(n: u32, x: u32) -> Vec<Vec<u32>> {
    let mut demands: Vec<(u64, u64)> = Vec::new();
    for z in 0..n {
        let others: Vec<u32> = (0..n).filter(|&v| v != z).collect();
        combinations(&others, (x - 1) as usize, &mut |ys| {
            let mask = ys.iter().fold(0u64, |m, &y| m | 1 << y);
            demands.push((1u64 << z, mask));
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x55f0 ^ ((n as u64) << 32) ^ x as u64);
    let mut out = Vec::new();
    while !demands.is_empty() {
        let mut best = (0usize, 0u64);
        for _ in 0..POOL {
            let s = random_pool_set(&mut rng, n, x);
            let gain = demands.iter().filter(|&&(z, ys)| s & z != 0 && s & ys == 0).count();
            if gain > best.0 {
                best = (gain, s);
            }
        }
        let s = if best.0 == 0 { demands[0].0 } else { best.1 };
        demands.retain(|&(z, ys)| !(s & z != 0 && s & ys == 0));
        out.push((0..n).filter(|&v| s >> v & 1 == 1).map(|v| v + 1).collect());
    }
    out
}

/// Exact check of the `(N,x)`-SSF property. For each `z` it searches for at most `x−1` other ids
/// that hit every set containing `z`; such a blocking set exists iff `z` is never isolated.
pub fn verify_ssf(f: &SetFamily, n: u32, x: u32) -> bool {
    if x == 0 || n == 0 || f.universe() != n {
        return false;
    }
    let budget = x.min(n) as usize - 1;
    (1..=n).all(|z| {
        let mut rests: Vec<Vec<u32>> = f
            .sets()
            .iter()
            .filter(|s| s.binary_search(&z).is_ok())
            .map(|s| s.iter().copied().filter(|&v| v != z).collect())
            .collect();
        if rests.iter().any(Vec::is_empty) {
            return true;
        }
        if rests.is_empty() {
            return false;
        }
        rests.sort_by_key(Vec::len);
        rests.dedup();
        !hittable(&rests, budget)
    })
}

fn hittable(sets: &[Vec<u32>], budget: usize) -> bool {
    let Some(pick) = sets.iter().min_by_key(|s| s.len()) else {
        return true;
    };
    if budget == 0 || disjoint_packing(sets) > budget || degree_bound(sets, budget) < sets.len() {
        return false;
    }
    pick.iter().any(|&e| {
        let rest: Vec<Vec<u32>> = sets.iter().filter(|s| s.binary_search(&e).is_err()).cloned().collect();
        hittable(&rest, budget - 1)
    })
}

// Pairwise disjoint sets each need their own hitting element.
fn disjoint_packing(sets: &[Vec<u32>]) -> usize {
    let mut used: Vec<u32> = Vec::new();
    let mut count = 0;
    for s in sets {
        if s.iter().all(|v| used.binary_search(v).is_err()) {
            count += 1;
            for &v in s {
                if let Err(pos) = used.binary_search(&v) {
                    used.insert(pos, v);
                }
            }
        }
    }
    count
}

// Upper bound on how many sets `budget` elements can hit together.
fn degree_bound(sets: &[Vec<u32>], budget: usize) -> usize {
    let mut count: HashMap<u32, usize> = HashMap::new();
    for &v in sets.iter().flatten() {
        *count.entry(v).or_default() += 1;
    }
    let mut c: Vec<usize> = count.into_values().collect();
    c.sort_unstable_by(|a, b| b.cmp(a));
    c.iter().take(budget).sum()
}

pub(crate) fn ssf_length_bound(n: u32, x: u32) -> usize {
    C_SSF * (x as usize).pow(2) * ceil_log2(n)
}
