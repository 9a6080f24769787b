//! Strongly-selective families and selectors, built deterministically and verified exactly.

mod family;
mod selector;
mod ssf;

pub use family::{FamilyKind, SelectorError, SetFamily};
pub use selector::{build_selector, verify_selector, C_SEL, SELECTOR_VERIFY_LIMIT};
pub use ssf::{build_ssf, verify_ssf, C_SSF};

use rand::Rng;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Length bound `C · x² · ⌈log₂ N⌉` promised for [`build_ssf`].
pub fn ssf_length_bound(n: u32, x: u32) -> usize {
    ssf::ssf_length_bound(n, x)
}

/// Length bound `C · x · ⌈log₂ N⌉` promised for [`build_selector`] when `y ≤ x/2`.
pub fn selector_length_bound(n: u32, x: u32) -> usize {
    selector::selector_length_bound(n, x)
}

/// `⌈log₂ n⌉`, at least 1.
pub fn ceil_log2(n: u32) -> usize {
    (32 - n.saturating_sub(1).leading_zeros()).max(1) as usize
}

type Key = (u32, u32, u32);

fn cache() -> &'static Mutex<HashMap<Key, Arc<SetFamily>>> {
    static CACHE: OnceLock<Mutex<HashMap<Key, Arc<SetFamily>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Memoized [`build_ssf`]; `x` is clamped to `[1, N]`.
pub fn shared_ssf(n: u32, x: u32) -> Arc<SetFamily> {
    let x = x.clamp(1, n.max(1));
    let key = (n, x, 0);
    if let Some(f) = cache().lock().expect("cache poisoned").get(&key) {
        return f.clone();
    }
    let f = Arc::new(build_ssf(n, x).expect("clamped parameters are valid"));
    cache().lock().expect("cache poisoned").entry(key).or_insert(f).clone()
}

/// Memoized [`build_selector`].
pub fn shared_selector(n: u32, x: u32, y: u32) -> Result<Arc<SetFamily>, SelectorError> {
    let key = (n, x, y);
    if let Some(f) = cache().lock().expect("cache poisoned").get(&key) {
        return Ok(f.clone());
    }
    let f = Arc::new(build_selector(n, x, y)?);
    Ok(cache().lock().expect("cache poisoned").entry(key).or_insert(f).clone())
}

fn random_pool_set(rng: &mut impl Rng, n: u32, x: u32) -> u64 {
    (0..n).filter(|_| rng.gen_range(0..x) == 0).fold(0u64, |m, v| m | 1 << v)
}

fn combinations(items: &[u32], k: usize, f: &mut impl FnMut(&[u32])) {
    fn go(items: &[u32], k: usize, start: usize, cur: &mut Vec<u32>, f: &mut impl FnMut(&[u32])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..=items.len() - (k - cur.len()) {
            cur.push(items[i]);
            go(items, k, i + 1, cur, f);
            cur.pop();
        }
    }
    if k <= items.len() {
        go(items, k, 0, &mut Vec::with_capacity(k), f);
    }
}
