//! Regenerates `data/constants.toml`: `cargo test -p sinrcast --test calibration -- --ignored --nocapture`.

use rayon::prelude::*;
use sinrcast::harness::calibration::{calibration_configs, fit};
use sinrcast::harness::{constants, run, ProtocolKind, Report};
use std::collections::BTreeMap;

#[test]
#[ignore]
fn recalibrate() {
    let mut reports: BTreeMap<ProtocolKind, Vec<Report>> = BTreeMap::new();
    for kind in ProtocolKind::MAIN {
        let rs: Vec<Report> = calibration_configs(kind).par_iter().map(|c| run(c).unwrap()).collect();
        for r in &rs {
            assert!(r.completed, "{kind} failed on {r:?}");
            eprintln!("{kind} n={} k={} D={} Δ={} g={:.2} rounds={}", r.n, r.k, r.diameter, r.max_degree, r.g, r.rounds);
        }
        reports.insert(kind, rs);
    }
    let table = fit(&reports, constants().version + 1);
    println!("{}", toml::to_string(&table).unwrap());
}

#[test]
#[ignore]
fn token_constant() {
    let t = fit(&BTreeMap::new(), 0);
    println!("{}", toml::to_string(&t.smallest_token).unwrap());
}
