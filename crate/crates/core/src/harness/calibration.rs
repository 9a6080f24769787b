//! The frozen calibration set the budget constants are fitted on, and the fitting rule: the largest
//! rounds-to-formula ratio observed, rounded up to three significant digits.

use super::config::{ExperimentConfig, InstanceSpec, OutputSpec, ParamsSpec, ScalarKind, DEFAULT_LIMIT};
use super::constants::{formula, formula_name, round_up, ConstantTable, Fitted};
use super::registry::ProtocolKind;
use super::Report;
use crate::protocols::btd::BtdPlan;
use crate::sinr::SinrParams;
use std::collections::BTreeMap;

pub const CALIBRATION_ID: &str = "v1: growth seeds 9000.. and lines; n in {5,12,40,100,200}; k in {1,4,20}";

const SIZES: [usize; 5] = [5, 12, 40, 100, 200];
const RUMORS: [usize; 3] = [1, 4, 20];

pub fn calibration_configs(kind: ProtocolKind) -> Vec<ExperimentConfig> {
    let mut out = Vec::new();
    for (i, &n) in SIZES.iter().enumerate() {
        for (j, &k) in RUMORS.iter().enumerate() {
            let seed = 9000 + (i * RUMORS.len() + j) as u64;
            for instance in [InstanceSpec::Growth { n, min_sep: 0.05, spread: 0.9, seed }, InstanceSpec::Line { n, spacing: 0.5 }] {
                out.push(ExperimentConfig {
                    protocol: kind,
                    setting: None,
                    instance,
                    k,
                    rumor_seed: Some(seed),
                    params: ParamsSpec::default(),
                    limit: DEFAULT_LIMIT,
                    audit: false,
                    scalar: ScalarKind::F64,
                    output: OutputSpec::default(),
                });
            }
        }
    }
    out
}

pub fn max_ratio(kind: ProtocolKind, reports: &[Report]) -> f64 {
    reports
        .iter()
        .filter_map(|r| Some(r.rounds as f64 / formula(kind, &r.shape())?))
        .fold(0.0, f64::max)
}

/// Rounds of one smallest-token invocation for an instance of `n` stations.
pub fn token_step_len(n: usize, id_space: u32, k: usize) -> u64 {
    BtdPlan::new(n, id_space, k).expect("selectors for the instance").step_len()
}

pub fn fit(reports: &BTreeMap<ProtocolKind, Vec<Report>>, version: u32) -> ConstantTable {
    let p = SinrParams::<f64>::default();
    let ratio = calibration_configs(ProtocolKind::Btd)
        .iter()
        .map(|c| {
            let net = c.instance.build(&p).expect("calibration instance");
            token_step_len(net.len(), net.id_space(), c.k) as f64 / super::constants::lg(net.len() as f64)
        })
        .fold(0.0, f64::max);
    let smallest_token = Fitted { formula: "lg n".into(), c: round_up(ratio), fitted_ratio: ratio };
    let protocols = reports
        .iter()
        .filter_map(|(&kind, rs)| {
            let ratio = max_ratio(kind, rs);
            Some((kind.name().to_string(), Fitted { formula: formula_name(kind)?.to_string(), c: round_up(ratio), fitted_ratio: ratio }))
        })
        .collect();
    ConstantTable { version, calibration: CALIBRATION_ID.to_string(), smallest_token, protocols }
}
