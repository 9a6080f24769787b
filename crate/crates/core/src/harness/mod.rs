//! Experiment runner: configuration, protocol dispatch, reports, sweeps and calibration.

pub mod calibration;
pub mod config;
pub mod constants;
pub mod output;
pub mod registry;
pub mod sweep;

pub use config::{ExperimentConfig, InstanceSpec, OutputSpec, ParamsSpec, ScalarKind, DEFAULT_LIMIT};
pub use constants::{budget, constants, formula, ConstantTable, Fitted, Shape};
pub use registry::{ExecError, Outcome, ProtocolKind, Scalar};
pub use sweep::{sweep, workers_from_env, Axis, SweepRow, WORKERS_ENV};

use crate::engine::RunConfig;
use crate::network::{NetworkInstance, RumorId, StationId};
use crate::sinr::compute_metrics;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("invariant violation: {0}")]
    Invariant(String),
}

/// Outcome class of a run, mapped to process exit codes by the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    Incomplete,
    Invariant,
    Config,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Incomplete => 1,
            Status::Invariant => 2,
            Status::Config => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub protocol: ProtocolKind,
    pub setting: String,
    pub generator: String,
    pub seed: Option<u64>,
    pub rumor_seed: u64,
    pub n: usize,
    pub k: usize,
    #[serde(rename = "D")]
    pub diameter: usize,
    #[serde(rename = "Delta")]
    pub max_degree: usize,
    pub g: f64,
    #[serde(rename = "N")]
    pub id_space: u32,
    pub rounds: u64,
    pub completion_round: Option<u64>,
    pub completed: bool,
    pub terminated: bool,
    pub audited: bool,
    pub formula: Option<String>,
    pub c: Option<f64>,
    pub constants_version: u32,
    pub budget: Option<f64>,
    pub within_budget: Option<bool>,
}

impl Report {
    pub fn status(&self) -> Status {
        if self.completed {
            Status::Ok
        } else {
            Status::Incomplete
        }
    }

    pub fn shape(&self) -> Shape {
        Shape {
            n: self.n,
            k: self.k,
            diameter: self.diameter,
            max_degree: self.max_degree,
            granularity: self.g,
            id_space: self.id_space,
        }
    }
}

/// Each of the `k` rumors starts at a station drawn uniformly from `seed`.
pub fn place_rumors<T: crate::Real>(net: &NetworkInstance<T>, k: usize, seed: u64) -> BTreeMap<StationId, BTreeSet<RumorId>> {
    let ids: Vec<StationId> = net.ids().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_0f_2b5);
    let mut m: BTreeMap<StationId, BTreeSet<RumorId>> = BTreeMap::new();
    for r in 0..k {
        m.entry(ids[rng.gen_range(0..ids.len())]).or_default().insert(RumorId(r as u32));
    }
    m
}

pub fn run(cfg: &ExperimentConfig) -> Result<Report, HarnessError> {
    run_detailed(cfg).map(|(r, _)| r)
}

/// Runs one experiment and keeps the trace and annotations alongside the report.
pub fn run_detailed(cfg: &ExperimentConfig) -> Result<(Report, Outcome), HarnessError> {
    match cfg.scalar {
        ScalarKind::F64 => run_typed::<f64>(cfg),
        ScalarKind::F32 => run_typed::<f32>(cfg),
    }
}

fn run_typed<T: Scalar>(cfg: &ExperimentConfig) -> Result<(Report, Outcome), HarnessError> {
    cfg.validate().map_err(HarnessError::Config)?;
    let p = cfg.params.to_params::<T>().map_err(HarnessError::Config)?;
    let net = cfg.instance.build(&p).map_err(|e| HarnessError::Config(e.to_string()))?;
    if cfg.k == 0 {
        return Err(HarnessError::Config("k must be positive".into()));
    }
    let m = compute_metrics(&net, &p);
    let shape = Shape {
        n: net.len(),
        k: cfg.k,
        diameter: m.diameter,
        max_degree: m.max_degree,
        granularity: m.granularity,
        id_space: net.id_space(),
    };
    let sources = place_rumors(&net, cfg.k, cfg.rumor_seed());
    let rc = RunConfig { limit: cfg.limit, record_trace: cfg.audit, declared_k: Some(cfg.k), ..RunConfig::default() };
    let out = T::execute(cfg.protocol, &net, &p, &sources, rc, cfg.audit).map_err(|e| match e {
        ExecError::Engine(e) if !e.is_invariant_violation() => HarnessError::Config(e.to_string()),
        e => HarnessError::Invariant(e.to_string()),
    })?;
    let fitted = constants::constants().get(cfg.protocol);
    let budget = constants::budget(cfg.protocol, &shape);
    let report = Report {
        schema: REPORT_SCHEMA_VERSION,
        protocol: cfg.protocol,
        setting: cfg.protocol.setting().to_string(),
        generator: cfg.instance.generator().to_string(),
        seed: cfg.instance.seed(),
        rumor_seed: cfg.rumor_seed(),
        n: shape.n,
        k: shape.k,
        diameter: shape.diameter,
        max_degree: shape.max_degree,
        g: shape.granularity,
        id_space: shape.id_space,
        rounds: out.rounds,
        completion_round: out.completion_round,
        completed: out.completed,
        terminated: out.terminated,
        audited: cfg.audit,
        formula: constants::formula_name(cfg.protocol).map(str::to_string),
        c: fitted.map(|f| f.c),
        constants_version: constants::constants().version,
        budget,
        within_budget: budget.map(|b| out.rounds as f64 <= b),
    };
    Ok((report, out))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(extra: &[(&str, &str)]) -> ExperimentConfig {
        let base = "protocol = \"btd\"\n[instance]\ngenerator = \"line\"\nn = 1\n";
        let o: Vec<(String, String)> = extra.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
        ExperimentConfig::parse(base, &o).unwrap()
    }

    #[test]
    fn single_station_run_is_immediate() {
        let r = run(&cfg(&[])).unwrap();
        assert_eq!((r.rounds, r.completed), (0, true));
        assert_eq!(r.status().exit_code(), 0);
    }

    #[test]
    fn flooding_stalls_on_a_lower_bound_instance() {
        let r = run(&cfg(&[("protocol", "\"flooding\""), ("instance", "{ generator = \"lower-bound\", delta = 8, j = 3 }"), ("limit", "200")])).unwrap();
        assert!(!r.completed);
        assert_eq!(r.status(), Status::Incomplete);
    }

    #[test]
    fn reruns_are_identical() {
        let c = cfg(&[("instance", "{ generator = \"growth\", n = 12, seed = 9 }"), ("k", "3")]);
        let a = serde_json::to_string(&run(&c).unwrap()).unwrap();
        let b = serde_json::to_string(&run(&c).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rumors_are_placed_reproducibly() {
        let net = crate::netgen::gen_line::<f64>(10, 0.5).unwrap();
        let a = place_rumors(&net, 5, 1);
        assert_eq!(a, place_rumors(&net, 5, 1));
        assert_eq!(a.values().map(|s| s.len()).sum::<usize>(), 5);
    }
}
