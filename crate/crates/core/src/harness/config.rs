//! Experiment configuration: a TOML document, dotted-key overrides on top, defaults underneath.

use super::registry::ProtocolKind;
use crate::engine::Setting;
use crate::netgen::{gen_growth, gen_line, gen_lower_bound_family, gen_random, read_instance, GenError};
use crate::network::NetworkInstance;
use crate::scalar::Real;
use crate::sinr::SinrParams;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

pub const DEFAULT_LIMIT: u64 = 4_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InstanceSpec {
    Growth {
        n: usize,
        #[serde(default = "default_min_sep")]
        min_sep: f64,
        #[serde(default = "default_spread")]
        spread: f64,
        seed: u64,
    },
    Random {
        n: usize,
        side: f64,
        #[serde(default = "default_min_sep")]
        min_sep: f64,
        seed: u64,
    },
    Line {
        n: usize,
        #[serde(default = "default_spacing")]
        spacing: f64,
    },
    LowerBound {
        delta: usize,
        j: usize,
    },
    File {
        path: PathBuf,
    },
}

fn default_min_sep() -> f64 {
    0.05
}
fn default_spread() -> f64 {
    0.9
}
fn default_spacing() -> f64 {
    0.5
}

impl InstanceSpec {
    pub fn generator(&self) -> &'static str {
        match self {
            InstanceSpec::Growth { .. } => "growth",
            InstanceSpec::Random { .. } => "random",
            InstanceSpec::Line { .. } => "line",
            InstanceSpec::LowerBound { .. } => "lower-bound",
            InstanceSpec::File { .. } => "file",
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            InstanceSpec::Growth { seed, .. } | InstanceSpec::Random { seed, .. } => Some(*seed),
            _ => None,
        }
    }

    pub fn build<T: Real>(&self, p: &SinrParams<T>) -> Result<NetworkInstance<T>, GenError> {
        match self {
            InstanceSpec::Growth { n, min_sep, spread, seed } => gen_growth(*n, T::lit(*min_sep), T::lit(*spread), *seed, p),
            InstanceSpec::Random { n, side, min_sep, seed } => gen_random(*n, T::lit(*side), T::lit(*min_sep), *seed, p),
            InstanceSpec::Line { n, spacing } => gen_line(*n, T::lit(*spacing)),
            InstanceSpec::LowerBound { delta, j } => gen_lower_bound_family(*delta, *j, p),
            InstanceSpec::File { path } => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| GenError::Params(format!("cannot read {}: {e}", path.display())))?;
                read_instance(&text)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamsSpec {
    pub alpha: f64,
    pub beta: f64,
    pub noise: f64,
    pub epsilon: f64,
    pub power: f64,
}

impl Default for ParamsSpec {
    fn default() -> Self {
        let p = SinrParams::<f64>::default();
        ParamsSpec { alpha: p.alpha, beta: p.beta, noise: p.noise, epsilon: p.epsilon, power: p.power }
    }
}

impl ParamsSpec {
    pub fn to_params<T: Real>(&self) -> Result<SinrParams<T>, String> {
        SinrParams::new(T::lit(self.alpha), T::lit(self.beta), T::lit(self.noise), T::lit(self.epsilon), T::lit(self.power))
            .map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarKind {
    #[default]
    F64,
    F32,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    pub ndjson: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub protocol: ProtocolKind,
    /// Checked against the protocol's own setting when given.
    #[serde(default)]
    pub setting: Option<Setting>,
    pub instance: InstanceSpec,
    #[serde(default = "default_k")]
    pub k: usize,
    /// Seed for placing rumors; the instance seed (or 0) when absent.
    #[serde(default)]
    pub rumor_seed: Option<u64>,
    #[serde(default)]
    pub params: ParamsSpec,
    #[serde(default = "default_limit")]
    pub limit: u64,
    #[serde(default = "default_audit")]
    pub audit: bool,
    #[serde(default)]
    pub scalar: ScalarKind,
    #[serde(default)]
    pub output: OutputSpec,
}

fn default_k() -> usize {
    1
}
fn default_limit() -> u64 {
    DEFAULT_LIMIT
}
fn default_audit() -> bool {
    true
}

impl ExperimentConfig {
    /// Parses `text` (possibly empty) after applying `key=value` overrides; values are read as
    /// TOML and fall back to plain strings.
    pub fn parse(text: &str, overrides: &[(String, String)]) -> Result<Self, String> {
        let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| e.to_string())?;
        table.remove("sweep");
        for (k, v) in overrides {
            set_dotted(&mut table, k, parse_value(v))?;
        }
        Self::from_table(table)
    }

    pub fn from_table(table: toml::Table) -> Result<Self, String> {
        let cfg: ExperimentConfig = toml::Value::Table(table).try_into().map_err(|e: toml::de::Error| e.to_string())?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.limit == 0 {
            return Err("limit must be positive".into());
        }
        if let Some(s) = self.setting {
            if s != self.protocol.setting() {
                return Err(format!("{} runs in the {} setting, not {s}", self.protocol, self.protocol.setting()));
            }
        }
        Ok(())
    }

    pub fn rumor_seed(&self) -> u64 {
        self.rumor_seed.or(self.instance.seed()).unwrap_or(0)
    }
}

pub fn parse_value(v: &str) -> toml::Value {
    format!("x = {v}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("x"))
        .unwrap_or_else(|| toml::Value::String(v.to_string()))
}

pub fn set_dotted(table: &mut toml::Table, key: &str, value: toml::Value) -> Result<(), String> {
    let mut parts: Vec<&str> = key.split('.').collect();
    let last = parts.pop().filter(|s| !s.is_empty()).ok_or_else(|| format!("empty key in override {key:?}"))?;
    let mut at = table;
    for p in parts {
        let entry = at.entry(p.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        at = entry.as_table_mut().ok_or_else(|| format!("{p} in {key} is not a table"))?;
    }
    at.insert(last.to_string(), value);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = "protocol = \"btd\"\nk = 2\n[instance]\ngenerator = \"growth\"\nn = 10\nseed = 4\n";

    #[test]
    fn defaults_fill_the_gaps() {
        let c = ExperimentConfig::parse(BASE, &[]).unwrap();
        assert_eq!(c.limit, DEFAULT_LIMIT);
        assert!(c.audit);
        assert_eq!(c.instance, InstanceSpec::Growth { n: 10, min_sep: 0.05, spread: 0.9, seed: 4 });
        assert_eq!(c.rumor_seed(), 4);
    }

    #[test]
    fn overrides_beat_the_file() {
        let o = [("k".to_string(), "5".to_string()), ("instance.n".to_string(), "30".to_string())];
        let c = ExperimentConfig::parse(BASE, &o).unwrap();
        assert_eq!(c.k, 5);
        assert!(matches!(c.instance, InstanceSpec::Growth { n: 30, .. }));
        let c = ExperimentConfig::parse(BASE, &[("protocol".into(), "flooding".into())]).unwrap();
        assert_eq!(c.protocol, ProtocolKind::Flooding);
    }

    #[test]
    fn mismatched_setting_is_rejected() {
        let o = [("setting".to_string(), "full-topology".to_string())];
        assert!(ExperimentConfig::parse(BASE, &o).unwrap_err().contains("neighbor-ids-only"));
        assert!(ExperimentConfig::parse(BASE, &[("limit".into(), "0".into())]).is_err());
        assert!(ExperimentConfig::parse(BASE, &[("protocol".into(), "gossip".into())]).is_err());
    }
}
