//! Round-budget formulas and the fitted constants that scale them, read from a versioned data file.

use super::registry::ProtocolKind;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::OnceLock;

pub const CONSTANTS_TOML: &str = include_str!("../../data/constants.toml");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fitted {
    pub formula: String,
    pub c: f64,
    /// Largest ratio seen on the calibration set, before rounding up.
    pub fitted_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantTable {
    pub version: u32,
    pub calibration: String,
    /// Rounds of one smallest-token invocation against `lg n`.
    pub smallest_token: Fitted,
    pub protocols: BTreeMap<String, Fitted>,
}

impl ConstantTable {
    pub fn get(&self, kind: ProtocolKind) -> Option<&Fitted> {
        self.protocols.get(kind.name())
    }
}

pub fn constants() -> &'static ConstantTable {
    static TABLE: OnceLock<ConstantTable> = OnceLock::new();
    TABLE.get_or_init(|| toml::from_str(CONSTANTS_TOML).expect("constants.toml is well formed"))
}

/// Instance quantities the budgets depend on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Shape {
    pub n: usize,
    pub k: usize,
    pub diameter: usize,
    pub max_degree: usize,
    pub granularity: f64,
    pub id_space: u32,
}

/// `max(1, log₂ x)`.
pub fn lg(x: f64) -> f64 {
    x.log2().max(1.0)
}

pub fn formula_name(kind: ProtocolKind) -> Option<&'static str> {
    Some(match kind {
        ProtocolKind::CentralGranIndependent => "D + k lg Δ",
        ProtocolKind::CentralGranDependent => "D + k + lg g",
        ProtocolKind::LocalMulticast => "D lg² n + k lg Δ",
        ProtocolKind::GeneralMulticast => "(n + k) lg N",
        ProtocolKind::Btd => "(n + k) lg n",
        ProtocolKind::Flooding | ProtocolKind::IdRoundRobin => return None,
    })
}

pub fn formula(kind: ProtocolKind, s: &Shape) -> Option<f64> {
    let (n, k, d) = (s.n as f64, s.k as f64, s.diameter as f64);
    let delta = s.max_degree as f64;
    Some(match kind {
        ProtocolKind::CentralGranIndependent => d + k * lg(delta),
        ProtocolKind::CentralGranDependent => d + k + lg(s.granularity),
        ProtocolKind::LocalMulticast => d * lg(n).powi(2) + k * lg(delta),
        ProtocolKind::GeneralMulticast => (n + k) * lg(f64::from(s.id_space)),
        ProtocolKind::Btd => (n + k) * lg(n),
        ProtocolKind::Flooding | ProtocolKind::IdRoundRobin => return None,
    })
}

/// Round budget `C_P · formula` under the frozen constants.
pub fn budget(kind: ProtocolKind, s: &Shape) -> Option<f64> {
    Some(constants().get(kind)?.c * formula(kind, s)?)
}

/// Constant to freeze for a largest observed ratio: rounded up to three significant digits.
pub fn round_up(ratio: f64) -> f64 {
    if ratio <= 0.0 {
        return 0.0;
    }
    let scale = 10f64.powi(2 - ratio.log10().floor() as i32);
    (ratio * scale).ceil() / scale
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_covers_every_main_protocol() {
        let t = constants();
        for k in ProtocolKind::MAIN {
            let f = t.get(k).unwrap();
            assert_eq!(f.formula, formula_name(k).unwrap());
            assert!(f.c >= f.fitted_ratio && f.c > 0.0);
        }
        assert!(t.smallest_token.c >= t.smallest_token.fitted_ratio);
    }

    #[test]
    fn rounding_up_keeps_three_digits() {
        assert_eq!(round_up(123.41), 124.0);
        assert_eq!(round_up(0.5), 0.5);
        assert_eq!(round_up(9.991), 10.0);
    }

    #[test]
    fn formulas_on_a_small_shape() {
        let s = Shape { n: 16, k: 2, diameter: 3, max_degree: 4, granularity: 1.5, id_space: 64 };
        assert_eq!(formula(ProtocolKind::CentralGranIndependent, &s), Some(3.0 + 2.0 * 2.0));
        assert_eq!(formula(ProtocolKind::CentralGranDependent, &s), Some(3.0 + 2.0 + 1.0));
        assert_eq!(formula(ProtocolKind::LocalMulticast, &s), Some(3.0 * 16.0 + 2.0 * 2.0));
        assert_eq!(formula(ProtocolKind::GeneralMulticast, &s), Some(18.0 * 6.0));
        assert_eq!(formula(ProtocolKind::Btd, &s), Some(18.0 * 4.0));
        assert_eq!(formula(ProtocolKind::Flooding, &s), None);
    }
}
