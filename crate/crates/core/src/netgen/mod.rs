//! Instance generators, the lower-bound family with its adversary, and the instance text format.

mod adversary;
mod format;
mod lower_bound;
mod random;

pub use adversary::{adversary_run, AdversaryError, AdversaryReport};
pub use format::{read_instance, write_instance};
pub use lower_bound::{blocking_threshold, chain_networks, family_ids, gen_lower_bound_family};
pub use random::{default_id_space, gen_growth, gen_line, gen_random};
pub use crate::sinr::{compute_metrics, Metrics};

use crate::network::NetworkError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GenError {
    #[error("invalid generator parameters: {0}")]
    Params(String),
    #[error("could only place {placed} of {n} stations at the requested separation")]
    Infeasible { placed: usize, n: usize },
    #[error("no connected instance after {attempts} attempts")]
    NotConnected { attempts: u64 },
    #[error("lower-bound instance fails its structural check: {0}")]
    Structure(String),
    #[error("malformed instance text at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Network(#[from] NetworkError),
}
