//! Multi-broadcast in the SINR model: physical layer, combinatorial selectors, a synchronous
//! round engine, the broadcast protocols, instance generators and an experiment harness.

pub mod engine;
pub mod harness;
pub mod netgen;
pub mod network;
pub mod protocols;
pub mod scalar;
pub mod selectors;
pub mod sinr;

pub use network::{NetworkError, NetworkInstance, RumorId, Station, StationId, TransmissionSet};
pub use scalar::Real;
pub use sinr::{Point, SinrParams};

pub type Params = SinrParams<f64>;
pub type Network = NetworkInstance<f64>;
pub type Pt = Point<f64>;
