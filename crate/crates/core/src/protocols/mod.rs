//! Multi-broadcast protocols as per-node state machines, with their building blocks.

pub mod backbone;
pub mod baseline;
pub mod btd;
pub mod common;
pub mod multicast;
pub mod pipeline;

pub use backbone::{assemble_backbone, check_backbone, compute_backbone, Backbone, BoxRoles, Role, ROLE_SLOTS};
pub use baseline::{Flooding, IdRoundRobin};
pub use btd::{Btd, BtdNode};
pub use multicast::{CentralGranDependent, CentralGranIndependent, GeneralMulticast, LocalMulticast};
pub use pipeline::{Ctl, PipelineNode};
