//! Round-synchronous execution under the SINR oracle, with a knowledge gate, unit-size message
//! budget, non-spontaneous wakeup and trace recording.

mod knowledge;
mod message;
mod node;
mod run;
mod trace;

pub use knowledge::{KnowledgeError, KnowledgeView, Setting, World};
pub use message::{Message, Outgoing, Payload};
pub use node::{Annotation, Ctx, Node, Protocol, ProtocolError};
pub use run::{run_protocol, Coverage, EngineError, RunConfig, RunOutcome, Simulation, DEFAULT_C_MSG};
pub use trace::{audit_trace, AuditError, Delivery, RoundTrace, Trace, TRACE_SCHEMA_VERSION};
