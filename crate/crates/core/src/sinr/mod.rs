//! Physical layer: reception oracle, geometry, pivotal grid, schedules and dilution.

mod dilution;
mod geometry;
mod graph;
mod grid;
mod oracle;
mod params;
mod schedule;

pub use dilution::{interference_ring_bound, min_dilution, safe_dilution_constant};
pub use geometry::Point;
pub use graph::{communication_graph, compute_metrics, metrics_of, CommGraph, Metrics};
pub use grid::{dir_set, grid_box, pivotal_box, GridCoord, DIR_LEN};
pub use oracle::{receives, receives_at, sinr_value, OracleError};
pub use params::{ParamsError, SinrParams};
pub use schedule::{dilute, Schedule, ScheduleError};
