//! Cartesian sweeps over configuration keys, run on a bounded worker pool.

use super::config::{parse_value, set_dotted, ExperimentConfig};
use super::{run, HarnessError, Report, Status};
use rayon::prelude::*;
use serde::Serialize;

pub const WORKERS_ENV: &str = "SINRCAST_WORKERS";

/// Worker count from `SINRCAST_WORKERS`, else the available parallelism.
pub fn workers_from_env() -> Result<usize, String> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(w) if w > 0 => Ok(w),
            _ => Err(format!("{WORKERS_ENV} must be a positive integer, got {v:?}")),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub key: String,
    pub values: Vec<toml::Value>,
}

impl Axis {
    /// Parses `key=v1,v2,...`.
    pub fn parse(spec: &str) -> Result<Axis, String> {
        let (key, vals) = spec.split_once('=').ok_or_else(|| format!("axis {spec:?} is not key=v1,v2,..."))?;
        let values: Vec<toml::Value> = vals.split(',').map(|v| parse_value(v.trim())).collect();
        Ok(Axis { key: key.trim().to_string(), values })
    }

    /// Axes from a `[sweep]` table mapping keys to arrays.
    pub fn from_table(t: &toml::Table) -> Result<Vec<Axis>, String> {
        let Some(s) = t.get("sweep") else { return Ok(Vec::new()) };
        let s = s.as_table().ok_or("sweep must be a table")?;
        s.iter()
            .map(|(k, v)| match v {
                toml::Value::Array(a) => Ok(Axis { key: k.clone(), values: a.clone() }),
                _ => Err(format!("sweep axis {k} must be an array")),
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub cell: usize,
    pub assignment: Vec<(String, String)>,
    pub status: Status,
    pub error: Option<String>,
    pub report: Option<Report>,
}

fn cells(axes: &[Axis]) -> Vec<Vec<(String, toml::Value)>> {
    let mut out = vec![Vec::new()];
    for a in axes {
        out = out
            .into_iter()
            .flat_map(|c| {
                a.values.iter().map(move |v| {
                    let mut c = c.clone();
                    c.push((a.key.clone(), v.clone()));
                    c
                })
            })
            .collect();
    }
    out
}

fn run_cell(base: &toml::Table, cell: usize, assignment: Vec<(String, toml::Value)>) -> SweepRow {
    let mut t = base.clone();
    t.remove("sweep");
    let shown = assignment.iter().map(|(k, v)| (k.clone(), v.to_string())).collect();
    let res = assignment
        .into_iter()
        .try_for_each(|(k, v)| set_dotted(&mut t, &k, v))
        .and_then(|_| ExperimentConfig::from_table(t))
        .map_err(HarnessError::Config)
        .and_then(|c| run(&c));
    let (status, error, report) = match res {
        Ok(r) => (r.status(), None, Some(r)),
        Err(HarnessError::Config(e)) => (Status::Config, Some(e), None),
        Err(HarnessError::Invariant(e)) => (Status::Invariant, Some(e), None),
    };
    SweepRow { cell, assignment: shown, status, error, report }
}

/// One run per point of the axes' product, in cell order regardless of scheduling. Failed cells
/// are reported in their row and do not stop the sweep.
pub fn sweep(base: &toml::Table, axes: &[Axis], workers: usize) -> Result<Vec<SweepRow>, String> {
    let cells = cells(axes);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build().map_err(|e| e.to_string())?;
    let mut rows: Vec<SweepRow> =
        pool.install(|| cells.into_par_iter().enumerate().map(|(i, a)| run_cell(base, i, a)).collect());
    rows.sort_by_key(|r| r.cell);
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> toml::Table {
        "protocol = \"btd\"\n[instance]\ngenerator = \"line\"\nn = 3\n".parse().unwrap()
    }

    #[test]
    fn empty_axes_give_one_run() {
        let rows = sweep(&base(), &[], 2).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].status, Status::Ok);
    }

    #[test]
    fn two_by_three_gives_six_rows_in_order() {
        let axes = [Axis::parse("k=1,2").unwrap(), Axis::parse("instance.n=2,3,4").unwrap()];
        let rows = sweep(&base(), &axes, 3).unwrap();
        assert_eq!(rows.len(), 6);
        assert!(rows.iter().enumerate().all(|(i, r)| r.cell == i && r.status == Status::Ok));
        assert_eq!(rows[5].report.as_ref().map(|r| (r.k, r.n)), Some((2, 4)));
    }

    #[test]
    fn bad_cells_are_flagged_and_the_rest_run() {
        let axes = [Axis::parse("protocol=\"btd\",\"gossip\"").unwrap()];
        let rows = sweep(&base(), &axes, 1).unwrap();
        assert_eq!(rows[0].status, Status::Ok);
        assert_eq!(rows[1].status, Status::Config);
    }
}
