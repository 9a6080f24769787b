//! Newline-delimited JSON records and a flat CSV summary.

use super::sweep::SweepRow;
use super::Report;

pub const CSV_HEADER: &str =
    "cell,status,protocol,setting,generator,seed,rumor_seed,n,k,D,Delta,g,N,rounds,completion_round,completed,terminated,budget,within_budget,error";

pub fn ndjson_line<S: serde::Serialize>(record: &S) -> String {
    serde_json::to_string(record).expect("records serialize")
}

fn field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn csv_row(cell: usize, status: &str, r: Option<&Report>, error: Option<&str>) -> String {
    let cols: Vec<String> = match r {
        Some(r) => vec![
            r.protocol.to_string(),
            r.setting.clone(),
            r.generator.clone(),
            opt(r.seed),
            r.rumor_seed.to_string(),
            r.n.to_string(),
            r.k.to_string(),
            r.diameter.to_string(),
            r.max_degree.to_string(),
            format!("{:.6}", r.g),
            r.id_space.to_string(),
            r.rounds.to_string(),
            opt(r.completion_round),
            r.completed.to_string(),
            r.terminated.to_string(),
            opt(r.budget.map(|b| format!("{b:.3}"))),
            opt(r.within_budget),
        ],
        None => vec![String::new(); 17],
    };
    let mut all = vec![cell.to_string(), status.to_string()];
    all.extend(cols);
    all.push(error.unwrap_or("").to_string());
    all.iter().map(|s| field(s)).collect::<Vec<_>>().join(",")
}

pub fn status_name(s: super::Status) -> &'static str {
    match s {
        super::Status::Ok => "ok",
        super::Status::Incomplete => "incomplete",
        super::Status::Invariant => "invariant",
        super::Status::Config => "config",
    }
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&csv_row(r.cell, status_name(r.status), r.report.as_ref(), r.error.as_deref()));
        s.push('\n');
    }
    s
}

pub fn sweep_ndjson(rows: &[SweepRow]) -> String {
    rows.iter().map(|r| ndjson_line(r) + "\n").collect()
}
