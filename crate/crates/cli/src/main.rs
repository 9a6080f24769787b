//! `sinrcast`: run, sweep, generate, verify and attack multi-broadcast protocols in the SINR model.
//!
//! Exit codes: 0 success, 1 incomplete broadcast, 2 invariant violation, 3 configuration error.

use clap::{Args, Parser, Subcommand};
use sinrcast::harness::output::{csv_row, ndjson_line, status_name, sweep_csv, sweep_ndjson, CSV_HEADER};
use sinrcast::harness::{
    run, sweep, workers_from_env, Axis, ExperimentConfig, HarnessError, InstanceSpec, ProtocolKind, Report, Scalar, Status,
};
use sinrcast::netgen::{blocking_threshold, read_instance, write_instance};
use sinrcast::protocols::{check_backbone, compute_backbone};
use sinrcast::selectors::{build_selector, build_ssf, selector_length_bound, ssf_length_bound, verify_selector, verify_ssf};
use sinrcast::sinr::{communication_graph, metrics_of};
use sinrcast::Params;
use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "sinrcast", version, about = "Deterministic multi-broadcast in the SINR model")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one experiment and print its report as JSON.
    Run(RunArgs),
    /// Run the Cartesian product of axis values over a base configuration.
    Sweep(SweepArgs),
    /// Generate an instance file.
    Gen(GenArgs),
    /// Check selector families or an instance and its backbone.
    Verify {
        #[command(subcommand)]
        what: VerifyCmd,
    },
    /// Run the lower-bound adversary against a protocol.
    Adversary(AdversaryArgs),
}

#[derive(Args)]
struct ConfigArgs {
    /// TOML configuration file; omitted means everything comes from --set.
    config: Option<PathBuf>,
    /// Override a configuration key, e.g. `--set instance.n=50` (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Append NDJSON records to this file.
    #[arg(long)]
    ndjson: Option<PathBuf>,
    /// Append CSV rows to this file (header written when new).
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    cfg: ConfigArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    cfg: ConfigArgs,
    /// Axis `key=v1,v2,...` (repeatable); adds to the `[sweep]` table of the file.
    #[arg(long = "axis", value_name = "KEY=VALUES")]
    axes: Vec<String>,
}

#[derive(Args)]
struct GenArgs {
    /// growth, random, line or lower-bound.
    #[arg(long, default_value = "growth")]
    generator: String,
    #[arg(long, default_value_t = 50)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.05)]
    min_sep: f64,
    #[arg(long, default_value_t = 0.9)]
    spread: f64,
    #[arg(long, default_value_t = 4.0)]
    side: f64,
    #[arg(long, default_value_t = 0.5)]
    spacing: f64,
    #[arg(long, default_value_t = 8)]
    delta: usize,
    #[arg(long, default_value_t = 0)]
    j: usize,
    /// Write here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Build and exactly verify an (N, x)-strongly-selective family.
    Ssf {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        x: u32,
    },
    /// Build and verify an (N, x, y)-selector.
    Selector {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        x: u32,
        #[arg(long)]
        y: u32,
    },
    /// Parse an instance file, report its metrics and check its backbone.
    Instance { path: PathBuf },
}

#[derive(Args)]
struct AdversaryArgs {
    #[arg(long)]
    protocol: String,
    #[arg(long)]
    delta: usize,
    #[arg(long, default_value_t = 20_000)]
    limit: u64,
}

struct Fail(Status, String);

impl From<HarnessError> for Fail {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Config(m) => Fail(Status::Config, m),
            HarnessError::Invariant(m) => Fail(Status::Invariant, m),
        }
    }
}

fn config_err(e: impl ToString) -> Fail {
    Fail(Status::Config, e.to_string())
}

fn parse_overrides(v: &[String]) -> Result<Vec<(String, String)>, Fail> {
    v.iter()
        .map(|s| s.split_once('=').map(|(a, b)| (a.trim().to_string(), b.trim().to_string())).ok_or_else(|| config_err(format!("override {s:?} is not KEY=VALUE"))))
        .collect()
}

fn read_text(path: Option<&Path>) -> Result<String, Fail> {
    match path {
        Some(p) => std::fs::read_to_string(p).map_err(|e| config_err(format!("cannot read {}: {e}", p.display()))),
        None => Ok(String::new()),
    }
}

fn append(path: &Path, text: &str, header: Option<&str>) -> Result<(), Fail> {
    let fresh = std::fs::metadata(path).map_or(true, |m| m.len() == 0);
    let mut f = OpenOptions::new().create(true).append(true).open(path).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
    let mut out = String::new();
    if let (true, Some(h)) = (fresh, header) {
        out.push_str(h);
        out.push('\n');
    }
    out.push_str(text);
    f.write_all(out.as_bytes()).map_err(|e| config_err(format!("{}: {e}", path.display())))
}

fn outputs(cfg: &ConfigArgs, file: &sinrcast::harness::OutputSpec) -> (Option<PathBuf>, Option<PathBuf>) {
    (cfg.ndjson.clone().or(file.ndjson.clone()), cfg.csv.clone().or(file.csv.clone()))
}

fn cmd_run(a: &RunArgs) -> Result<Status, Fail> {
    let text = read_text(a.cfg.config.as_deref())?;
    let cfg = ExperimentConfig::parse(&text, &parse_overrides(&a.cfg.overrides)?).map_err(config_err)?;
    let report: Report = run(&cfg)?;
    let line = ndjson_line(&report);
    println!("{line}");
    let (nd, csv) = outputs(&a.cfg, &cfg.output);
    if let Some(p) = nd {
        append(&p, &(line + "\n"), None)?;
    }
    if let Some(p) = csv {
        append(&p, &(csv_row(0, status_name(report.status()), Some(&report), None) + "\n"), Some(CSV_HEADER))?;
    }
    Ok(report.status())
}

fn cmd_sweep(a: &SweepArgs) -> Result<Status, Fail> {
    let text = read_text(a.cfg.config.as_deref())?;
    let mut table: toml::Table = text.parse().map_err(config_err)?;
    let mut axes = Axis::from_table(&table).map_err(config_err)?;
    for s in &a.axes {
        let ax = Axis::parse(s).map_err(config_err)?;
        axes.retain(|x| x.key != ax.key);
        axes.push(ax);
    }
    for (k, v) in parse_overrides(&a.cfg.overrides)? {
        sinrcast::harness::config::set_dotted(&mut table, &k, sinrcast::harness::config::parse_value(&v)).map_err(config_err)?;
    }
    let file_out: sinrcast::harness::OutputSpec = table
        .get("output")
        .cloned()
        .map(|v| v.try_into())
        .transpose()
        .map_err(|e: toml::de::Error| config_err(e))?
        .unwrap_or_default();
    let workers = workers_from_env().map_err(config_err)?;
    let rows = sweep(&table, &axes, workers).map_err(config_err)?;
    let nd = sweep_ndjson(&rows);
    print!("{nd}");
    let (ndp, csvp) = outputs(&a.cfg, &file_out);
    if let Some(p) = ndp {
        append(&p, &nd, None)?;
    }
    if let Some(p) = csvp {
        let csv = sweep_csv(&rows);
        let body = csv.split_once('\n').map_or("", |(_, b)| b);
        append(&p, body, Some(CSV_HEADER))?;
    }
    Ok(rows.iter().map(|r| r.status).max_by_key(|s| s.exit_code()).unwrap_or(Status::Ok))
}

fn cmd_gen(a: &GenArgs) -> Result<Status, Fail> {
    let spec = match a.generator.as_str() {
        "growth" => InstanceSpec::Growth { n: a.n, min_sep: a.min_sep, spread: a.spread, seed: a.seed },
        "random" => InstanceSpec::Random { n: a.n, side: a.side, min_sep: a.min_sep, seed: a.seed },
        "line" => InstanceSpec::Line { n: a.n, spacing: a.spacing },
        "lower-bound" => InstanceSpec::LowerBound { delta: a.delta, j: a.j },
        g => return Err(config_err(format!("unknown generator {g:?}"))),
    };
    let p = Params::default();
    let net = spec.build(&p).map_err(config_err)?;
    let text = write_instance(&net, &p);
    match &a.out {
        Some(path) => std::fs::write(path, text).map_err(|e| config_err(format!("{}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(Status::Ok)
}

fn cmd_verify(w: &VerifyCmd) -> Result<Status, Fail> {
    let bad = |m: String| Fail(Status::Invariant, m);
    match *w {
        VerifyCmd::Ssf { n, x } => {
            let f = build_ssf(n, x).map_err(config_err)?;
            if !verify_ssf(&f, n, x) {
                return Err(bad(format!("({n},{x})-SSF fails verification")));
            }
            if f.len() > ssf_length_bound(n, x) {
                return Err(bad(format!("({n},{x})-SSF length {} exceeds {}", f.len(), ssf_length_bound(n, x))));
            }
            println!("{}", serde_json::json!({ "family": "ssf", "N": n, "x": x, "length": f.len(), "bound": ssf_length_bound(n, x), "verified": true }));
        }
        VerifyCmd::Selector { n, x, y } => {
            let f = build_selector(n, x, y).map_err(config_err)?;
            if !verify_selector(&f, n, x, y).map_err(config_err)? {
                return Err(bad(format!("({n},{x},{y})-selector fails verification")));
            }
            println!("{}", serde_json::json!({ "family": "selector", "N": n, "x": x, "y": y, "length": f.len(), "bound": selector_length_bound(n, x), "verified": true }));
        }
        VerifyCmd::Instance { ref path } => {
            let text = read_text(Some(path))?;
            let net = read_instance::<f64>(&text).map_err(config_err)?;
            let p = Params::default();
            let g = communication_graph(&net, &p);
            let m = metrics_of(&net, &p, &g);
            let bb = compute_backbone(&net, &p, &g);
            check_backbone(&bb, &net, &p, &g).map_err(bad)?;
            println!(
                "{}",
                serde_json::json!({ "n": net.len(), "N": net.id_space(), "D": m.diameter, "Delta": m.max_degree, "g": m.granularity, "connected": m.connected, "backbone_members": bb.members().len(), "backbone": "ok" })
            );
        }
    }
    Ok(Status::Ok)
}

fn cmd_adversary(a: &AdversaryArgs) -> Result<Status, Fail> {
    let kind: ProtocolKind = a.protocol.parse().map_err(config_err)?;
    let p = Params::default();
    let rep = f64::adversary(kind, a.delta, &p, a.limit).map_err(config_err)?;
    let bound = (a.delta / blocking_threshold(&p)).saturating_sub(1) as u64;
    let ok = rep.forced_rounds >= bound;
    println!(
        "{}",
        serde_json::json!({ "protocol": kind.name(), "delta": a.delta, "c": rep.c, "forced_rounds": rep.forced_rounds, "bound": bound, "holds": ok, "final_survivors": rep.final_survivors, "divergence_removals": rep.divergence_removals })
    );
    Ok(if ok { Status::Ok } else { Status::Invariant })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.cmd {
        Cmd::Run(a) => cmd_run(a),
        Cmd::Sweep(a) => cmd_sweep(a),
        Cmd::Gen(a) => cmd_gen(a),
        Cmd::Verify { what } => cmd_verify(what),
        Cmd::Adversary(a) => cmd_adversary(a),
    };
    let status = match res {
        Ok(s) => s,
        Err(Fail(s, msg)) => {
            eprintln!("sinrcast: {msg}");
            s
        }
    };
    ExitCode::from(status.exit_code() as u8)
}
