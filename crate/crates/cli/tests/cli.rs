use std::process::{Command, Output};

fn sinrcast(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_sinrcast"));
    c.args(args).env_remove("SINRCAST_WORKERS");
    for (k, v) in envs {
        c.env(k, v);
    }
    c.output().unwrap()
}

fn json(out: &Output) -> Vec<serde_json::Value> {
    String::from_utf8_lossy(&out.stdout).lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn run_prints_a_report_and_exits_zero() {
    let out = sinrcast(&["run", "--set", "protocol=btd", "--set", "instance.generator=line", "--set", "instance.n=5", "--set", "k=2"], &[]);
    assert_eq!(out.status.code(), Some(0));
    let r = &json(&out)[0];
    assert_eq!(r["completed"], true);
    assert_eq!(r["n"], 5);
    assert_eq!(r["within_budget"], true);
}

#[test]
fn file_values_yield_to_overrides_and_outputs_append() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("e.toml");
    std::fs::write(&cfg, "protocol = \"central-gran-independent\"\nk = 3\n[instance]\ngenerator = \"growth\"\nn = 12\nseed = 4\n").unwrap();
    let nd = dir.path().join("r.ndjson");
    let csv = dir.path().join("r.csv");
    for _ in 0..2 {
        let out = sinrcast(
            &["run", cfg.to_str().unwrap(), "--set", "k=1", "--ndjson", nd.to_str().unwrap(), "--csv", csv.to_str().unwrap()],
            &[],
        );
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(json(&out)[0]["k"], 1);
    }
    assert_eq!(std::fs::read_to_string(&nd).unwrap().lines().count(), 2);
    let rows: Vec<String> = std::fs::read_to_string(&csv).unwrap().lines().map(String::from).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[0].starts_with("cell,status,"));
    assert_eq!(rows[1], rows[2]);
}

#[test]
fn a_stalled_broadcast_exits_one() {
    let out = sinrcast(
        &["run", "--set", "protocol=flooding", "--set", "instance.generator=lower-bound", "--set", "instance.delta=8", "--set", "instance.j=1", "--set", "limit=300"],
        &[],
    );
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)[0]["completed"], false);
}

#[test]
fn bad_configuration_exits_three() {
    assert_eq!(sinrcast(&["run", "--set", "protocol=gossip"], &[]).status.code(), Some(3));
    assert_eq!(sinrcast(&["run", "/nonexistent/cfg.toml"], &[]).status.code(), Some(3));
    assert_eq!(sinrcast(&["run", "--set", "k"], &[]).status.code(), Some(3));
}

#[test]
fn sweep_runs_the_grid_in_cell_order() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("s.toml");
    std::fs::write(&cfg, "protocol = \"btd\"\n[instance]\ngenerator = \"line\"\nn = 4\n[sweep]\nk = [1, 2]\n").unwrap();
    let out = sinrcast(&["sweep", cfg.to_str().unwrap(), "--axis", "instance.n=3,5"], &[("SINRCAST_WORKERS", "3")]);
    assert_eq!(out.status.code(), Some(0));
    let rows = json(&out);
    assert_eq!(rows.len(), 4);
    for (i, r) in rows.iter().enumerate() {
        assert_eq!(r["cell"], i);
        assert_eq!(r["status"], "ok");
    }
    assert_eq!(rows[1]["report"]["n"], 5);
    assert_eq!(rows[2]["report"]["k"], 2);
}

#[test]
fn sweep_rejects_a_bad_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("s.toml");
    std::fs::write(&cfg, "protocol = \"btd\"\n[instance]\ngenerator = \"line\"\nn = 3\n").unwrap();
    for bad in ["0", "many"] {
        assert_eq!(sinrcast(&["sweep", cfg.to_str().unwrap()], &[("SINRCAST_WORKERS", bad)]).status.code(), Some(3));
    }
}

#[test]
fn generated_instances_verify() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("g.txt");
    let out = sinrcast(&["gen", "--generator", "growth", "--n", "20", "--seed", "7", "--out", inst.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(0));
    let v = sinrcast(&["verify", "instance", inst.to_str().unwrap()], &[]);
    assert_eq!(v.status.code(), Some(0));
    let m = &json(&v)[0];
    assert_eq!(m["n"], 20);
    assert_eq!(m["connected"], true);
    assert_eq!(m["backbone"], "ok");
    // stdout generation matches the file
    let again = sinrcast(&["gen", "--generator", "growth", "--n", "20", "--seed", "7"], &[]);
    assert_eq!(again.stdout, std::fs::read(&inst).unwrap());
}

#[test]
fn verify_rejects_an_unparseable_instance() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("bad.txt");
    std::fs::write(&inst, "this is not an instance\n").unwrap();
    assert_eq!(sinrcast(&["verify", "instance", inst.to_str().unwrap()], &[]).status.code(), Some(3));
}

#[test]
fn selector_families_verify() {
    let s = sinrcast(&["verify", "ssf", "--n", "16", "--x", "3"], &[]);
    assert_eq!(s.status.code(), Some(0));
    assert_eq!(json(&s)[0]["verified"], true);
    let s = sinrcast(&["verify", "selector", "--n", "12", "--x", "4", "--y", "2"], &[]);
    assert_eq!(s.status.code(), Some(0));
    assert!(json(&s)[0]["length"].as_u64().unwrap() <= json(&s)[0]["bound"].as_u64().unwrap());
}

#[test]
fn adversary_meets_the_bound() {
    let out = sinrcast(&["adversary", "--protocol", "btd", "--delta", "12"], &[]);
    assert_eq!(out.status.code(), Some(0));
    let r = &json(&out)[0];
    assert_eq!(r["holds"], true);
    assert!(r["forced_rounds"].as_u64().unwrap() >= r["bound"].as_u64().unwrap());
    assert_eq!(sinrcast(&["adversary", "--protocol", "nobody", "--delta", "8"], &[]).status.code(), Some(3));
}
