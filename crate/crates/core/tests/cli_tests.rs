use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use reinforced_perc::environment::parse_environment_table;

const BIN: &str = env!("CARGO_BIN_EXE_reinforced-perc");

fn theta_config(out: &Path, replicas: u64) -> String {
    format!(
        r#"master_seed = 7
output = "{}"

[graph]
kind = "integer_lattice"
dim = 1

[window]
base_radius = 6
height = 6

[region]
model = "overlap"
law = {{ kind = "geometric", theta = 0.5 }}

[estimator]
kind = "theta"
p = [0.3, 0.4, 0.5]
q = [0.8, 0.9, 0.95]
replicas = {replicas}
"#,
        out.display()
    )
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn reinforced(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().unwrap()
}

fn run_theta(dir: &Path, tag: &str, threads: &str) -> String {
    let out = dir.join(tag);
    let cfg = write_config(dir, &format!("{tag}.toml"), &theta_config(&out, 300));
    let res = reinforced(&["run", cfg.to_str().unwrap(), "--threads", threads]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    assert!(!out.join("PARTIAL").exists());
    std::fs::read_to_string(out.join("estimates.csv")).unwrap()
}

#[test]
fn theta_grid_writes_one_row_per_point() {
    let dir = tempfile::tempdir().unwrap();
    let csv = run_theta(dir.path(), "grid", "1");
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "estimator,params,point,half_width,replicas,censored_fraction,wall_time");
    assert_eq!(lines.len(), 10);
    for line in &lines[1..] {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 7, "{line}");
        assert_eq!(cols[0], "theta");
        let point: f64 = cols[2].parse().unwrap();
        assert!((0.0..=1.0).contains(&point));
        assert_eq!(cols[4], "300");
        assert_eq!(cols[6], "");
    }
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("grid/manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["complete"], true);
    assert_eq!(manifest["rows"], 9);
    assert_eq!(manifest["master_seed"], 7);
    assert_eq!(manifest["config_sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn output_is_reproducible_and_thread_independent() {
    let dir = tempfile::tempdir().unwrap();
    let first = run_theta(dir.path(), "a", "1");
    assert_eq!(first, run_theta(dir.path(), "b", "1"));
    assert_eq!(first, run_theta(dir.path(), "c", "4"));
    assert_eq!(first, run_theta(dir.path(), "d", "16"));
}

#[test]
fn invalid_config_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.toml", &theta_config(&dir.path().join("o"), 0));
    let res = reinforced(&["run", cfg.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&res.stderr).contains("estimator.replicas"));
    assert!(!dir.path().join("o").exists());

    let res = reinforced(&["run", dir.path().join("missing.toml").to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(1));
    assert_eq!(reinforced(&["frobnicate"]).status.code(), Some(1));
}

#[test]
fn verify_exit_codes() {
    let res = reinforced(&["verify", "identities"]);
    assert_eq!(res.status.code(), Some(0));
    let table = String::from_utf8_lossy(&res.stdout);
    assert!(table.lines().count() > 3);
    assert!(!table.contains("FAIL"));

    let res = reinforced(&["verify", "oracle", "--instances", "20"]);
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stdout));

    let res = reinforced(&["verify", "statistics", "--replicas", "100"]);
    assert_eq!(res.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&res.stdout).contains("low-power"));
}

#[test]
fn dumped_environment_parses_back() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "env.toml", &theta_config(&dir.path().join("o"), 5));
    let target = dir.path().join("env.txt");
    let res = reinforced(&["dump-env", cfg.to_str().unwrap(), "--index", "3", "--out", target.to_str().unwrap()]);
    assert!(res.status.success());
    let text = std::fs::read_to_string(&target).unwrap();
    let env = parse_environment_table(&text).unwrap();
    assert!(env.half_range() >= 6);
    let res = reinforced(&["dump-env", cfg.to_str().unwrap(), "--index", "3"]);
    assert_eq!(String::from_utf8(res.stdout).unwrap(), text);
}

#[test]
fn bounds_verb_prints_csv() {
    let res = reinforced(&[
        "bounds",
        "--graph",
        "integer_lattice dim=1",
        "--law",
        "geometric theta=0.5",
        "--decay-rate",
        "0.65",
    ]);
    assert!(res.status.success());
    let csv = String::from_utf8(res.stdout).unwrap();
    assert!(csv.starts_with("quantity,"));
    assert!(csv.lines().any(|l| l.starts_with("n0,")));
    let res = reinforced(&["bounds", "--graph", "hypercube", "--law", "geometric theta=0.5", "--decay-rate", "1"]);
    assert_eq!(res.status.code(), Some(1));
}
