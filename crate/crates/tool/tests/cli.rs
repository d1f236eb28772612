use std::process::{Command, Output};

fn clustermod(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_clustermod")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn a2_is_periodic_of_order_five() {
    let o = clustermod(&["classify", "--catalog", "a2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("Periodic, order 5"), "{}", stdout(&o));
}

#[test]
fn a2_explores_to_five_clusters() {
    let o = clustermod(&["explore", "--catalog", "a2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "finite type: 5 clusters");
}

#[test]
fn markov_does_not_close() {
    let o = clustermod(&["explore", "--catalog", "markov", "--depth", "3"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).starts_with("not closed within budget"));
}

#[test]
fn l2_is_pseudo_anosov_with_diagonal_ray() {
    let o = clustermod(&["classify", "--catalog", "lk:2"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("cluster-pA"), "{out}");
    assert!(out.contains("ray X Forward: (1, -1)"), "{out}");
}

#[test]
fn x7_named_word_is_reducible() {
    let o = clustermod(&["classify", "--catalog", "x7", "--word", "phi1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("ClusterReducible (proper)"));
}

#[test]
fn structured_classify_is_json() {
    let o = clustermod(&["classify", "--catalog", "a2", "--format", "structured"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["verdict"]["type"], "periodic");
    assert_eq!(v["verdict"]["order"], 5);
}

#[test]
fn mutate_prints_a_loadable_seed() {
    let o = clustermod(&["mutate", "--catalog", "a2", "--word", "mu 0; perm (0 1)"]);
    assert_eq!(o.status.code(), Some(0));
    let seed = clustermod::doc::parse_seed(&stdout(&o)).unwrap();
    assert_eq!(seed, clustermod::catalog::catalog("a2").unwrap().seed);
}

#[test]
fn exact_orbit_of_a2_returns_after_five() {
    let o = clustermod(&["orbit", "--catalog", "a2", "--flavor", "x", "--steps", "5"]);
    let out = stdout(&o);
    let rows: Vec<&str> = out.lines().collect();
    assert_eq!(rows.len(), 6);
    assert_eq!(rows[0], "0\t1\t1");
    assert_eq!(rows[1], "1\t2\t1");
    assert_eq!(rows[5], "5\t1\t1");
}

#[test]
fn seed_file_round_trip() {
    let dir = std::env::temp_dir().join(format!("clustermod-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("a2.json");
    std::fs::write(&path, r#"{"vertices": ["p", "q"], "epsilon": [["0", "1"], ["-1", "0"]]}"#).unwrap();
    let p = path.to_str().unwrap();
    let o = clustermod(&["validate", "--seed", p]);
    assert_eq!(o.status.code(), Some(0));
    let o = clustermod(&["classify", "--seed", p, "--word", "mu p; perm (p q)"]);
    assert!(stdout(&o).starts_with("Periodic, order 5"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn errors_exit_with_two() {
    let o = clustermod(&["mutate", "--catalog", "a2", "--word", "mu 9"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("InvalidStep"));
    let o = clustermod(&["classify", "--catalog", "nope"]);
    assert_eq!(o.status.code(), Some(2));
    let o = clustermod(&["classify", "--seed", "/nonexistent/seed.json", "--word", "mu 0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bad_seed_reports_position() {
    let dir = std::env::temp_dir().join(format!("clustermod-bad-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.json");
    std::fs::write(&path, "{\"vertices\": [\"0\", \"1\"],\n \"epsilon\": [[\"0\", \"1\"], [\"1\", \"0\"]]}").unwrap();
    let o = clustermod(&["validate", "--seed", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("ValidationError"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn output_is_deterministic() {
    let args = ["classify", "--catalog", "lk:3", "--format", "structured", "--rng-seed", "7"];
    assert_eq!(clustermod(&args).stdout, clustermod(&args).stdout);
}

#[test]
fn tiny_order_budget_is_inconclusive() {
    // With the order search cut short, a2 can no longer be shown periodic.
    let o = clustermod(&["classify", "--catalog", "a2", "--budget", "3"]);
    assert_eq!(o.status.code(), Some(3), "{}", stdout(&o));
}
