//! End-to-end runs of the `cobound` binary.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn cobound(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_cobound"))
        .args(args)
        .env_remove("COBOUND_BUDGET")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    let mut pipe = child.stdin.take().unwrap();
    pipe.write_all(stdin.unwrap_or("").as_bytes()).unwrap();
    drop(pipe);
    child.wait_with_output().unwrap()
}

fn ok_json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn error_kind(out: &Output) -> String {
    let err: Value = serde_json::from_slice(&out.stderr).expect("stderr is JSON");
    err["error"].as_str().unwrap().to_string()
}

fn generate(family: &[&str]) -> String {
    let mut args = vec!["gen"];
    args.extend(family);
    let out = cobound(&args, None);
    assert!(out.status.success());
    String::from_utf8(out.stdout).unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn expansion_of_a_generated_cycle() {
    let c6 = generate(&["cycle", "6"]);
    let report = ok_json(&cobound(&["expansion", "--dim", "0", "--workers", "1"], Some(&c6)));
    assert_eq!(report["tool"], "cobound");
    assert_eq!(report["exact"], true);
    assert_eq!(report["result"]["lambda"], "2/3");
    assert_eq!(report["config"]["table_limit"], 1 << 22);
}

#[test]
fn csv_output_has_header_and_row() {
    let c4 = generate(&["cycle", "4"]);
    let out = cobound(&["expansion", "--dim", "0", "--format", "csv"], Some(&c4));
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "# cobound expansion csv v1");
    assert_eq!(lines[1], cobound::expansion::CSV_HEADER);
    assert!(lines[2].starts_with("cycle(4),0,z2,cocycle,1,1,"));
}

#[test]
fn nontrivial_class_gives_zero() {
    let rp2 = generate(&["rp2"]);
    let report = ok_json(&cobound(
        &["expansion", "--dim", "1", "--variant", "coboundary"],
        Some(&rp2),
    ));
    assert_eq!(report["result"]["lambda"], "0/1");
}

#[test]
fn broken_complex_is_rejected() {
    let bad = r#"{"name":"bad","dim":2,"cells":[3,3,1],"incidence":{
        "1":[[[0,-1],[1,1]],[[1,-1],[2,1]],[[0,1],[2,-1]]],
        "2":[[[0,1],[1,1],[2,-1]]]}}"#;
    let out = cobound(&["check"], Some(bad));
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(error_kind(&out), "BoundaryNotSquareZero");
}

#[test]
fn check_reports_manifold_structure() {
    let t = generate(&["torus2"]);
    let report = ok_json(&cobound(&["check"], Some(&t)));
    assert_eq!(report["result"]["closed_manifold"], true);
}

#[test]
fn oversized_table_exits_with_code_two() {
    let t = generate(&["torus2"]);
    let out = cobound(
        &[
            "expansion",
            "--dim",
            "1",
            "--algo",
            "full-table",
            "--table-limit",
            "1024",
        ],
        Some(&t),
    );
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_kind(&out), "TableTooLarge");
}

#[test]
fn budget_comes_from_the_environment() {
    let c5 = generate(&["cycle", "5"]);
    let out = Command::new(env!("CARGO_BIN_EXE_cobound"))
        .args(["expansion", "--dim", "0", "--complex", "-"])
        .env("COBOUND_BUDGET", "12345")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .and_then(|mut child| {
            child.stdin.take().unwrap().write_all(c5.as_bytes())?;
            child.wait_with_output()
        })
        .unwrap();
    let report = ok_json(&out);
    assert_eq!(report["config"]["budget"], 12345);
}

#[test]
fn reports_do_not_depend_on_worker_count() {
    let k6 = generate(&["simplex_skeleton", "5", "1"]);
    let one = cobound(&["expansion", "--dim", "0", "--workers", "1"], Some(&k6));
    let many = cobound(&["expansion", "--dim", "0", "--workers", "4"], Some(&k6));
    assert!(one.status.success() && many.status.success());
    assert_eq!(one.stdout, many.stdout);
}

#[test]
fn dual_and_expander_filling() {
    let dir = tempfile::tempdir().unwrap();
    let s3 = write(dir.path(), "s3.json", &generate(&["simplex_boundary", "4"]));
    let dual = dir.path().join("dual.json");
    let report = ok_json(&cobound(
        &["dual", "build", "--complex", &s3, "--dual-out", dual.to_str().unwrap()],
        None,
    ));
    assert!(report["result"].is_object());
    let dual_json: Value = serde_json::from_str(&fs::read_to_string(&dual).unwrap()).unwrap();
    assert_eq!(dual_json["cells"], serde_json::json!([5, 10, 10, 5]));
    let report = ok_json(&cobound(&["expanderfill", "--complex", &s3, "--samples", "5"], None));
    assert_eq!(report["result"]["lambda"], "5/3");
}

#[test]
fn fill_a_vertex_pair() {
    let dir = tempfile::tempdir().unwrap();
    let c8 = write(dir.path(), "c8.json", &generate(&["cycle", "8"]));
    let p = write(
        dir.path(),
        "p.json",
        r#"{"degree":0,"coeff":"Z2","values":[[0,[1]],[4,[1]]]}"#,
    );
    let report = ok_json(&cobound(&["fill", "--complex", &c8, "--chain", &p], None));
    assert_eq!(report["result"]["norm"], 4);
    assert_eq!(report["exact"], true);
}

#[test]
fn dehn_profile_csv() {
    let t = generate(&["torus2"]);
    let out = cobound(&["dehn", "--samples", "5", "--format", "csv"], Some(&t));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("# cobound dehn csv v1"));
    assert_eq!(text.lines().count(), 2 + 5);
}

#[test]
fn cover_from_a_spec_and_a_bad_relator() {
    let dir = tempfile::tempdir().unwrap();
    let c3 = write(dir.path(), "c3.json", &generate(&["cycle", "3"]));
    let spec = write(
        dir.path(),
        "spec.json",
        r#"{"base":"cycle(3)","fiber":4,"tree_edges":[0,2],"perms":{"1":[1,2,3,0]}}"#,
    );
    let report = ok_json(&cobound(&["cover", "build", "--base", &c3, "--spec", &spec], None));
    assert_eq!(report["result"]["cells"], serde_json::json!([12, 12]));

    let t = write(dir.path(), "t.json", &generate(&["torus2"]));
    let x = cobound::generators::torus2();
    let tree = cobound::covers::spanning_tree(&x).unwrap();
    let non_tree: Vec<usize> = (0..x.count(1)).filter(|e| !tree.contains(e)).collect();
    // a transposition and a 3-cycle on two loops violate a triangle relator
    let bad = serde_json::json!({
        "base": "torus2",
        "fiber": 3,
        "tree_edges": tree,
        "perms": { non_tree[0].to_string(): [1, 0, 2], non_tree[1].to_string(): [1, 2, 0] },
    });
    let spec = write(dir.path(), "bad.json", &bad.to_string());
    let out = cobound(&["cover", "build", "--base", &t, "--spec", &spec], None);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(error_kind(&out), "RelatorNotTrivial");
}

#[test]
fn witness_in_the_cycle_tower() {
    let report = ok_json(&cobound(
        &["witness0", "--tower", "cycle", "--k", "4,2", "--kappa", "1/5"],
        None,
    ));
    assert_eq!(report["result"]["p_norm"], 2);
    assert_eq!(report["result"]["filling_norm"], 6);
}

#[test]
fn tower_shallower_than_the_threshold() {
    let out = cobound(
        &["witness0", "--tower", "cycle", "--k", "4,2", "--kappa", "1/100"],
        None,
    );
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(error_kind(&out), "TowerTooShallow");
}

#[test]
fn metric_distance_and_edge_list() {
    let c8 = generate(&["cycle", "8"]);
    let report = ok_json(&cobound(
        &["metric", "--dim", "0", "--from", "0", "--to", "5"],
        Some(&c8),
    ));
    assert_eq!(report["result"]["distance"], 3);
    let out = cobound(&["metric", "--dim", "0", "--edge-list"], Some(&c8));
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 8);
}

#[test]
fn unknown_generator_is_an_error() {
    let out = cobound(&["gen", "klein_bottle"], None);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(error_kind(&out), "BadParameters");
}
