use std::path::PathBuf;
use std::process::{Command, Output};

fn qpe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qpe")).args(args).env_remove("QPE_MAX_OBJECTS").output().expect("binary runs")
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).to_string_lossy().into_owned()
}

fn stdout_json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("json on stdout")
}

#[test]
fn verify_q2_passes() {
    let o = qpe(&["verify", "--suite", "q2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = stdout_json(&o);
    assert_eq!(v["passed"], true);
    assert!(v["checks"].as_array().unwrap().len() >= 4);
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    assert_eq!(qpe(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(qpe(&["verify", "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(qpe(&["--window", "2", "verify"]).status.code(), Some(2));
}

#[test]
fn colored_homology_of_the_two_colored_unknot() {
    let o = qpe(&["colored", "homology", &data("unknot2.json"), "--out", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = stdout_json(&o);
    let groups = v["groups"].as_array().unwrap();
    // Euler characteristic q^-2 + 1 - q^4 - q^6
    let mut chi = std::collections::BTreeMap::new();
    for g in groups {
        let (h, q, r) = (g["h"].as_i64().unwrap(), g["q"].as_i64().unwrap(), g["rank"].as_i64().unwrap());
        *chi.entry(q).or_insert(0) += if h % 2 == 0 { r } else { -r };
    }
    chi.retain(|_, v| *v != 0);
    assert_eq!(chi, [(-2, 1), (0, 1), (4, -1), (6, -1)].into_iter().collect());
    assert!(v["poincare"].as_str().unwrap().contains("q^-2"));
}

#[test]
fn table_output_and_parallel_files() {
    let o = qpe(&["colored", "homology", &data("trefoil.json"), &data("unknot2.json"), "--format", "table", "--jobs", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let s = String::from_utf8_lossy(&o.stdout);
    assert!(s.contains("Z/2"));
    assert_eq!(s.matches("poincare:").count(), 2);
}

#[test]
fn malformed_diagram_reports_position() {
    let o = qpe(&["colored", "homology", &data("bad.json")]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("bad.json") && err.contains("line"), "{}", err);
}

#[test]
fn output_is_deterministic() {
    let a = qpe(&["colored", "homology", &data("trefoil.json")]);
    let b = qpe(&["colored", "homology", &data("trefoil.json"), "--jobs", "1"]);
    assert_eq!(a.stdout, b.stdout);
    let a = qpe(&["verify", "--suite", "cobordism", "--seed", "7"]);
    let b = qpe(&["verify", "--suite", "cobordism", "--seed", "7"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn projector_files_round_trip_through_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    let q = dir.path().join("q2.json");
    let q = q.to_str().unwrap();
    assert_eq!(qpe(&["proj", "q2", "--out", q]).status.code(), Some(0));
    assert_eq!(qpe(&["complex", "check", q]).status.code(), Some(0));
    assert_eq!(qpe(&["proj", "turnback", q]).status.code(), Some(0));
    let e = qpe(&["tl", "euler", "--complex", q, "--precision", "10"]);
    assert_eq!(e.status.code(), Some(0));
    assert!(!stdout_json(&e).as_array().unwrap().is_empty());
    let s = qpe(&["complex", "tensor", q, q]);
    assert_eq!(s.status.code(), Some(0));
    assert_eq!(stdout_json(&s)["n"], 2);
}

#[test]
fn identity_does_not_kill_turnbacks() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("id.json");
    std::fs::write(&p, r#"{"n":2,"degrees":[{"h":0,"objects":[{"matching":[2,3,0,1],"qshift":0}]}]}"#).unwrap();
    assert_eq!(qpe(&["proj", "turnback", p.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn homology_of_a_closed_complex_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("b.json");
    let o = qpe(&["colored", "bracket", &data("trefoil.json"), "--out", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let z = stdout_json(&qpe(&["homology", p.to_str().unwrap()]));
    let f2 = stdout_json(&qpe(&["homology", p.to_str().unwrap(), "--field", "f2"]));
    let rank = |v: &serde_json::Value| v["groups"].as_array().unwrap().iter().map(|g| g["rank"].as_i64().unwrap()).sum::<i64>();
    assert_eq!(rank(&z), 4);
    assert_eq!(rank(&f2), 6);
}

#[test]
fn object_ceiling_aborts() {
    let o = Command::new(env!("CARGO_BIN_EXE_qpe"))
        .args(["colored", "homology", &data("unknot2.json")])
        .env("QPE_MAX_OBJECTS", "1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("ceiling"));
}
