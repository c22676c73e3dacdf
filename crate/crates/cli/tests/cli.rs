use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use relfuk_core::ainfty_core::{fixtures, CurvedAlgebra, Generator};
use relfuk_core::cone_ring::{BaseRing, Cone, ConeSpec};
use relfuk_core::io::{to_json, AlgebraDoc, TransferProblemDoc};
use relfuk_core::mc_transfer::problems::{halting_problems, oracle_problems};
use tempfile::TempDir;

const GEOMETRY: &str = r#"{"n": 2, "divisors": ["D1", "D2"],
    "classes": [{"name": "L", "c1": 2, "intersections": [1, 1]},
                {"name": "E", "c1": 1, "intersections": [1, 0]}]}"#;

fn relfuk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relfuk")).args(args).output().unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn ring() -> BaseRing {
    BaseRing::new(Cone::new(ConeSpec::orthant(2)).unwrap(), 3)
}

#[test]
fn valid_cone() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "cone.json", r#"{"p_count": 2, "generators": [[1, 0], [1, 2]]}"#);
    let o = relfuk(&["validate", arg(&p)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("valid cone"));
}

#[test]
fn rank_deficient_cone_is_rejected() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "cone.json", r#"{"p_count": 2, "generators": [[1, 1], [2, 2]]}"#);
    let o = relfuk(&["validate", arg(&p)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("rank condition"));
}

#[test]
fn malformed_input_exits_one() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "bad.json", "{not json");
    assert_eq!(relfuk(&["validate", arg(&p)]).status.code(), Some(1));
    assert_eq!(relfuk(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(relfuk(&["--help"]).status.code(), Some(0));
}

#[test]
fn curvature_condition_violation() {
    let r = ring();
    let mut alg = CurvedAlgebra::new(r.clone(), vec![Generator::new("e", 0), Generator::new("x", 1)]);
    alg.add_op_named(&[], "e", r.one()).unwrap();
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "alg.json", &to_json(&AlgebraDoc::from_algebra(&alg)));
    let o = relfuk(&["validate", arg(&p)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("curvature condition"));
}

#[test]
fn check_reports_relations() {
    let dir = TempDir::new().unwrap();
    let good = write(&dir, "good.json", &to_json(&AlgebraDoc::from_algebra(&fixtures::quadratic_ring(&ring(), 2))));
    let o = relfuk(&["check", arg(&good)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("0 violations"));
    let bad = write(&dir, "bad.json", &to_json(&AlgebraDoc::from_algebra(&fixtures::non_associative(&ring()))));
    let o = relfuk(&["check", arg(&bad), "--arity-bound", "3"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn transfer_solves_and_reports() {
    let dir = TempDir::new().unwrap();
    let p = &oracle_problems()[0];
    let input = write(&dir, "p.json", &to_json(&TransferProblemDoc::from_problem(p)));
    let out = dir.path().join("out.json");
    let o = relfuk(&["transfer", arg(&input), "--output", arg(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["order_achieved"], serde_json::json!(p.trunc_order));
    assert_eq!(v["name"], serde_json::json!(p.name));
}

#[test]
fn transfer_obstruction_exits_three() {
    let dir = TempDir::new().unwrap();
    let p = &halting_problems()[0];
    let input = write(&dir, "p.json", &to_json(&TransferProblemDoc::from_problem(p)));
    let o = relfuk(&["transfer", arg(&input)]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains(&format!("order {}", p.obstructed_at.unwrap())));
}

#[test]
fn strata_table() {
    let o = relfuk(&["enumerate", "strata", "--k", "3", "--ell", "0"]);
    assert_eq!(o.status.code(), Some(0));
    // header, rule, three strata
    assert_eq!(stdout(&o).lines().count(), 5);
}

#[test]
fn exclusion_with_empty_budget_keeps_the_bare_disc() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.json", GEOMETRY);
    let o = relfuk(&["exclude", arg(&g), "--maslov", "2", "--budget", "0,0"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("1 survivors"));
    let o = relfuk(&["exclude", arg(&g), "--maslov", "-1", "--budget", "0,0"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("0 survivors"));
}

#[test]
fn enumeration_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.json", GEOMETRY);
    let runs: Vec<String> = ["1", "4"]
        .iter()
        .map(|jobs| {
            let out = dir.path().join(format!("types{jobs}.json"));
            let o = relfuk(&["enumerate", "types", arg(&g), "--k", "1", "--budget", "2,1", "--jobs", jobs, "--output", arg(&out)]);
            assert_eq!(o.status.code(), Some(0));
            std::fs::read_to_string(out).unwrap()
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
    let rows: serde_json::Value = serde_json::from_str(&runs[0]).unwrap();
    for row in rows.as_array().unwrap() {
        assert!(row["dim"].as_i64().unwrap() <= row["bound"].as_i64().unwrap());
    }
}

#[test]
fn series_expression() {
    let dir = TempDir::new().unwrap();
    let p = write(
        &dir,
        "e.json",
        r#"{"cone": {"p_count": 1, "generators": [[1]]}, "trunc_order": 3,
            "expr": {"mul": [{"series": [{"class": [0], "coeff": "1"}, {"class": [1], "coeff": "1"}]},
                             {"series": [{"class": [0], "coeff": "1"}, {"class": [1], "coeff": "-1"}]}]}}"#,
    );
    let o = relfuk(&["series", arg(&p)]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    // (1 + T)(1 - T) = 1 - T^2
    assert_eq!(v["terms"], serde_json::json!([{"class": [0], "coeff": "1"}, {"class": [2], "coeff": "-1"}]));
}
