use std::path::PathBuf;

use superchar_core::caps::Caps;
use superchar_core::cyclo::Cyclotomic;
use superchar_core::dualspace::DualLabel;
use superchar_core::exactfield::FiniteField;
use superchar_core::sctheory::{build_table, parse_rational, TableJson};
use superchar_core::superclasses::SuperclassLabel;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("superchar").chain(args.iter().copied());
    let code = superchar_cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name)
}

fn check_golden(name: &str, args: &[&str]) {
    let (code, out, err) = run(args);
    assert_eq!(code, 0, "{err}");
    let path = golden(name);
    if std::env::var_os("SUPERCHAR_BLESS").is_some() {
        std::fs::write(&path, &out).unwrap();
    }
    let want = std::fs::read_to_string(&path).unwrap();
    assert_eq!(out, want, "{name} differs from its golden file");
}

#[test]
fn golden_outputs() {
    check_golden("u3_f2_table.json", &["table", "--n", "3", "--p", "2"]);
    check_golden(
        "u3_f2_table.csv",
        &["table", "--n", "3", "--p", "2", "--degree", "1", "--format", "csv"],
    );
    check_golden("u2_f3_table.json", &["table", "--n", "2", "--p", "3"]);
    check_golden("u2_f3_table.csv", &["table", "--n", "2", "--p", "3", "--format", "csv"]);
    check_golden(
        "u3_f2_dual_orbits.csv",
        &["orbits", "--n", "3", "--p", "2", "--kind", "dual", "--format", "csv"],
    );
    check_golden(
        "u2_f3_plancherel.csv",
        &["plancherel", "--n", "2", "--p", "3", "--format", "csv"],
    );
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["table", "--n", "4", "--p", "3"][..],
        &["orbits", "--n", "4", "--p", "2", "--kind", "dual"],
        &["tower", "--n", "3", "--degrees", "1,2", "--report", "fsc"],
    ] {
        assert_eq!(run(args), run(args));
    }
}

#[test]
fn table_json_round_trips() {
    let caps = Caps::default();
    for (n, p, m) in [(3, 2, 1), (2, 3, 1), (3, 2, 2)] {
        let (code, out, _) = run(&[
            "table",
            "--n",
            &n.to_string(),
            "--p",
            &p.to_string(),
            "--degree",
            &m.to_string(),
        ]);
        assert_eq!(code, 0);
        let parsed: TableJson = serde_json::from_str(&out).unwrap();
        let field = FiniteField::from_spec(&parsed.group.field, &caps).unwrap();
        let t = build_table(n, &field, &caps, None).unwrap();
        for (row, j) in t.rows.iter().zip(&parsed.rows) {
            assert_eq!(DualLabel::from_json(&j.label, n, &field).unwrap(), row.label);
            assert_eq!(parse_rational(&j.weight).unwrap(), row.weight);
        }
        for (col, j) in t.cols.iter().zip(&parsed.cols) {
            assert_eq!(SuperclassLabel::from_json(&j.label, n, &field).unwrap(), col.label);
            assert_eq!(j.size, col.size);
        }
        let values: Vec<Vec<Cyclotomic>> = parsed.values;
        assert_eq!(values, t.values);
    }
}

#[test]
fn classify_examples() {
    let (code, out, _) = run(&[
        "classify",
        "--n",
        "3",
        "--p",
        "2",
        "--degree",
        "1",
        "--matrix",
        "a12=1,a13=1",
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["label"]["blocks"], serde_json::json!([[1, 2], [3]]));
    assert_eq!(v["label"]["colours"]["1,2"], serde_json::json!([1]));
    let (code, out, _) = run(&[
        "classify",
        "--n",
        "3",
        "--p",
        "2",
        "--matrix",
        "a12=1,a13=1",
        "--dual",
        "--format",
        "csv",
    ]);
    assert_eq!(code, 0);
    assert!(out.ends_with("dual,\"a12=1,a13=1\",\"1,3/2 {1,3=[1]}\"\n"), "{out}");
}

#[test]
fn verify_and_exit_codes() {
    assert_eq!(run(&["verify", "--n", "1", "--p", "2", "--degree", "1"]).0, 0);
    let (code, out, _) = run(&["verify", "--n", "4", "--p", "2"]);
    assert_eq!(code, 0);
    assert!(out.contains("\"passed\": true"));
    assert_eq!(run(&["table", "--frobnicate"]).0, 2);
    assert_eq!(run(&["table", "--p", "6"]).0, 2);
    assert_eq!(run(&["classify", "--n", "3", "--matrix", "a31=1"]).0, 2);
    let (code, _, err) = run(&["table", "--n", "4", "--p", "3", "--cap", "100"]);
    assert_eq!(code, 2);
    assert!(err.contains("cap"), "{err}");
    assert_eq!(run(&["tower", "--n", "4", "--degrees", "1,3,4"]).0, 2);
    assert_eq!(run(&["tower", "--n", "4"]).0, 2);
}

#[test]
fn tower_reports() {
    let (code, out, err) = run(&[
        "tower",
        "--n",
        "4",
        "--p",
        "2",
        "--degrees",
        "1,2,6",
        "--pi",
        "1,4/2/3",
        "--colours",
        "1,4=[1]",
        "--superclass",
        "1/2,3/4",
        "--superclass-colours",
        "2,3=1",
    ]);
    assert_eq!(code, 0, "{err}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["verdict"], "norm decays as q_m^-1");
    let mags: Vec<&str> = v["levels"]
        .as_array()
        .unwrap()
        .iter()
        .map(|l| l["magnitude"].as_str().unwrap())
        .collect();
    assert_eq!(mags, ["1/2", "1/4", "1/64"]);

    let (code, out, _) = run(&[
        "tower",
        "--n",
        "3",
        "--pi",
        "1,3/2",
        "--colours",
        "1,3=1",
        "--superclass",
        "1,3/2",
        "--superclass-colours",
        "1,3=1",
        "--format",
        "csv",
    ]);
    assert_eq!(code, 0);
    assert_eq!(
        out,
        "level,degree,q,value,magnitude\n1,1,2,-1,1\n2,2,4,-1,1\n3,6,64,-1,1\n"
    );

    let (code, out, _) = run(&["tower", "--n", "3", "--degrees", "1,2", "--report", "profile"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["result"]["weights"], serde_json::json!(["5/8", "49/64"]));
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    let (code, out, _) = run(&[
        "table",
        "--n",
        "3",
        "--format",
        "csv",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    assert_eq!(
        std::fs::read_to_string(path).unwrap(),
        std::fs::read_to_string(golden("u3_f2_table.csv")).unwrap()
    );
}
