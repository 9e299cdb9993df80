use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use opembed::cli::read_footer;
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_opembed"))
}

fn spec(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../specs").join(name)
}

fn run(args: &[&str], input: Option<&Path>, out: &Path) -> (i32, String) {
    let mut cmd = bin();
    cmd.args(args);
    if let Some(p) = input {
        cmd.arg(p);
    }
    cmd.arg("--out").arg(out);
    let output = cmd.output().expect("binary runs");
    (
        output.status.code().expect("exit code"),
        String::from_utf8_lossy(&output.stdout).into_owned(),
    )
}

fn report(out: &Path, file: &str) -> (String, Value) {
    let text = fs::read_to_string(out.join(file)).expect("report written");
    let json = read_footer(&text).expect("footer parses");
    (text, json)
}

#[test]
fn classify_jordan_block() {
    let dir = tempfile::tempdir().unwrap();
    let (code, stdout) = run(&["classify"], Some(&spec("jordan.toml")), dir.path());
    assert_eq!(code, 0);
    assert!(stdout.contains("NotEmbeddable(kernel Finite(1), cokernel Finite(1))"));
    let (text, json) = report(dir.path(), "jordan.classify.txt");
    assert!(text.contains("kernel     Finite(1)"));
    assert_eq!(json["verdict"]["NotEmbeddable"]["NecessaryConditionViolated"]["kernel_dim"], 1);
    assert_eq!(json["status"], "ok");
}

#[test]
fn embed_random_unitary_passes() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = run(&["embed"], Some(&spec("random_unitary.toml")), dir.path());
    assert_eq!(code, 0);
    let (_, json) = report(dir.path(), "random_unitary.embed.txt");
    assert_eq!(json["verification"]["pass"], true);
    assert_eq!(json["realization"]["method"], "UnitarySpectral");
    assert!(json["verification"]["endpoint_residual"].as_f64().unwrap() <= 1e-6);
}

#[test]
fn embed_finite_shift_has_no_realization() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = run(&["embed"], Some(&spec("shift_finite.toml")), dir.path());
    assert_eq!(code, 0);
    let (text, json) = report(dir.path(), "shift_finite.embed.txt");
    assert!(json["realization"].is_null());
    assert!(json["verification"].is_null());
    assert!(!text.contains("## realization"));
    assert_eq!(json["verdict"]["NotEmbeddable"]["NecessaryConditionViolated"]["cokernel_dim"], 2);
}

#[test]
fn reports_are_byte_identical_for_the_same_seed() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let c = tempfile::tempdir().unwrap();
    let input = spec("annulus_diagonal.toml");
    // relative output dirs differ, the report itself must not
    assert_eq!(run(&["embed", "--seed", "3"], Some(&input), a.path()).0, 0);
    assert_eq!(run(&["embed", "--seed", "3"], Some(&input), b.path()).0, 0);
    assert_eq!(run(&["embed", "--seed", "4"], Some(&input), c.path()).0, 0);
    let name = "annulus_diagonal.embed.txt";
    let ra = fs::read(a.path().join(name)).unwrap();
    let rb = fs::read(b.path().join(name)).unwrap();
    let rc = fs::read(c.path().join(name)).unwrap();
    assert_eq!(ra, rb);
    assert_ne!(ra, rc);
}

#[test]
fn unknown_key_is_a_parse_error_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("typo.toml");
    fs::write(&input, "[operator]\nkind = \"volterra\"\ngrid = 64\n\n[options]\ntoll = 1e-6\n").unwrap();
    let (code, stdout) = run(&["embed"], Some(&input), dir.path());
    assert_eq!(code, 2);
    assert!(stdout.contains("line 6"), "{stdout}");
    let (_, json) = report(dir.path(), "typo.embed.txt");
    assert_eq!(json["error"]["line"], 6);
    assert_eq!(json["error"]["field"], "toll");
}

#[test]
fn tight_tolerance_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = run(&["embed", "--tol", "1e-30"], Some(&spec("random_unitary.toml")), dir.path());
    assert_eq!(code, 1);
    let (text, json) = report(dir.path(), "random_unitary.embed.txt");
    assert_eq!(json["verification"]["pass"], false);
    assert!(text.contains("pass         false (endpoint, cocycle)"), "{text}");
}

#[test]
fn construction_failure_is_status_three() {
    // one cluster centred at 0 cannot take a logarithm
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("centred.toml");
    fs::write(
        &input,
        "[operator]\nkind = \"compact\"\nrows = [[1.0, 0.0], [0.0, -1.0]]\nkernel = 0\ndense_range = true\n\n[options]\ncluster_radius = 5.0\n",
    )
    .unwrap();
    let (code, _) = run(&["embed"], Some(&input), dir.path());
    assert_eq!(code, 3);
    let (_, json) = report(dir.path(), "centred.embed.txt");
    assert_eq!(json["verdict"]["Embeddable"]["method"], "CompactRiesz");
    assert!(json["error"].as_str().unwrap().contains("cluster"));
}

#[test]
fn branch_flag_reaches_the_realization() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = run(
        &["embed", "--branch", "1,-1,0,0,2,-2"],
        Some(&spec("annulus_diagonal.toml")),
        dir.path(),
    );
    assert_eq!(code, 0);
    let (_, json) = report(dir.path(), "annulus_diagonal.embed.txt");
    let offsets: Vec<i64> = json["realization"]["branch_offsets"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_i64().unwrap())
        .collect();
    assert_eq!(offsets, vec![1, -1, 0, 0, 2, -2]);
    assert_eq!(json["verification"]["pass"], true);
}

#[test]
fn verify_exports_wold_bases() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = run(&["verify"], Some(&spec("unitary_plus_shift.toml")), dir.path());
    assert_eq!(code, 0);
    let (_, json) = report(dir.path(), "unitary_plus_shift.verify.txt");
    let wold = &json["wold"];
    assert_eq!(wold["multiplicity"], "infinite");
    assert_eq!(wold["wandering_basis"].as_array().unwrap().len(), 2);
    assert_eq!(wold["unitary_basis"].as_array().unwrap().len(), 4);
    // each column has one [re, im] pair per coordinate
    assert_eq!(wold["wandering_basis"][0].as_array().unwrap().len(), 68);
}

#[test]
fn verify_adds_generator_convergence() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = run(&["verify"], Some(&spec("dense_invertible.toml")), dir.path());
    assert_eq!(code, 0);
    let (_, json) = report(dir.path(), "dense_invertible.verify.txt");
    let g = json["generator_convergence"].as_array().unwrap();
    assert_eq!(g.len(), 8);
}

#[test]
fn sweep_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = run(&["sweep"], Some(&spec("shift_infinite.toml")), dir.path());
    assert_eq!(code, 0);
    let csv = fs::read_to_string(dir.path().join("shift_infinite.sweep.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("h,continuity_sup"));
    // a grid of 4 steps per unit time leaves two distinct positive steps
    let hs: Vec<f64> = lines.map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(hs, vec![0.5, 0.25]);
}

#[test]
fn missing_file_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let (code, stdout) = run(&["classify"], Some(&dir.path().join("absent.toml")), dir.path());
    assert_eq!(code, 2);
    assert!(stdout.contains("cannot read"));
}

#[test]
fn demo_covers_every_method() {
    let dir = tempfile::tempdir().unwrap();
    let (code, stdout) = run(&["demo"], None, dir.path());
    assert_eq!(code, 0, "{stdout}");
    let (_, json) = report(dir.path(), "demo.summary.txt");
    let covered: Vec<&str> = json["methods_covered"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    for m in opembed::embed::EmbeddingMethod::ALL {
        assert!(covered.contains(&format!("{m:?}").as_str()), "{m} missing");
    }
    for row in json["rows"].as_array().unwrap() {
        assert_eq!(row["expected_match"], true, "{}", row["name"]);
    }
}
