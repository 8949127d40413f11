use std::fs;
use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;
use tori_cli::{execute, EXIT_INPUT, EXIT_OK};

fn bundled(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "examples", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn json_of(stdout: &str) -> Value {
    serde_json::from_str(stdout).expect("stdout is JSON")
}

fn tmp_path(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("tori-cli-{}-{name}", std::process::id()))
}

#[test]
fn verify_prop_on_positive_d_exits_zero() {
    let out = execute(["tori", "verify-prop", &bundled("random_d2_seed1.json"), "--mult", "0", "--json"]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    let v = json_of(&out.stdout);
    let claims = v["claims"].as_array().unwrap();
    assert_eq!(claims.len(), 5);
    assert!(claims.iter().all(|c| c["status"] == "verified"));
}

#[test]
fn endo_reports_definite_quaternions_for_example_two() {
    let out = execute(["tori", "endo", &bundled("example2_m1_n2.json"), "--json"]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    let v = json_of(&out.stdout);
    assert_eq!(v["witnesses"]["rank"], 4);
    assert_eq!(v["witnesses"]["tag"], "DefiniteQuaternion");
    assert_eq!(v["command"], "endo");
}

#[test]
fn missing_file_is_an_input_error() {
    let out = execute(["tori", "endo", "missing.json"]);
    assert_eq!(out.code, EXIT_INPUT);
    assert!(out.stdout.is_empty());
}

#[test]
fn unknown_subcommand_is_an_input_error() {
    assert_eq!(execute(["tori", "frobnicate"]).code, EXIT_INPUT);
}

#[test]
fn corrupted_period_is_not_an_endomorphism() {
    let text = fs::read_to_string(bundled("random_d2_seed1.json")).unwrap();
    let mut doc: Value = serde_json::from_str(&text).unwrap();
    let entry = doc["period"][0][0].as_str().unwrap().to_string();
    doc["period"][0][0] = Value::String(format!("{entry} + 1"));
    let path = tmp_path("corrupt.json");
    fs::write(&path, serde_json::to_string(&doc).unwrap()).unwrap();
    let out = execute(["tori", "verify-prop", path.to_str().unwrap(), "--mult", "0", "--json"]);
    fs::remove_file(&path).ok();
    assert_eq!(out.code, EXIT_INPUT);
    assert!(out.stderr.contains("NotAnEndomorphism"), "{}", out.stderr);
    assert!(out.stdout.is_empty());
}

#[test]
fn float_literal_is_rejected() {
    let path = tmp_path("float.json");
    fs::write(&path, r#"{"generators": [], "period": [["1", "i", "0", "0"], ["0", "0", "1", "0.5"]]}"#).unwrap();
    let out = execute(["tori", "ns", path.to_str().unwrap()]);
    fs::remove_file(&path).ok();
    assert_eq!(out.code, EXIT_INPUT);
    assert!(out.stderr.contains("Validation"), "{}", out.stderr);
}

#[test]
fn json_output_is_byte_identical_across_processes() {
    let bin = env!("CARGO_BIN_EXE_tori");
    for args in [
        vec!["verify-prop", "random_d2_seed1.json", "--mult", "0", "--json"],
        vec!["polarize", "example1_m1.json", "--json"],
        vec!["endo", "scalar_m1.json", "--json"],
    ] {
        let mut full: Vec<String> = args.iter().map(|s| s.to_string()).collect();
        full[1] = bundled(args[1]);
        let a = Command::new(bin).args(&full).output().unwrap();
        let b = Command::new(bin).args(&full).output().unwrap();
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn bundled_documents_match_generators() {
    for (args, name) in [
        (vec!["gen-example", "1", "--m", "1"], "example1_m1.json"),
        (vec!["gen-example", "2", "--m", "1", "--n", "2"], "example2_m1_n2.json"),
        (vec!["gen-example", "random", "--d", "2", "--seed", "1"], "random_d2_seed1.json"),
        (vec!["gen-example", "random", "--d", "-1", "--seed", "1"], "random_dm1_seed1.json"),
        (vec!["gen-example", "scalar", "--m", "1"], "scalar_m1.json"),
    ] {
        let out = execute(std::iter::once("tori").chain(args));
        assert_eq!(out.code, EXIT_OK);
        assert_eq!(out.stdout, fs::read_to_string(bundled(name)).unwrap(), "{name}");
    }
}

#[test]
fn example_one_is_not_algebraic() {
    let out = execute(["tori", "polarize", &bundled("example1_m1.json"), "--json"]);
    assert_eq!(out.code, EXIT_OK);
    let v = json_of(&out.stdout);
    assert_eq!(v["witnesses"]["verdict"]["kind"], "not_algebraic");
    assert_eq!(v["witnesses"]["verdict"]["obstruction"]["kind"], "antidiagonal");
}

#[test]
fn scalar_multiplication_skips_the_proposition() {
    let out = execute(["tori", "verify-prop", &bundled("scalar_m1.json"), "--mult", "1", "--json"]);
    assert_eq!(out.code, EXIT_OK);
    let v = json_of(&out.stdout);
    assert!(v["claims"].as_array().unwrap().iter().all(|c| c["status"] == "skipped"));
}

#[test]
fn corollaries_hold_on_the_gaussian_square() {
    let out = execute(["tori", "verify-cor", &bundled("scalar_m1.json"), "--json"]);
    assert_eq!(out.code, EXIT_OK);
    let v = json_of(&out.stdout);
    let status = |id: &str| {
        v["claims"].as_array().unwrap().iter().find(|c| c["id"] == id).map(|c| c["status"].clone()).unwrap()
    };
    assert_eq!(status("corollary2.h0_plus_nd"), "verified");
    assert_eq!(status("corollary3.real_multiplication"), "verified");
}

#[test]
fn text_output_lists_claims() {
    let out = execute(["tori", "classify", &bundled("example1_m1.json")]);
    assert_eq!(out.code, EXIT_OK);
    assert!(out.stdout.starts_with("classify\n"));
    assert!(out.stdout.contains("tag: ImaginaryQuadratic"));
}

#[test]
fn nd_reports_rank_two() {
    let out = execute(["tori", "nd", &bundled("random_dm1_seed1.json"), "--mult", "0", "--json"]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    assert_eq!(json_of(&out.stdout)["witnesses"]["rank"], 2);
    let bad = execute(["tori", "nd", &bundled("random_dm1_seed1.json"), "--mult", "3"]);
    assert_eq!(bad.code, EXIT_INPUT);
}
