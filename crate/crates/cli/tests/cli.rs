use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "data", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn nilops(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nilops"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = nilops(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut all = vec!["--format", "json"];
    all.extend_from_slice(args);
    serde_json::from_str(&stdout(&all)).expect("valid json")
}

fn code(args: &[&str]) -> i32 {
    nilops(args).status.code().expect("exit code")
}

#[test]
fn normalize_example() {
    assert_eq!(stdout(&["normalize", "Sq4 Sq4"]), "Sq7 Sq1 + Sq6 Sq2\n");
    assert_eq!(stdout(&["normalize", "Sq1 Sq1"]), "0\n");
    let v = json(&["normalize", "Sq2 Sq2"]);
    assert_eq!(v["result"], "Sq3 Sq1");
    assert_eq!(v["degree"], 4);
    assert_eq!(v["terms"], serde_json::json!([[3, 1]]));
}

#[test]
fn conjugate_and_multiply() {
    assert_eq!(stdout(&["conjugate", "Sq3"]), "Sq2 Sq1\n");
    assert_eq!(stdout(&["conjugate", "Sq2 Sq1"]), "Sq3\n");
    assert_eq!(stdout(&["multiply", "Sq1", "Sq2"]), "Sq3\n");
    assert_eq!(stdout(&["multiply", "Sq2", "Sq2"]), "Sq3 Sq1\n");
}

#[test]
fn basis_listing() {
    let v = json(&["basis", "--degree", "3"]);
    assert_eq!(v["dim"], 2);
    assert_eq!(v["basis"], serde_json::json!(["Sq3", "Sq2 Sq1"]));
    // A(1) is 8-dimensional: 1, 1, 1, 2, 1, 1, 1 in degrees 0..=6
    let dims: Vec<u64> = (0..=6)
        .map(|d| json(&["basis", "--degree", &d.to_string(), "--subalgebra", "1"])["dim"].as_u64().unwrap())
        .collect();
    assert_eq!(dims, vec![1, 1, 1, 2, 1, 1, 1]);
}

#[test]
fn membership_witness() {
    let out = stdout(&["membership", "--n", "1", "--target", "Sq2 Sq2"]);
    assert!(out.contains("witness: (Sq1, Sq1)"), "{out}");
    let v = json(&["membership", "--n", "2", "--target", "Sq4 Sq4"]);
    assert_eq!(v["member"], true);
    // Sq^4 itself is indecomposable, so not in the ideal
    let v = json(&["membership", "--n", "1", "--target", "Sq4"]);
    assert_eq!(v["member"], false);
}

#[test]
fn act_on_modules() {
    let rp = data("rp_infinity.json");
    assert_eq!(stdout(&["act", "--module", &rp, "--op", "Sq1", "--element", "1:0"]), "2:0\n# u^2\n");
    // Sq^2 u^3 = 3 u^5 = u^5
    let v = json(&["act", "--module", &rp, "--op", "Sq2", "--element", "3:0"]);
    assert_eq!(v["result"], "5:0");
    let v = json(&["act", "--module", &rp, "--op", "Sq2", "--element", "2:0"]);
    assert_eq!(v["result"], "4:0");
    let v = json(&["act", "--module", &rp, "--op", "Sq2", "--element", "1:0"]);
    assert_eq!(v["result"], "0");
}

#[test]
fn filtration_of_rp2() {
    let v = json(&["filtration", "--module", &data("rp2.json"), "--smax", "2"]);
    assert_eq!(v["degree_bound"], 2);
    // a finite module: M_s is everything in degrees >= s
    for layer in v["layers"].as_array().unwrap() {
        let s = layer["s"].as_u64().unwrap() as usize;
        let dims: Vec<u64> = layer["m_dims"].as_array().unwrap().iter().map(|d| d.as_u64().unwrap()).collect();
        let expect: Vec<u64> = (0..=2).map(|d| u64::from(d >= s && d >= 1)).collect();
        assert_eq!(dims, expect, "M_{s}");
    }
    assert!(!v["certificates"].as_array().unwrap().is_empty());
}

#[test]
fn tor_of_exterior_algebra() {
    let v = json(&["tor", "--algebra", &data("exterior3.json"), "--smax", "3", "--tmax", "9"]);
    let entries = v["entries"].as_object().unwrap();
    for s in 0..=3 {
        for t in 0..=9 {
            let dim = entries[&format!("(-{s},{t})")]["dim"].as_u64().unwrap();
            assert_eq!(dim, u64::from(t == 3 * s), "(-{s},{t})");
        }
    }
    assert_eq!(v["connectivity_holds"], true);
    assert!(v["checks"]["d_squared"].as_u64().unwrap() > 0);
}

#[test]
fn tor_text_has_chart_and_conventions() {
    let out = stdout(&["tor", "--algebra", &data("poly4.json"), "--smax", "2", "--tmax", "6"]);
    assert!(out.contains("Sigma^s"), "{out}");
    assert!(out.contains("# classes"), "{out}");
    assert!(out.contains("# columns"), "{out}");
}

#[test]
fn laws_subset() {
    let out = stdout(&["laws", "--only", "adem_display_5", "--n", "2"]);
    assert!(out.contains("refuted (expected)"), "{out}");
    assert!(out.contains("difference = Sq7 Sq1"), "{out}");
    assert!(out.contains("0 failures"), "{out}");
    let v = json(&["laws", "--only", "lemma_5_7", "--n", "1"]);
    assert_eq!(v["laws"][0]["verdict"]["kind"], "verified");
    let ids = json(&["laws", "--list"]);
    assert!(ids.as_array().unwrap().iter().any(|x| x == "lemma_6_2"));
}

#[test]
fn laws_json_is_reproducible() {
    let args = ["--format", "json", "laws", "--only", "lemma_6_2", "--only", "prop_2_4", "--samples", "20"];
    assert_eq!(nilops(&args).stdout, nilops(&args).stdout);
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["normalize", "Sq0"]), 1);
    assert_eq!(code(&["normalize", "Sq2Sq1"]), 1);
    assert_eq!(code(&["bogus"]), 1);
    assert_eq!(code(&["laws", "--only", "nope"]), 1);
    assert_eq!(code(&["act", "--module", "/nonexistent.json", "--op", "Sq1", "--element", "0"]), 1);
    assert_eq!(code(&["filtration", "--module", &data("rp_infinity.json"), "--smax", "1"]), 1);
    // degree mismatch is a computation error
    assert_eq!(code(&["membership", "--n", "2", "--target", "Sq4"]), 2);
    assert_eq!(code(&["--help"]), 0);
}
