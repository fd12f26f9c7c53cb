use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn zhukit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zhukit")).args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "fixtures", "unit", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("zhukit-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn virasoro_half_has_four_dimensional_truncation() {
    let out = zhukit(&["zhu", "--voa", "virasoro", "--c", "1/2", "--cutoff", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json_of(&out);
    assert_eq!(r["quotientDims"], 4);
    assert_eq!(r["passed"], true);
}

#[test]
fn heisenberg_cutoff_zero_is_one_dimensional() {
    let out = zhukit(&["zhu", "--voa", "heisenberg", "--cutoff", "0"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["quotientDims"], 1);
}

#[test]
fn unit_algebra_fusion_is_a_product_of_dimensions() {
    let out = zhukit(&[
        "fusion",
        "--algebra",
        &fixture("algebra.json"),
        "--bimodule",
        &fixture("bimodule.json"),
        "--left",
        &fixture("left.json"),
        "--right",
        &fixture("right.json"),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = json_of(&out);
    let want = r["bimoduleDim"].as_u64().unwrap() * r["leftDim"].as_u64().unwrap() * r["rightDim"].as_u64().unwrap();
    assert_eq!(want, 12);
    assert_eq!(r["fusionDim"], want);
    assert_eq!(r["dualIsomorphism"]["equal"], true);
}

#[test]
fn failed_check_exits_one_with_witness() {
    let bad = scratch("non-unital.json");
    std::fs::write(&bad, r#"{"dim": 1, "action": [[0, 0, 0, "2"]]}"#).unwrap();
    let out = zhukit(&[
        "fusion",
        "--algebra",
        &fixture("algebra.json"),
        "--bimodule",
        &fixture("bimodule.json"),
        "--left",
        bad.to_str().unwrap(),
        "--right",
        &fixture("right.json"),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let r = json_of(&out);
    assert_eq!(r["passed"], false);
    assert!(r["witness"].as_str().unwrap().contains("left"));
}

#[test]
fn configuration_errors_exit_two() {
    for args in [
        vec!["zhu", "--cutoff", "-1"],
        vec!["bimodule", "--z", "0", "--cutoff", "2"],
        vec!["zhu", "--c", "1/0"],
        vec!["zhu", "--voa", "file"],
        vec!["zhu", "--voa", "file", "--voa-file", "/nonexistent/voa.json"],
        vec!["induce", "--depth", "-3"],
        vec!["fusion", "--algebra", "/nonexistent", "--bimodule", "x", "--left", "y", "--right", "z"],
        vec!["frobnicate"],
    ] {
        let out = zhukit(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let out = Command::new(env!("CARGO_BIN_EXE_zhukit"))
        .args(["zhu", "--cutoff", "2"])
        .env("ZHUKIT_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn presentation_files_round_trip() {
    let path = scratch("heisenberg.json");
    let v = zhukit::voa::make_heisenberg(4);
    std::fs::write(&path, serde_json::to_string(&v.to_json()).unwrap()).unwrap();
    let from_file = json_of(&zhukit(&["zhu", "--voa", "file", "--voa-file", path.to_str().unwrap()]));
    let built_in = json_of(&zhukit(&["zhu", "--voa", "heisenberg", "--cutoff", "4"]));
    assert_eq!(from_file["quotientDims"], built_in["quotientDims"]);
    assert_eq!(from_file["structureConstants"], built_in["structureConstants"]);
    let mismatch = zhukit(&["zhu", "--voa", "file", "--voa-file", path.to_str().unwrap(), "--cutoff", "3"]);
    assert_eq!(mismatch.status.code(), Some(2));
}

#[test]
fn induce_reports_verma_and_irreducible_dims() {
    let r = json_of(&zhukit(&["induce", "--voa", "virasoro", "--c", "1/3", "--h", "0", "--depth", "4"]));
    assert_eq!(r["fLevelDims"], serde_json::json!([1, 1, 2, 3, 5]));
    assert_eq!(r["lLevelDims"], serde_json::json!([1, 0, 1, 1, 2]));
    assert_eq!(r["frobenius"]["equal"], true);
}

#[test]
fn omega_and_dualrep_pass() {
    let out = zhukit(&["omega", "--voa", "heisenberg", "--cutoff", "4"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["omegaDim"], 1);
    let out = zhukit(&["dualrep", "--voa", "virasoro", "--cutoff", "4", "--z", "-1", "--samples", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json_of(&out);
    assert!(r["residueIdentitiesChecked"].as_u64().unwrap() > 0);
    assert!(r["threeTermChecked"].as_u64().unwrap() > 0);
}

#[test]
fn csv_output_is_key_value_rows() {
    let out = zhukit(&["zhu", "--voa", "heisenberg", "--cutoff", "2", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("key,value\n"));
    assert!(text.lines().any(|l| l == "quotientDims,3"));
}

#[test]
fn reports_are_byte_identical_across_runs_and_thread_counts() {
    let mut outputs = Vec::new();
    for threads in ["1", "4"] {
        let path = scratch(&format!("verify-{threads}.json"));
        let status = Command::new(env!("CARGO_BIN_EXE_zhukit"))
            .args(["verify", "--seed", "3", "--output", path.to_str().unwrap()])
            .env("ZHUKIT_THREADS", threads)
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
        outputs.push(std::fs::read(&path).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    let a = zhukit(&["bimodule", "--voa", "virasoro", "--cutoff", "4", "--z", "1/3", "--format", "csv"]);
    let b = zhukit(&["bimodule", "--voa", "virasoro", "--cutoff", "4", "--z", "1/3", "--format", "csv"]);
    assert_eq!(a.stdout, b.stdout);
}
