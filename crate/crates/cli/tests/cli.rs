use std::path::PathBuf;
use std::process::{Command, Output};

fn bifib(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bifib")).args(args).output().expect("binary runs")
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).to_string_lossy().into_owned()
}

fn scratch_dir(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("bifib-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

#[test]
fn list_shows_all_cases() {
    let out = bifib(&["list"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 11);
    let out = bifib(&["list", "III"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 4);
}

#[test]
fn input_errors_exit_with_4() {
    assert_eq!(bifib(&["analyze", "--case", "VII"]).status.code(), Some(4));
    assert_eq!(bifib(&["analyze", "--case", "II", "--tol-merge", "-1"]).status.code(), Some(4));
    assert_eq!(bifib(&["analyze", "--problem", "/nonexistent/p.json"]).status.code(), Some(4));
    assert_eq!(bifib(&["analyze"]).status.code(), Some(4));
    let d = scratch_dir("bad");
    let bad = d.join("bad.json");
    std::fs::write(&bad, r#"{"id": "bad", "specialized": "x*y*", "bifibration": {"pi": "z", "rho": "x", "base_pi": [0,0], "base_rho": [0,0], "canonical": false}}"#).unwrap();
    assert_eq!(bifib(&["analyze", "--problem", bad.to_str().unwrap()]).status.code(), Some(4));
    assert_eq!(bifib(&["lattice", "snf", "--in", bad.to_str().unwrap()]).status.code(), Some(4));
}

#[test]
fn d8_report_and_artifacts() {
    let d = scratch_dir("d8");
    let out = bifib(&["analyze", "--case", "III(D8)", "--out", d.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(d.join("III_D8.json")).unwrap();
    let r: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(r["schema"], 1);
    assert_eq!(r["homology"]["h1"][0], "Z/2");
    assert_eq!(r["lattice"]["discriminant_group"], "Z/2 + Z/2");
    assert_eq!(r["critvals_pi"].as_array().unwrap().len(), 5);
    assert!(d.join("III_D8.svg").exists());
    // floats carry 17 significant digits
    assert!(text.contains("\"merge\": 1.0000000000000001e-5"));
}

#[test]
fn ii_reports_trivial_homology() {
    let out = bifib(&["analyze", "--case", "II"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert!(r["homology"]["h1"].as_array().unwrap().iter().all(|g| g.is_null() || g == "0"));
    assert_eq!(r["homology"]["gauge_invariant"], true);
}

#[test]
fn sphere_toy_is_a_double_cover() {
    let out = bifib(&["analyze", "--problem", &data("sphere.json")]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&out);
    assert_eq!(r["fibre"]["points"].as_array().unwrap().len(), 2);
    assert_eq!(r["fibre"]["branch_values"].as_array().unwrap().len(), 2);
    assert_eq!(r["fibre"]["genus"], 0);
    assert_eq!(r["fibre"]["rank_h1"], 1);
    for iso in r["isotopies"].as_array().unwrap() {
        assert_eq!(iso["matching_verdict"], true);
    }
}

#[test]
fn plot_of_ii_has_six_trails_per_panel() {
    let d = scratch_dir("plot");
    let out = bifib(&["analyze", "--case", "II", "--out", d.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let report = d.join("II.json");
    let a = bifib(&["plot", "--report", report.to_str().unwrap()]);
    let b = bifib(&["plot", "--report", report.to_str().unwrap()]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, std::fs::read(d.join("II.svg")).unwrap());
    let svg = String::from_utf8(a.stdout).unwrap();
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let isos = r["isotopies"].as_array().unwrap();
    assert_eq!(isos.len(), 6);
    for iso in isos {
        assert_eq!(iso["trail"][0].as_array().unwrap().len(), 6);
    }
    // grey trails: six per isotopy panel
    let grey = svg.matches(r##"stroke="#999""##).count() + svg.matches(r##"stroke="#e9a23b" stroke-width="1.6""##).count();
    assert_eq!(grey, 36);
}

#[test]
fn plot_without_isotopies_is_an_error() {
    let d = scratch_dir("empty");
    let out = bifib(&["analyze", "--case", "II", "--out", d.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let mut r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.join("II.json")).unwrap()).unwrap();
    r["isotopies"] = serde_json::json!([]);
    let p = d.join("empty.json");
    std::fs::write(&p, serde_json::to_string(&r).unwrap()).unwrap();
    let out = bifib(&["plot", "--report", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn lattice_snf_on_small_matrices() {
    let d = scratch_dir("lattice");
    let m = d.join("q.json");
    std::fs::write(&m, "[[-2,1,0,0],[1,-2,1,1],[0,1,-2,0],[0,1,0,-2]]").unwrap();
    let out = bifib(&["lattice", "snf", "--in", m.to_str().unwrap(), "--disc-lambda", "1", "--coker-order", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["determinant"], "4");
    assert_eq!(r["smith_diagonal"], serde_json::json!(["1", "1", "2", "2"]));
    assert_eq!(r["discriminant_group"], "Z/2 + Z/2");
    assert_eq!(r["index_chain"]["lattice_index"], "2");
    assert_eq!(r["index_chain"]["quotient_index"], "2");

    std::fs::write(&m, "[[1,0,0],[0,1,0],[0,0,1]]").unwrap();
    let r = json(&bifib(&["lattice", "snf", "--in", m.to_str().unwrap()]));
    assert_eq!(r["cokernel"], "0");
    assert_eq!(r["discriminant_group"], "0");
}

#[test]
fn thread_count_does_not_change_the_report() {
    let one = Command::new(env!("CARGO_BIN_EXE_bifib")).args(["analyze", "--case", "III(D7)"]).env("BIFIB_THREADS", "1").output().unwrap();
    let four = Command::new(env!("CARGO_BIN_EXE_bifib")).args(["analyze", "--case", "III(D7)"]).env("BIFIB_THREADS", "4").output().unwrap();
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
    let bad = Command::new(env!("CARGO_BIN_EXE_bifib")).args(["list"]).env("BIFIB_THREADS", "zero").output().unwrap();
    assert!(bad.status.success(), "list ignores the thread cap");
    let bad = Command::new(env!("CARGO_BIN_EXE_bifib")).args(["analyze", "--case", "II"]).env("BIFIB_THREADS", "zero").output().unwrap();
    assert_eq!(bad.status.code(), Some(4));
}

#[test]
fn lattice_snf_on_the_d8_divisor_gram() {
    let path = data("d8_divisors.json");
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(bifib::read_matrix(&text).unwrap(), bifib_core::lattice::d8_divisor_gram());
    let out = bifib(&["lattice", "snf", "--in", &path, "--disc-lambda", "1", "--coker-order", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["determinant"], "4");
    assert_eq!(r["smith_diagonal"], serde_json::json!(["1", "1", "1", "1", "1", "2", "2"]));
    assert_eq!(r["cokernel"], "Z/2 + Z/2");
    assert_eq!(r["index_chain"]["lattice_index"], "2");
    assert_eq!(r["index_chain"]["quotient_index"], "2");
}
