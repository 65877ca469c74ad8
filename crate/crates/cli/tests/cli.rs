use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

use qhvk_core::tensor::TensorElem;
use qhvk_core::uqsl2;
use qhvk_core::CycNum;

fn qhvk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qhvk")).args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn statuses(report: &Value) -> BTreeMap<String, bool> {
    report["checks"]
        .as_array()
        .expect("checks")
        .iter()
        .map(|c| (c["name"].as_str().expect("name").to_string(), c["pass"].as_bool().expect("pass")))
        .collect()
}

fn worked_example() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/uqsl2.qhdef")
}

fn tensor_from_export(doc: &Value) -> TensorElem {
    let legs = doc["legs"].as_u64().expect("legs") as usize;
    let mut t = TensorElem::zero(legs);
    for term in doc["terms"].as_array().expect("terms") {
        let idx: Vec<usize> = term["indices"].as_array().expect("indices").iter().map(|i| i.as_u64().unwrap() as usize).collect();
        let c: CycNum = term["coeff"].as_str().expect("coeff").parse().expect("coefficient");
        t.add_indexed(&idx, &c);
    }
    t
}

#[test]
fn verify_uqsl2_is_deterministic_and_passes() {
    let a = qhvk(&["verify", "uqsl2", "--beta", "zeta^21", "--suite", "all", "--format", "json"]);
    let b = qhvk(&["verify", "uqsl2", "--beta", "zeta^21", "--suite", "all", "--format", "json"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let rep = json_of(&a);
    assert_eq!(rep["status"], "pass");
    assert_eq!(rep["beta"], "zeta^21");
    assert!(rep.get("timings_ms").is_none());
    let names = statuses(&rep);
    for want in ["axioms.pentagon", "axioms.hexagon_1", "axioms.hexagon_2", "ribbon.ribbon_central", "appendix.centre_dim_5", "r_consistency.r_00_standard", "transport.r_from_sigma"] {
        assert_eq!(names.get(want), Some(&true), "{want}");
    }
}

#[test]
fn every_beta_and_suite() {
    for k in [3, 9, 15] {
        let beta = format!("zeta^{k}");
        for suite in ["axioms", "ribbon", "transport"] {
            let out = qhvk(&["verify", "uqsl2", "--beta", &beta, "--suite", suite]);
            assert_eq!(out.status.code(), Some(0), "{beta} {suite}");
        }
    }
    let out = qhvk(&["verify", "salg", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(statuses(&json_of(&out)).get("salg.noncoassoc_witness"), Some(&true));
    assert_eq!(qhvk(&["verify", "salg", "--suite", "ribbon"]).status.code(), Some(3));
}

#[test]
fn input_errors_exit_3() {
    assert_eq!(qhvk(&["verify", "no-such-target"]).status.code(), Some(3));
    assert_eq!(qhvk(&["verify", "uqsl2", "--beta", "zeta^2"]).status.code(), Some(3));
    assert_eq!(qhvk(&["verify", "uqsl2", "--suite", "everything"]).status.code(), Some(3));
    assert_eq!(qhvk(&["frobnicate"]).status.code(), Some(3));
    assert_eq!(qhvk(&["norm", "--eps", "2"]).status.code(), Some(3));
    let dir = tempfile::tempdir().expect("tempdir");
    let bad = dir.path().join("bad.qhdef");
    std::fs::write(&bad, "field cyclotomic-24\nname t\nbasis 1 0\nunit 1 : 1\nmult 1 X -> 1 : 1\n").expect("write");
    let out = qhvk(&["verify", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 5"));
    assert!(qhvk(&["--help"]).status.success());
}

#[test]
fn thread_cap() {
    let capped = Command::new(env!("CARGO_BIN_EXE_qhvk"))
        .args(["verify", "uqsl2", "--suite", "axioms", "--format", "json"])
        .env("QHVK_THREADS", "1")
        .output()
        .expect("runs");
    assert_eq!(capped.status.code(), Some(0));
    assert_eq!(capped.stdout, qhvk(&["verify", "uqsl2", "--suite", "axioms", "--format", "json"]).stdout);
    let bad = Command::new(env!("CARGO_BIN_EXE_qhvk")).args(["sl2z"]).env("QHVK_THREADS", "0").output().expect("runs");
    assert_eq!(bad.status.code(), Some(3));
}

#[test]
fn worked_example_is_current_export() {
    let out = qhvk(&["export", "algebra"]);
    assert!(out.status.success());
    let on_disk = std::fs::read_to_string(worked_example()).expect("docs/uqsl2.qhdef");
    assert_eq!(String::from_utf8(out.stdout).unwrap(), on_disk);
}

#[test]
fn file_round_trip_keeps_statuses() {
    let builtin = statuses(&json_of(&qhvk(&["verify", "uqsl2", "--suite", "all", "--format", "json"])));
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("q.qhdef");
    assert!(qhvk(&["export", "algebra", "--out", path.to_str().unwrap()]).status.success());
    let out = qhvk(&["verify", path.to_str().unwrap(), "--suite", "all", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let from_file = statuses(&json_of(&out));
    let mut shared = 0;
    for (name, pass) in &from_file {
        if let Some(b) = builtin.get(name) {
            assert_eq!(b, pass, "{name}");
            shared += 1;
        }
    }
    let axioms_and_ribbon = builtin.keys().filter(|n| n.starts_with("axioms.") || n.starts_with("ribbon.")).count();
    assert_eq!(shared, axioms_and_ribbon);
    assert_eq!(from_file.get("algebra.associativity"), Some(&true));
}

#[test]
fn mult_table_typo_fails_with_residual() {
    let text = std::fs::read_to_string(worked_example()).expect("example");
    let typo = text.replacen("mult K K -> K2 : 1\n", "mult K K -> K2 : 2\n", 1);
    assert_ne!(typo, text);
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("typo.qhdef");
    std::fs::write(&path, typo).expect("write");
    let out = qhvk(&["verify", path.to_str().unwrap(), "--suite", "axioms", "--format", "json"]);
    assert_eq!(out.status.code(), Some(2));
    let rep = json_of(&out);
    assert_eq!(rep["status"], "fail");
    let assoc = rep["checks"].as_array().unwrap().iter().find(|c| c["name"] == "algebra.associativity").expect("check");
    assert_eq!(assoc["pass"], false);
    assert_eq!(assoc["first_failure"]["residual"], "1");
}

#[test]
fn exports_match_library() {
    let alg = uqsl2::q_algebra();
    let beta = CycNum::zeta_pow(21);
    let trivial = json_of(&qhvk(&["export", "phi", "--eps", "1", "--format", "json"]));
    assert_eq!(trivial["nonzero"], 1);
    assert_eq!(tensor_from_export(&trivial), alg.tensor_unit(3));
    let phi = json_of(&qhvk(&["export", "phi", "--format", "json"]));
    assert_eq!(phi["slots"], 4096);
    assert_eq!(tensor_from_export(&phi), uqsl2::build_phi(&alg, &beta));
    let mono = json_of(&qhvk(&["export", "monodromy", "--format", "json"]));
    assert_eq!(tensor_from_export(&mono), uqsl2::monodromy_closed_form(&alg, &beta));
    let r = json_of(&qhvk(&["export", "r", "--beta", "zeta^3", "--format", "json"]));
    assert_eq!(tensor_from_export(&r), uqsl2::build_r(&alg, &CycNum::zeta_pow(3)));
    let els = json_of(&qhvk(&["export", "elements", "--format", "json"]));
    assert_eq!(els["elements"]["kappa1"].as_array().unwrap().len(), 2);
    let minus = json_of(&qhvk(&["export", "phi", "--eps", "-1", "--format", "json"]));
    assert_eq!(tensor_from_export(&minus), uqsl2::build_phi_eps(&alg, -1));
    let text = String::from_utf8(qhvk(&["export", "phi", "--eps", "-1"]).stdout).unwrap();
    assert_eq!(text.lines().count(), minus["nonzero"].as_u64().unwrap() as usize);
    assert!(text.lines().all(|l| l.starts_with("phi ")));
    let rep = json_of(&qhvk(&["export", "report", "--format", "json"]));
    assert_eq!(rep["status"], "pass");
    assert_eq!(qhvk(&["export", "algebra", "--format", "json"]).status.code(), Some(3));
}

#[test]
fn sl2z_report() {
    for k in [3, 9, 15, 21] {
        let beta = CycNum::zeta_pow(k);
        let out = qhvk(&["sl2z", "--beta", &format!("zeta^{k}"), "--format", "json"]);
        assert_eq!(out.status.code(), Some(0));
        let rep = json_of(&out);
        let (s, t) = uqsl2::reference_sl2z(&beta);
        let parse = |m: &Value| -> Vec<Vec<CycNum>> {
            m.as_array().unwrap().iter().map(|r| r.as_array().unwrap().iter().map(|x| x.as_str().unwrap().parse().unwrap()).collect()).collect()
        };
        assert_eq!(parse(&rep["data"]["s"]), s);
        assert_eq!(parse(&rep["data"]["t"]), t);
        assert_eq!(statuses(&rep).get("sl2z.st_cubed_identity"), Some(&true));
    }
}

#[test]
fn norm_control_and_eps_plus() {
    let out = qhvk(&["norm", "q0", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let rep = json_of(&out);
    assert_eq!(rep["data"]["tree"]["end"]["kind"], "sat");
    assert_eq!(statuses(&rep).get("control.contains_rst"), Some(&true));
    let out = qhvk(&["norm", "uqsl2", "--eps", "1", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let rep = json_of(&out);
    assert_eq!(statuses(&rep).get("norm.unsat"), Some(&true));
    assert_eq!(statuses(&rep).get("norm.certificate_replayed"), Some(&true));
}
