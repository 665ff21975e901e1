use serde_json::Value;
use std::process::Command;

fn ade(args: &[&str]) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_ade")).args(args).output().expect("binary runs");
    let report = serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)));
    (out.status.code().expect("exit code"), report)
}

#[test]
fn envelope_fields() {
    let (code, r) = ade(&["rho", "--p", "2"]);
    assert_eq!(code, 0);
    assert_eq!(r["schema"], "ade-report/1");
    assert_eq!(r["status"], "ok");
    assert!(r["version"].is_string());
    assert!(r["wall_time_s"].as_f64().unwrap() >= 0.0);
    assert_eq!(r["config"]["command"]["subcommand"], "rho");
}

#[test]
fn rho_over_q() {
    for (p, want) in [("2", "1/2"), ("3", "2/3")] {
        let (_, r) = ade(&["rho", "--p", p]);
        assert_eq!(r["result"]["densities"][0]["rho"], want);
    }
}

#[test]
fn rho_at_split_gaussian_prime() {
    let (code, r) = ade(&["rho", "--field", "Q(i)", "--p", "5"]);
    assert_eq!(code, 0);
    let d = r["result"]["densities"].as_array().unwrap();
    assert_eq!(d.len(), 2);
    assert!(d.iter().all(|x| x["prime"]["kind"] == "Split" && x["prime"]["norm"] == 5));
}

#[test]
fn classify_pinned_point() {
    let (code, r) = ade(&["classify", "--b=-2,4", "--p", "5"]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["classes"][0]["class"], "Weak");
    let (_, r) = ade(&["classify", "--b=-2,4", "--p", "2"]);
    assert_eq!(r["result"]["classes"][0]["class"], "Strong");
    assert_eq!(r["result"]["classes"][0]["brute_force"], "Strong");
}

#[test]
fn orbit_for_a_weak_pair() {
    let (code, r) = ade(&["orbit", "--poly", "1,0,-2,4", "--m", "5"]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["shift"], "-2");
    assert_eq!(r["result"]["q_invariant"], "5");
    assert_eq!(r["result"]["char_poly_matches"], true);
}

#[test]
fn orbit_without_shift_exits_one() {
    let (code, r) = ade(&["orbit", "--poly", "1,0,-2,3", "--m", "5"]);
    assert_eq!(code, 1);
    assert_eq!(r["status"], "error");
}

#[test]
fn bad_input_exits_two() {
    let (code, r) = ade(&["classify", "--type", "Z9", "--b", "1", "--p", "5"]);
    assert_eq!(code, 2);
    assert!(r["error"].as_str().unwrap().contains("Z9"));
    let (code, _) = ade(&["classify", "--b", "1w", "--p", "5"]);
    assert_eq!(code, 2);
}

#[test]
fn casecheck_stated_values() {
    let (code, r) = ade(&["casecheck", "--type", "E7,D5"]);
    assert_eq!(code, 0);
    let rows = r["result"]["types"].as_array().unwrap();
    assert_eq!(rows[0]["exponents"]["x_power"], 70);
    assert_eq!(rows[1]["exponents"]["z_exponents"], serde_json::json!([2, 2, 4, 4]));
}

#[test]
fn empty_scan_reports_no_data() {
    let (code, r) = ade(&["density", "--X", "0"]);
    assert_eq!(code, 0);
    assert_eq!(r["status"], "no data");
    let (_, r) = ade(&["scan", "--X", "0"]);
    assert_eq!(r["status"], "no data");
    assert_eq!(r["result"]["total"], 0);
}

#[test]
fn density_tolerance_controls_exit_code() {
    let (code, r) = ade(&["density", "--X", "4", "--tolerance", "1"]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["within_tolerance"], true);
    let (code, r) = ade(&["density", "--X", "4", "--tolerance", "0"]);
    let diff = r["result"]["difference"].as_f64().unwrap().abs();
    let band = r["result"]["band"].as_f64().unwrap();
    assert_eq!(code, i32::from(diff > band));
}

#[test]
fn out_file_and_dump() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let dump = dir.path().join("points.csv");
    let (code, r) = ade(&["scan", "--X", "3", "--out", out.to_str().unwrap(), "--dump", dump.to_str().unwrap()]);
    assert_eq!(code, 0);
    let saved: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(saved["result"]["total"], r["result"]["total"]);
    let rows = csv::Reader::from_path(&dump).unwrap().records().count() as u64;
    assert_eq!(rows, r["result"]["total"].as_u64().unwrap());
}

#[test]
fn worker_count_does_not_change_results() {
    let (_, a) = ade(&["scan", "--X", "6", "--workers", "1"]);
    let (_, b) = ade(&["scan", "--X", "6", "--workers", "3"]);
    assert_eq!(a["result"], b["result"]);
}
