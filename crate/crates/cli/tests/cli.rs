use std::path::Path;
use std::process::Command;

use epx::io::FamilyFile;

fn epx(args: &[&str], out: &Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_epx"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

const REFERENCE: &str = "1,2,2,-1,pi/25";

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn scan_reports_refined_gap() {
    let dir = tempfile::tempdir().unwrap();
    let o = epx(&["scan", "--two-level", REFERENCE, "--range=-2,2", "--samples", "400"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&dir.path().join("scan.json"));
    let gap = v["min_gap"].as_f64().unwrap();
    assert!((gap - (2.0 * std::f64::consts::PI / 25.0).sin()).abs() < 1e-12);
    let csv = std::fs::read_to_string(dir.path().join("scan.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("lambda,e0,e1"));
    assert_eq!(csv.lines().count(), 401);
}

#[test]
fn crossing_levels_at_zero_mixing() {
    let dir = tempfile::tempdir().unwrap();
    let o = epx(&["scan", "--two-level", "1,2,2,-1,0"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let v = json(&dir.path().join("scan.json"));
    assert!(v["min_gap"].as_f64().unwrap() < 1e-12);
    assert!((v["lambda_at_min_gap"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-8);
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let one = epx(&["scan", "--two-level", REFERENCE, "--samples", "1"], dir.path());
    assert_eq!(one.status.code(), Some(2));
    let missing = epx(&["locate"], dir.path());
    assert_eq!(missing.status.code(), Some(2));
    let bad = epx(&["locate", "--two-level", "1,2,3"], dir.path());
    assert_eq!(bad.status.code(), Some(2));
    let open = epx(&["monodromy", "--two-level", REFERENCE, "--detour=-2,3,0.5,1"], dir.path());
    assert_eq!(open.status.code(), Some(2));
    let tol = epx(&["locate", "--two-level", REFERENCE, "--tol-residual=-1"], dir.path());
    assert_eq!(tol.status.code(), Some(2));
}

#[test]
fn degenerate_family_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let o = epx(&["locate", "--two-level", "1,1,2,-1,0.1"], dir.path());
    assert_eq!(o.status.code(), Some(3));
    let file = dir.path().join("zero.json");
    std::fs::write(&file, r#"{"dim": 2, "h0": [[[1,0],[0,0]],[[0,0],[1,0]]], "h1": [[[2,0],[0,0]],[[0,0],[2,0]]]}"#).unwrap();
    let o = epx(&["locate", "--family", file.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn commuting_family_has_no_eps() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("fam.json");
    std::fs::write(&file, r#"{"dim": 2, "h0": [[[1,0],[0.5,0]],[[0.5,0],[-1,0]]], "h1": [[[1,0],[0,0]],[[0,0],[1,0]]]}"#).unwrap();
    let o = epx(&["locate", "--family", file.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&dir.path().join("eps.json"))["count"], 0);
}

#[test]
fn contour_through_ep_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let o = epx(&["trace", "--two-level", REFERENCE, "--circle", "0.3728610537,0.0828966291,0.05,64,1"], dir.path());
    assert_eq!(o.status.code(), Some(4));
    let msg = String::from_utf8_lossy(&o.stderr);
    assert!(msg.contains("0.3228"), "{msg}");
}

#[test]
fn loop_closure_distinguishes_enclosed_ep() {
    let dir = tempfile::tempdir().unwrap();
    let far = epx(&["trace", "--two-level", REFERENCE, "--circle", "2,0.5,0.3,100,1"], dir.path());
    assert_eq!(far.status.code(), Some(0));
    let v = json(&dir.path().join("monodromy.json"));
    assert_eq!(v["closure"]["closure_after_revolutions"], 1);
    assert_eq!(v["monodromy"]["permutation"], serde_json::json!([0, 1]));

    let near = epx(&["trace", "--two-level", REFERENCE, "--circle", "0.3228,0.0829,0.05,100,2"], dir.path());
    assert_eq!(near.status.code(), Some(0));
    let v = json(&dir.path().join("monodromy.json"));
    assert_eq!(v["closure"]["closure_after_revolutions"], 2);

    let four = epx(&["monodromy", "--two-level", REFERENCE, "--circle", "0.3228,0.0829,0.05,100,4"], dir.path());
    assert_eq!(four.status.code(), Some(0));
    let v = json(&dir.path().join("monodromy.json"));
    assert!(v["monodromy"]["matrix"][0][0][0].as_f64().unwrap() > 1.0 - 1e-6);
    assert_eq!(v["m_fourth_is_identity"], true);
}

#[test]
fn outputs_are_deterministic_and_family_round_trips() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["trace", "--random-symmetric", "3", "--seed", "5", "--circle", "0.1,0.05,4,200,1"];
    for dir in [&a, &b] {
        let o = epx(&args, dir.path());
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for name in ["trajectory.csv", "monodromy.json", "family.json", "trace.json"] {
        let x = std::fs::read(a.path().join(name)).unwrap();
        let y = std::fs::read(b.path().join(name)).unwrap();
        assert_eq!(x, y, "{name} differs");
    }
    let fam = a.path().join("family.json");
    let o = epx(&["locate", "--family", fam.to_str().unwrap()], b.path());
    assert_eq!(o.status.code(), Some(0));
    let first = FamilyFile::parse(&std::fs::read_to_string(&fam).unwrap()).unwrap().family().unwrap();
    let again = FamilyFile::parse(&std::fs::read_to_string(b.path().join("family.json")).unwrap())
        .unwrap()
        .family()
        .unwrap();
    assert_eq!(first, again);
    assert_eq!(json(&b.path().join("eps.json"))["count"], 6);
}

#[test]
fn absorption_flags_axis_side() {
    let dir = tempfile::tempdir().unwrap();
    let o = epx(
        &["absorption", "--two-level", REFERENCE, "--g-range", "0,20", "--phi-sweep", "pi/4-0.01,pi/4+0.01,3"],
        dir.path(),
    );
    // the sweep bounds are not plain numbers
    assert_eq!(o.status.code(), Some(2));
    let q = std::f64::consts::FRAC_PI_4;
    let sweep = format!("{},{},3", q - 0.01, q + 0.01);
    let o = epx(&["absorption", "--two-level", REFERENCE, "--g-range", "0,20", "--phi-sweep", &sweep], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&dir.path().join("absorption.json"));
    let sides: Vec<&str> = v["critical"].as_array().unwrap()[1..].iter().map(|c| c["real_axis"].as_str().unwrap()).collect();
    assert_ne!(sides[0], sides[2]);
    assert_eq!(sides[1], "through");
    // widths approach G·|ω₁| and G·|ω₂|
    assert!((v["width_ratio_at_max_g"].as_f64().unwrap() - 2.0).abs() < 0.1);
    let lines = std::fs::read_to_string(dir.path().join("absorption.csv")).unwrap();
    assert_eq!(lines.lines().next(), Some("g,re_e0,im_e0,re_e1,im_e1"));
}

#[test]
fn weakly_coupled_channel_stays_narrow() {
    let dir = tempfile::tempdir().unwrap();
    let o = epx(&["absorption", "--two-level", "1,2,2,0.05,pi/25", "--g-range", "0,50"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(json(&dir.path().join("absorption.json"))["width_ratio_at_max_g"].as_f64().unwrap() > 10.0);
}

#[test]
fn absorption_needs_two_level_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let o = epx(&["absorption", "--random-symmetric", "3"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}
