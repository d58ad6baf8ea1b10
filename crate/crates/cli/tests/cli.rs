use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn fixture(rel: &str) -> String {
    crate_dir().join("fixtures").join(rel).to_string_lossy().into_owned()
}

fn scenario(name: &str) -> String {
    crate_dir().join("scenarios").join(name).to_string_lossy().into_owned()
}

fn varifrac(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_varifrac"))
        .args(args)
        .arg("--out")
        .arg(out)
        .arg("--quiet")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn json(path: PathBuf) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn analyze_segment_reports_two_endpoints() {
    let dir = tempfile::tempdir().unwrap();
    let o = varifrac(&["varifold-analyze", &fixture("segment.json")], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(dir.path().join("report.json"));
    assert!((r["boundary_total_variation"].as_f64().unwrap() - 2.0).abs() < 1e-9);
    assert!(dir.path().join("curvature.csv").exists());
    assert!(dir.path().join("manifest.json").exists());
}

#[test]
fn analyze_refinement_lowers_the_residual() {
    let dir = tempfile::tempdir().unwrap();
    let o = varifrac(&["varifold-analyze", &fixture("circle64.json"), "--refine", "2"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("convergence.csv")).unwrap();
    let res: Vec<f64> = csv.lines().skip(1).map(|l| l.split(',').nth(3).unwrap().parse().unwrap()).collect();
    assert_eq!(res.len(), 3);
    assert!(res.windows(2).all(|w| w[1] < w[0]), "{res:?}");
}

#[test]
fn analyze_tolerance_gives_negative_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let o = varifrac(&["varifold-analyze", &fixture("circle64.json"), "--tol", "1e-30"], dir.path());
    assert_eq!(code(&o), 1);
}

#[test]
fn malformed_json_names_the_byte_offset() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"vertices\": [[0, 0], [1, 0]],\n \"cells\": [[0, 1]").unwrap();
    let o = varifrac(&["varifold-analyze", bad.to_str().unwrap()], &dir.path().join("out"));
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("byte"));
}

#[test]
fn missing_input_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = varifrac(&["varifold-analyze", "/nonexistent/mesh.json"], dir.path());
    assert_eq!(code(&o), 2);
}

#[test]
fn admit_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let run = |args: &[&str]| {
        let o = varifrac(args, dir.path());
        (code(&o), json(dir.path().join("admissibility.json")))
    };
    let (c, _) = run(&["admit", &fixture("admit/square.json"), &fixture("admit/identity.json")]);
    assert_eq!(c, 0);
    let (c, r) = run(&["admit", &fixture("admit/fold_mesh.json"), &fixture("admit/fold.json")]);
    assert_eq!(c, 1);
    assert_eq!(r["item_iv_ciarlet_necas"], false);
    let (c, r) = run(&["admit", &fixture("admit/jump_mesh.json"), &fixture("admit/jump.json")]);
    assert_eq!(c, 1);
    assert_eq!(r["item_v_boundary"], false);
    let (c, _) = run(&[
        "admit",
        &fixture("admit/jump_mesh.json"),
        &fixture("admit/jump.json"),
        "--varifold",
        &fixture("admit/jump_crack.json"),
    ]);
    assert_eq!(c, 0);
}

#[test]
fn admit_rejects_mismatched_deformation() {
    let dir = tempfile::tempdir().unwrap();
    let o = varifrac(&["admit", &fixture("admit/square.json"), &fixture("admit/jump.json")], dir.path());
    assert_eq!(code(&o), 3);
}

#[test]
fn zero_load_run_stays_at_rest() {
    let dir = tempfile::tempdir().unwrap();
    let o = varifrac(&["fracture-run", &scenario("zero_load.toml")], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("step,bulk"));
    let rows: Vec<_> = lines.collect();
    assert_eq!(rows.len(), 4);
    for row in rows {
        assert!(row.split(',').skip(1).all(|v| v.parse::<f64>().unwrap() == 0.0), "{row}");
    }
    let frames = dir.path().join("frames");
    let first = fs::read(frames.join("step_0000.svg")).unwrap();
    for n in 1..=3 {
        assert_eq!(fs::read(frames.join(format!("step_{n:04}.svg"))).unwrap(), first);
    }
}

#[test]
fn scenario_missing_key_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(scenario("zero_load.toml")).unwrap().replace("steps = 3\n", "");
    let path = dir.path().join("s.toml");
    fs::write(&path, text.replace("../fixtures", &crate_dir().join("fixtures").to_string_lossy())).unwrap();
    let o = varifrac(&["fracture-run", path.to_str().unwrap()], &dir.path().join("out"));
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("steps"));
}

#[test]
fn rerun_reproduces_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let o = varifrac(&["fracture-run", &scenario("zero_load.toml"), "--seed", "5"], &a);
    assert_eq!(code(&o), 0);
    let o = varifrac(&["rerun", a.join("manifest.json").to_str().unwrap()], &b);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["trajectory.csv", "steps.json", "final_state.json"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn solver_failure_keeps_partial_outputs() {
    let dir = tempfile::tempdir().unwrap();
    // right side pushed through the left: no orientation-preserving state exists
    let text = format!(
        "steps = 3\nmesh = \"{}\"\n[density]\nmu = 1.0\nlambda = 1.0\n[energy]\nalpha = [0.001]\nbeta = [0.01]\np = [2.0]\ngamma = 0.001\nK = 10.0\n\
         [[bc]]\nside = \"left\"\nramp_to = [0.0, 0.0]\n[[bc]]\nside = \"right\"\nramp_to = [-3.0, 0.0]\n",
        fixture("meshes/rect_4x2.json")
    );
    let path = dir.path().join("flip.toml");
    fs::write(&path, text).unwrap();
    let out = dir.path().join("out");
    let o = varifrac(&["fracture-run", path.to_str().unwrap()], &out);
    assert_eq!(code(&o), 4, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("trajectory.csv").exists());
    assert!(out.join("frames/step_0000.svg").exists());
}
