use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_systole-lab"));
    c.env_remove("SYSTOLE_LAB_JOBS");
    c
}

fn run(c: &mut Command) -> Output {
    c.output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join(name)
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const SMALL_MANIFEST: &str = r#"{
  "schema": 1,
  "tool_version": "0.1.0",
  "seed": 7,
  "tolerances": { "relative": 0.05 },
  "scenes": {
    "disc": { "schema": 1, "model": "flat_disc", "radius": 1.0, "resolution": 16 },
    "torus": { "schema": 1, "model": "flat_torus", "a": [1.0, 0.0], "b": [0.0, 1.0], "resolution": 8 }
  },
  "experiments": [
    { "op": "eigenvalue", "scene": "disc", "resolutions": [16, 32], "expected": 5.783185962946784 },
    { "op": "random_tori", "count": 3, "resolution": 8 },
    { "op": "random_discs", "count": 3, "resolution": 32, "tolerance": 0.02 },
    { "op": "cover", "scene": "torus", "sheets": [2, 4], "constant": 9.869604401089358, "exponent": 2.0, "exponent_tolerance": 0.2 }
  ]
}"#;

fn verify(manifest: &Path, out: &Path, extra: &[&str]) -> Output {
    run(bin().arg("verify").arg("--manifest").arg(manifest).arg("--out").arg(out).args(extra))
}

#[test]
fn missing_scene_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(bin().args(["systole", "--scene"]).arg(dir.path().join("absent.json")).arg("--out").arg(dir.path()));
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn corrupted_scene_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let truncated = write(dir.path(), "scene.json", r#"{"schema": 1, "model": "flat_disc", "radius": 1.0, "resol"#);
    let o = run(bin().args(["spectrum", "--scene"]).arg(&truncated).arg("--out").arg(dir.path()));
    assert_eq!(code(&o), 2);
    let bad_schema = write(dir.path(), "schema.json", r#"{"schema": 9, "model": "flat_disc", "radius": 1.0, "resolution": 8}"#);
    let o = run(bin().args(["spectrum", "--scene"]).arg(&bad_schema).arg("--out").arg(dir.path()));
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("schema"));
}

#[test]
fn manifest_errors_are_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&verify(&dir.path().join("absent.json"), dir.path(), &[])), 2);
    let unknown_scene = SMALL_MANIFEST.replace(r#""scene": "disc""#, r#""scene": "nowhere""#);
    assert_eq!(code(&verify(&write(dir.path(), "a.json", &unknown_scene), dir.path(), &[])), 2);
    let unknown_op = SMALL_MANIFEST.replace(r#""op": "eigenvalue""#, r#""op": "guess""#);
    assert_eq!(code(&verify(&write(dir.path(), "b.json", &unknown_op), dir.path(), &[])), 2);
    let negative = SMALL_MANIFEST.replace(r#""relative": 0.05"#, r#""relative": -1"#);
    assert_eq!(code(&verify(&write(dir.path(), "c.json", &negative), dir.path(), &[])), 2);
    let wrong_surface = SMALL_MANIFEST.replace(r#""op": "cover", "scene": "torus""#, r#""op": "cover", "scene": "disc""#);
    assert_eq!(code(&verify(&write(dir.path(), "d.json", &wrong_surface), dir.path(), &[])), 2);
}

#[test]
fn solver_failure_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let starved = SMALL_MANIFEST.replace(r#""relative": 0.05"#, r#""relative": 0.05, "solver": 1e-300"#);
    let o = verify(&write(dir.path(), "m.json", &starved), dir.path(), &[]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn violated_check_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let wrong = SMALL_MANIFEST.replace("5.783185962946784", "7.0");
    let o = verify(&write(dir.path(), "m.json", &wrong), &dir.path().join("out"), &[]);
    assert_eq!(code(&o), 4);
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/reports.json")).unwrap()).unwrap();
    assert_eq!(doc["summary"]["violated"][0], "eigenvalue:from_below [disc]");
}

#[test]
fn zero_tolerance_is_inconclusive_not_violated() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"{
      "schema": 1, "tool_version": "0.1.0", "tolerances": { "relative": 0.0 },
      "scenes": { "disc": { "schema": 1, "model": "flat_disc", "radius": 1.0, "resolution": 32 } },
      "experiments": [ { "op": "eigenvalue", "scene": "disc", "resolutions": [32, 64, 128], "expected": 5.783185962946784 } ]
    }"#;
    let out = dir.path().join("out");
    let o = verify(&write(dir.path(), "m.json", text), &out, &[]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(out.join("reports.json")).unwrap()).unwrap();
    for r in doc["reports"].as_array().unwrap() {
        assert_eq!(r["verdict"], "Inconclusive", "{r}");
    }
}

#[test]
fn reports_are_byte_identical_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "m.json", SMALL_MANIFEST);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(code(&verify(&m, &a, &["--jobs", "1"])), 0);
    let o = run(bin().env("SYSTOLE_LAB_JOBS", "3").arg("verify").arg("--manifest").arg(&m).arg("--out").arg(&b).args(["--jobs", "1"]));
    assert_eq!(code(&o), 0);
    for name in ["reports.json", "reports.csv", "details/03_cover.json"] {
        assert_eq!(std::fs::read(a.join(name)).unwrap(), std::fs::read(b.join(name)).unwrap(), "{name}");
    }
    let plot = |dir: &Path| {
        let o = run(bin().arg("plot").arg(dir.join("details/03_cover.json")).arg("--out").arg(dir.join("plots")));
        assert_eq!(code(&o), 0);
        std::fs::read(dir.join("plots/03_cover_cover.svg")).unwrap()
    };
    assert_eq!(plot(&a), plot(&b));
}

#[test]
fn seed_override_changes_random_instances() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "m.json", SMALL_MANIFEST);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(code(&verify(&m, &a, &[])), 0);
    assert_eq!(code(&verify(&m, &b, &["--seed", "8"])), 0);
    let read = |p: &Path| -> Value { serde_json::from_str(&std::fs::read_to_string(p.join("reports.json")).unwrap()).unwrap() };
    let (ra, rb) = (read(&a), read(&b));
    assert_eq!(ra["seed"], 7);
    assert_eq!(rb["seed"], 8);
    assert_ne!(ra["reports"], rb["reports"]);
}

#[test]
fn json_outputs_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "m.json", SMALL_MANIFEST);
    let out = dir.path().join("out");
    assert_eq!(code(&verify(&m, &out, &[])), 0);
    let o = run(bin().arg("cover").arg("--scene").arg(data("scenes/square_torus.json")).args(["--refinements", "2"]).arg("--out").arg(&out));
    assert_eq!(code(&o), 0);
    for name in ["reports.json", "cover.json"] {
        let text = std::fs::read_to_string(out.join(name)).unwrap();
        assert!(text.ends_with("}\n"), "{name}");
        let v: Value = serde_json::from_str(&text).unwrap();
        let again: Value = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
        assert_eq!(v, again, "{name}");
    }
    let csv = std::fs::read_to_string(out.join("reports.csv")).unwrap();
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(out.join("reports.json")).unwrap()).unwrap();
    assert_eq!(csv.lines().count(), doc["reports"].as_array().unwrap().len() + 1);
}

#[test]
fn single_scene_commands_write_their_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    let o = run(bin().arg("spectrum").arg("--scene").arg(data("scenes/unit_disc.json")).args(["--refinements", "2"]).arg("--out").arg(out));
    assert_eq!(code(&o), 0);
    let spectrum: Value = serde_json::from_str(&std::fs::read_to_string(out.join("spectrum.json")).unwrap()).unwrap();
    assert_eq!(spectrum["rows"].as_array().unwrap().len(), 2);
    assert!((spectrum["extrapolated"].as_f64().unwrap() - 5.783185962946784).abs() < 0.01);
    let off = std::fs::read_to_string(out.join("unit_disc.off")).unwrap();
    assert!(off.starts_with("OFF"));
    assert!(out.join("unit_disc.edges").exists());

    let o = run(bin().arg("systole").arg("--scene").arg(data("scenes/square_torus.json")).arg("--out").arg(out));
    assert_eq!(code(&o), 0);
    let sys: Value = serde_json::from_str(&std::fs::read_to_string(out.join("systole.json")).unwrap()).unwrap();
    assert!((sys["length"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert_eq!(sys["reference"], 1.0);

    let o = run(bin().arg("lambda").arg("--scene").arg(data("scenes/square_torus.json")).arg("--out").arg(out));
    assert_eq!(code(&o), 0);
    let lam: Value = serde_json::from_str(&std::fs::read_to_string(out.join("lambda.json")).unwrap()).unwrap();
    assert!(lam["lower_bound"].as_f64().unwrap() > 0.0);
    assert!(out.join("candidates.csv").exists());
}

#[test]
fn plot_rejects_missing_or_empty_results() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(bin().arg("plot").arg(dir.path().join("absent.json")).arg("--out").arg(dir.path()));
    assert_eq!(code(&o), 2);
    let o = run(bin().arg("plot").arg("--out").arg(dir.path()));
    assert_eq!(code(&o), 2);
    let empty = write(dir.path(), "empty.json", r#"{"kind": "cover", "scene": "x", "rows": [], "fitted_exponent": null}"#);
    let o = run(bin().arg("plot").arg(&empty).arg("--out").arg(dir.path()));
    assert_eq!(code(&o), 2);
}

#[test]
fn cover_chart_matches_golden_svg() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(bin().arg("plot").arg(data("tests/golden/cover.json")).arg("--out").arg(dir.path()));
    assert_eq!(code(&o), 0);
    let svg = std::fs::read_to_string(dir.path().join("cover_cover.svg")).unwrap();
    let golden = data("tests/golden/cover_cover.svg");
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&golden, &svg).unwrap();
    }
    assert_eq!(svg, std::fs::read_to_string(golden).unwrap());
}

#[test]
fn bundled_acceptance_manifest_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = verify(&data("acceptance.json"), dir.path(), &[]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("reports.json")).unwrap()).unwrap();
    assert!(doc["summary"]["violated"].as_array().unwrap().is_empty());
}
