use std::path::Path;
use std::process::Command;

use bubblecut::io::write_field_csv;
use bubblecut::metrics::{generate_metric, MetricSpec};
use bubblecut::ScalarField;

fn bubblecut(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_bubblecut")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

const SMALL_SHRINK: &str = r#"{
  "metric": { "name": "euclidean", "n": 65, "half_width": 1.05, "disk_radius": 1.0 },
  "operation": { "name": "shrink", "phi": { "kind": "constant", "value": 0.1 } },
  "schedule": { "eps0": 0.25, "rho": 0.15 }
}"#;

#[test]
fn shrink_run_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", SMALL_SHRINK);
    let out = dir.path().join("out");
    let o = bubblecut(&["shrink", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["operation"], "shrink");
    assert_eq!(report["result"]["verdict"]["kind"], "empties");
    assert_eq!(report["result"]["trace"]["nested"], true);
    assert!(out.join("config.json").exists());
    assert!(out.join("trace/manifest.json").exists());
    assert!(out.join("trace/step_000.pgm").exists());
}

#[test]
fn reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.json",
        r#"{
  "metric": { "name": "euclidean", "n": 65, "half_width": 1.05, "disk_radius": 1.0 },
  "operation": { "name": "staircase", "phi": 0.1 },
  "schedule": { "eps0": 0.25, "rho": 0.15 },
  "seed": 3
}"#,
    );
    let mut reports = Vec::new();
    for name in ["a", "b"] {
        let out = dir.path().join(name);
        let o = bubblecut(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]);
        assert!(matches!(o.status.code(), Some(0 | 2)), "{}", String::from_utf8_lossy(&o.stderr));
        reports.push(std::fs::read(out.join("report.json")).unwrap());
    }
    assert_eq!(reports[0], reports[1]);
}

#[test]
fn bad_schedule_exits_with_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", &SMALL_SHRINK.replace("\"rho\": 0.15", "\"rho\": -0.1"));
    let o = bubblecut(&["shrink", "--config", &cfg, "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("schedule"));
}

#[test]
fn verb_must_match_configuration() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", SMALL_SHRINK);
    let o = bubblecut(&["grow", "--config", &cfg, "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("shrink"));
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", &SMALL_SHRINK.replace("\"schedule\"", "\"shedule\""));
    let o = bubblecut(&["run", "--config", &cfg, "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn failed_verification_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let spec = MetricSpec::Euclidean { n: 65, half_width: 1.0, disk_radius: None };
    let g = generate_metric(&spec).unwrap();
    let saddle = ScalarField::from_fn(&g, |[x, y]| x * x - y * y + 0.3 * x);
    let bowl = ScalarField::from_fn(&g, |[x, y]| x * x + y * y);
    write_field_csv(&dir.path().join("saddle.csv"), &g, &saddle).unwrap();
    write_field_csv(&dir.path().join("bowl.csv"), &g, &bowl).unwrap();
    for (field, code) in [("saddle.csv", 2), ("bowl.csv", 0)] {
        let cfg = write(
            dir.path(),
            "v.json",
            &format!(
                r#"{{ "metric": {}, "operation": {{ "name": "verify", "field": "{}" }} }}"#,
                serde_json::to_string(&spec).unwrap(),
                dir.path().join(field).display()
            ),
        );
        let o = bubblecut(&["verify", "--config", &cfg, "--out", dir.path().join("o").to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(code), "{field}: {}", String::from_utf8_lossy(&o.stderr));
    }
}
