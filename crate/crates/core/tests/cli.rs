use std::path::Path;
use std::process::Command;

fn widomlab() -> Command {
    Command::new(env!("CARGO_BIN_EXE_widomlab"))
}

fn config(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
        .display()
        .to_string()
}

#[test]
fn capacity_table_writes_report_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = widomlab()
        .args(["capacity-table", "--config", &config("capacity.json"), "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let listed = String::from_utf8(out.stdout).unwrap();
    assert!(listed.lines().any(|l| l.ends_with("capacity.csv")));
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["run"]["kind"], "capacity-table");
    assert_eq!(report["run"]["failures"].as_array().unwrap().len(), 0);
}

#[test]
fn kind_mismatch_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = widomlab()
        .args(["cheb-sweep", "--config", &config("capacity.json"), "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("does not match"));
}

#[test]
fn unknown_config_field_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"kind":"capacity-table","sets":[{"bands":[[-1,1]]}],"colour":"red"}"#).unwrap();
    let out = widomlab()
        .args(["capacity-table", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn seed_override_changes_the_hash() {
    let run = |seed: &str| {
        let dir = tempfile::tempdir().unwrap();
        let out = widomlab()
            .args(["conjecture-scan", "--config", &config("scan.json"), "--seed", seed, "--out"])
            .arg(dir.path())
            .output()
            .unwrap();
        assert!(out.status.code() == Some(0) || out.status.code() == Some(2));
        let report: serde_json::Value =
            serde_json::from_slice(&std::fs::read(dir.path().join("report.json")).unwrap()).unwrap();
        report["run"]["config_hash"].as_str().unwrap().to_string()
    };
    assert_ne!(run("1"), run("2"));
}
