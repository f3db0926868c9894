use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn shortpulse(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shortpulse")).args(args).output().unwrap()
}

fn configs() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/configs"))
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn malformed_config_fails_without_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.json");
    fs::write(&cfg, "{\n  \"schema_version\": 1,\n  \"grid\": { \"n_points\": 64,, }\n}\n").unwrap();
    let out = tmp.path().join("out");
    let o = shortpulse(&["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
    assert!(!out.exists());
    assert_eq!(fs::read_dir(tmp.path()).unwrap().count(), 1);
}

#[test]
fn unknown_field_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(configs().join("run_fv.json")).unwrap().replace("\"cfl\"", "\"cfll\"");
    let cfg = tmp.path().join("typo.json");
    fs::write(&cfg, text).unwrap();
    let out = tmp.path().join("out");
    let o = shortpulse(&["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("cfll"), "{}", stderr(&o));
    assert!(!out.exists());
}

#[test]
fn sweep_with_one_epsilon_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(configs().join("standard_sweep_p2.json"))
        .unwrap()
        .replace("[0.1, 0.05, 0.025, 0.0125]", "[0.1]");
    let cfg = tmp.path().join("one.json");
    fs::write(&cfg, text).unwrap();
    let out = tmp.path().join("out");
    let o = shortpulse(&["sweep", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("epsilons"), "{}", stderr(&o));
    assert!(!out.exists());
}

#[test]
fn existing_output_directory_is_refused() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = configs().join("run_fv.json");
    let o = shortpulse(&["run", "--config", cfg.to_str().unwrap(), "--out", tmp.path().to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("already exists"));
}

#[test]
fn check_passes_on_fresh_runs_and_compare_is_zero_on_itself() {
    let tmp = tempfile::tempdir().unwrap();
    for (name, cfg) in [("disp", "run_dispersive.json"), ("fv", "run_fv.json")] {
        let out = tmp.path().join(name);
        let o = shortpulse(&["run", "--seedless", "--config", configs().join(cfg).to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", stderr(&o));
        for f in ["params.json", "config.json", "diagnostics.csv", "dat/linf_u.dat", "snapshots/0000.f64"] {
            assert!(out.join(f).exists(), "{name}: {f}");
        }
        let o = shortpulse(&["check", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    }
    let disp = tmp.path().join("disp");
    let d = disp.to_str().unwrap();
    let o = shortpulse(&["compare", d, d, "--t", "1", "--p", "1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim().parse::<f64>().unwrap(), 0.0);
    let f = tmp.path().join("fv");
    let o = shortpulse(&["compare", d, f.to_str().unwrap(), "--t", "1", "--window", "-10", "10"]);
    assert!(String::from_utf8_lossy(&o.stdout).trim().parse::<f64>().unwrap() > 0.0);
    let o = shortpulse(&["compare", d, d, "--t", "0.333"]);
    assert!(!o.status.success());
}

#[test]
fn check_reports_missing_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let o = shortpulse(&["check", tmp.path().to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("params.json"), "{}", stderr(&o));
}

#[test]
fn mms_writes_report() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("mms");
    let o = shortpulse(&["mms", "--config", configs().join("mms.json").to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report: serde_json::Value = serde_json::from_slice(&fs::read(out.join("mms.json")).unwrap()).unwrap();
    assert!(report["fitted_order"].as_f64().unwrap() >= 3.5);
}
