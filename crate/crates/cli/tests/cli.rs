use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_semiclassical"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = fs::remove_dir_all(&dir);
    dir
}

fn run(args: &[&str], out: &Path) -> Output {
    bin().arg("--out").arg(out).args(args).output().expect("binary runs")
}

fn bundled_model() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/models/landau_zener.conf")
}

#[test]
fn negative_coupling_is_a_config_error_without_artifacts() {
    let out = scratch("negative_g");
    let o = run(&["table1", "--g", "-1"], &out);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(!out.exists());
}

#[test]
fn table1_writes_header_rows_and_manifest() {
    let out = scratch("table1");
    let o = run(&["table1"], &out);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("table1.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("g,tau,t_c,ratio"));
    assert_eq!(lines.count(), 4);
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("table1.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["outputs"][0], "table1.csv");
    assert_eq!(manifest["outputs"][1], "table1_sensitivity.csv");
    assert!(manifest["timing"]["wall_clock_s"].is_number());
}

#[test]
fn fig1_is_deterministic() {
    let a = scratch("fig1_a");
    let b = scratch("fig1_b");
    for dir in [&a, &b] {
        let o = run(&["fig1", "--g", "0.178885", "--tmax", "200"], dir);
        assert_eq!(o.status.code(), Some(0));
    }
    let csv = fs::read(a.join("fig1.csv")).unwrap();
    assert!(csv.starts_with(b"t,re_x,im_x,re_p,im_p\n"));
    assert_eq!(csv, fs::read(b.join("fig1.csv")).unwrap());
}

#[test]
fn data_headers_are_exact() {
    let out = scratch("headers");
    let cfg = bundled_model();
    let o = bin()
        .arg("--out")
        .arg(&out)
        .arg("--config")
        .arg(&cfg)
        .args(["channels", "--energies", "2", "8"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(run(&["poles"], &out).status.success());
    let first = |f: &str| fs::read_to_string(out.join(f)).unwrap().lines().next().unwrap().to_string();
    assert_eq!(first("channels.csv"), "energy,p_stationary,p_timedependent,discrepancy");
    assert_eq!(first("poles.csv"), "k,s,re_E,im_E,residual");
}

#[test]
fn json_format_keeps_column_order() {
    let out = scratch("json");
    let o = run(&["--format", "json", "poles", "--k-count", "1", "--s-count", "2"], &out);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("poles.json")).unwrap()).unwrap();
    assert_eq!(v["columns"], serde_json::json!(["k", "s", "re_E", "im_E", "residual"]));
    assert_eq!(v["rows"][1][0], 0);
    assert!((v["rows"][1][2].as_f64().unwrap() - std::f64::consts::TAU).abs() < 1e-10);
}

#[test]
fn invalid_model_file_exits_with_two() {
    let out = scratch("bad_model");
    let bad = out.with_extension("conf");
    let text = fs::read_to_string(bundled_model()).unwrap().replace("mass = 10", "mass = -1");
    fs::write(&bad, text).unwrap();
    let o = bin().arg("--out").arg(&out).arg("--config").arg(&bad).arg("channels").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("M > 0"));
    let o = bin().arg("--out").arg(&out).arg("--config").arg(&bad).arg("wkb").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn report_is_byte_identical_and_flags_tampered_rows() {
    let a = scratch("report_a");
    let b = scratch("report_b");
    let ra = run(&["report"], &a);
    let rb = run(&["report"], &b);
    let doc = fs::read_to_string(a.join("report.csv")).unwrap();
    assert_eq!(doc.as_bytes(), fs::read(b.join("report.csv")).unwrap().as_slice());
    assert!(doc.starts_with("id,criterion,status,measured,reference\n"));
    assert_eq!(doc.lines().count(), 10);
    let any_fail = doc.lines().skip(1).any(|l| l.contains(",FAIL,"));
    assert_eq!(ra.status.code(), Some(if any_fail { 1 } else { 0 }));
    assert_eq!(ra.status.code(), rb.status.code());

    let t = scratch("report_tampered");
    let o = run(&["report", "--set", "barrier_abs=1e-30"], &t);
    assert_eq!(o.status.code(), Some(1));
    let tampered = fs::read_to_string(t.join("report.csv")).unwrap();
    let row3 = tampered.lines().find(|l| l.starts_with("3,")).unwrap();
    assert!(row3.contains(",FAIL,"), "{row3}");

    let o = run(&["report", "--set", "no_such_key=1"], &scratch("report_bad_key"));
    assert_eq!(o.status.code(), Some(2));
}
