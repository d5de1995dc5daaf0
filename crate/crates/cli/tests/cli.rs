use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn dbc(args: &[&str], cache: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dbc")).args(args).env("DBC_CACHE_DIR", cache).output().expect("dbc runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn solve_writes_vtk_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = dbc(&["solve", "--config", "example1", "--level", "5", "--out", path(&out)], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));

    let vtk = fs::read_to_string(out.join("example1_level5.vtk")).unwrap();
    assert!(vtk.starts_with("# vtk DataFile Version"));
    assert!(vtk.lines().any(|l| l.trim() == "CELLS 8192 32768"), "cell count line missing");
    assert!(vtk.lines().any(|l| l.trim() == "CELL_TYPES 8192"));
    for f in ["y", "z", "u"] {
        assert!(vtk.lines().any(|l| l.starts_with(&format!("SCALARS {f} "))), "field {f} missing");
    }

    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["elements"], 8192);
    assert_eq!(summary["level"], 5);
    assert!(summary["state_residual"].as_f64().unwrap() <= 1e-10);
    let e = summary["errors"]["u"].as_f64().unwrap();
    assert!(e > 0.0 && e < 0.01);
}

fn scalars(vtk: &str, name: &str) -> Vec<f64> {
    let mut lines = vtk.lines().skip_while(|l| !l.starts_with(&format!("SCALARS {name} "))).skip(2);
    let mut out = Vec::new();
    for l in lines.by_ref() {
        let vals: Vec<f64> = l.split_whitespace().map_while(|t| t.parse().ok()).collect();
        if vals.is_empty() {
            break;
        }
        out.extend(vals);
    }
    out
}

#[test]
fn zero_data_gives_zero_fields() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("zero.json");
    fs::write(
        &cfg,
        r#"{"name": "zero", "domain": {"x0": 0, "y0": 0, "x1": 2, "y1": 1}, "gamma": 0.5,
            "f": "0", "y_d": "0", "levels": {"min": 0, "max": 3}}"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = dbc(&["solve", "--config", path(&cfg), "--level", "3", "--out", path(&out)], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let vtk = fs::read_to_string(out.join("zero_level3.vtk")).unwrap();
    for f in ["y", "z", "u"] {
        let v = scalars(&vtk, f);
        assert_eq!(v.len(), 17 * 17);
        assert!(v.iter().all(|x| *x == 0.0), "field {f} not zero");
    }
}

#[test]
fn convergence_csv_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        let o = dbc(&["convergence", "--config", "example1", "--levels", "0..4", "--out", path(out)], dir.path());
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    let csv = fs::read_to_string(&a).unwrap();
    assert_eq!(csv, fs::read_to_string(&b).unwrap());
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "level,h,grad_y,order_grad_y,grad_z,order_grad_z,u,order_u,y,order_y,z,order_z"
    );
    assert_eq!(lines.len(), 6);
    assert!(lines[1].starts_with("0,0.707107,"));
    assert!(lines[5].starts_with("4,0.0441942,"));

    let record: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("a.run.json")).unwrap()).unwrap();
    assert_eq!(record["problem"], "example1");
    assert_eq!(record["config_hash"].as_str().unwrap().len(), 64);
    assert_eq!(record["levels"].as_array().unwrap().len(), 5);
}

#[test]
fn gamma_override_changes_the_study() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.csv");
    let o = dbc(&["convergence", "--config", "example1", "--gamma", "0.01", "--levels", "0..1", "--out", path(&out)], dir.path());
    assert_eq!(code(&o), 0);
    let csv = fs::read_to_string(&out).unwrap();
    let u0: f64 = csv.lines().nth(1).unwrap().split(',').nth(6).unwrap().parse().unwrap();
    assert!(u0 > 1.0, "{u0}");
}

#[test]
fn verify_passes_on_the_builtins() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("v.json");
    let o = dbc(&["verify", "--config", "example1", "--levels", "1..4", "--json", path(&json)], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.lines().filter(|l| l.starts_with("PASS ")).count() >= 7);
    assert!(!stdout.contains("FAIL "));
    let record: serde_json::Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert!(record["verification"]["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
}

#[test]
fn bad_configurations_exit_with_code_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    let out = dir.path().join("out");
    for text in [
        r#"{"base": "example1", "gamma": -1}"#,
        r#"{"base": "example1", "f": "x1 +"}"#,
        r#"{"base": "example1", "domain": {"x0": 0, "y0": 0, "x1": 0, "y1": 1}}"#,
        "not json",
    ] {
        fs::write(&cfg, text).unwrap();
        let o = dbc(&["solve", "--config", path(&cfg), "--level", "1", "--out", path(&out)], dir.path());
        assert_eq!(code(&o), 2, "{text}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let o = dbc(&["solve", "--config", "no-such-problem", "--level", "1", "--out", path(&out)], dir.path());
    assert_eq!(code(&o), 2);
    let o = dbc(&["solve", "--config", "example1", "--gamma", "0", "--level", "1", "--out", path(&out)], dir.path());
    assert_eq!(code(&o), 2);
}

#[test]
fn convergence_without_exact_or_reference_exits_with_code_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("noref.json");
    fs::write(
        &cfg,
        r#"{"name": "noref", "domain": {"x0": 0, "y0": 0, "x1": 1, "y1": 1}, "gamma": 1,
            "f": "1", "y_d": "0", "levels": {"min": 0, "max": 2}}"#,
    )
    .unwrap();
    let o = dbc(&["convergence", "--config", path(&cfg), "--out", path(&dir.path().join("x.csv"))], dir.path());
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn shipped_configs_solve() {
    let dir = tempfile::tempdir().unwrap();
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut n = 0;
    for entry in fs::read_dir(configs).unwrap() {
        let cfg = entry.unwrap().path();
        let o = dbc(&["solve", "--config", path(&cfg), "--level", "1", "--out", path(dir.path())], dir.path());
        assert_eq!(code(&o), 0, "{}: {}", cfg.display(), String::from_utf8_lossy(&o.stderr));
        n += 1;
    }
    assert!(n >= 4);
}
