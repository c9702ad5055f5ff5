use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gumbel-hull")).args(args).output().unwrap()
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn constants_for_the_sphere() {
    let v = json(&["constants", "--body", "ball:d=3", "--n", "1000"]);
    assert!((v["alpha"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((v["v_kappa"].as_f64().unwrap() - 4.0 * std::f64::consts::PI).abs() < 1e-9);
    assert!(v["constants"]["c_n"].as_f64().unwrap() > 0.0);
}

#[test]
fn sample_writes_one_row_per_point() {
    let out = run(&["sample", "--body", "ellipsoid:2,1,1", "--n", "50", "--seed", "3"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "x,y,z,nx,ny,nz,curvature");
    assert_eq!(lines.count(), 50);
    let planar = run(&["sample", "--body", "ball:d=2", "--n", "5", "--area"]);
    assert!(String::from_utf8(planar.stdout).unwrap().starts_with("x,y,nx,ny,curvature\n"));
}

#[test]
fn single_sample_commands() {
    let h = json(&["hulldist", "--body", "ball:d=3", "--n", "200", "--seed", "4"]);
    let c = json(&["coverage", "--body", "ball:d=3", "--n", "200", "--seed", "4"]);
    let (delta, rho) = (h["delta_h"].as_f64().unwrap(), c["rho"].as_f64().unwrap());
    // Unit sphere: the deepest cap has angular radius rho.
    assert!(((1.0 - delta).acos() - rho).abs() < 1e-6 * rho);
    let v = c["v"].as_f64().unwrap();
    assert!((v - (1.0 - rho.cos()) / 2.0).abs() < 1e-9);
}

#[test]
fn ball_volume_on_the_sphere() {
    let v = json(&["ballvol", "--body", "ball:d=3", "--normal", "0,0,-1", "--r", "0.5"]);
    let exact = 2.0 * std::f64::consts::PI * (1.0 - 0.5f64.cos());
    assert!((v["volume"].as_f64().unwrap() - exact).abs() < 1e-9);
    let bad = run(&["ballvol", "--body", "ball:d=3", "--normal", "0,1", "--r", "0.5"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn gumbel_outputs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "body = ball:d=2\nn_values = 200,400\nreplications = 10\nbase_seed = 11\n").unwrap();
    let mut csvs = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(format!("out{k}"));
        let v = json(&["gumbel", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert_eq!(v["gates_pass"], true);
        csvs.push(std::fs::read(out.join("records.csv")).unwrap());
        assert!(out.join("summary.json").exists());
    }
    assert_eq!(csvs[0], csvs[1]);
    let text = String::from_utf8(csvs.remove(0)).unwrap();
    assert!(text.starts_with("n,replication,seed,delta_h,rho,v,t_hausdorff,t_spacing\n"));
    assert_eq!(text.lines().count(), 21);

    // Without --out the records go to stdout.
    let out = run(&["gumbel", "--body", "ball:d=3", "--n", "100", "--replications", "3", "--mesh-policy", "off"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 4);
}

#[test]
fn ladders_and_medians() {
    let t = json(&["verify-thm2", "--body", "ball:d=3", "--n", "100,400", "--seeds", "3"]);
    assert_eq!(t["rows"].as_array().unwrap().len(), 6);
    let l = json(&["volume-ladder", "--body", "ball:d=3", "--centers", "2"]);
    assert_eq!(l["non_growing"], true);
    let m = run(&["median-check", "--body", "ball:d=2", "--n", "1000,4000", "--replications", "40"]);
    let v: Value = serde_json::from_slice(&m.stdout).unwrap();
    assert!((v["target"].as_f64().unwrap() - std::f64::consts::PI.powi(2) / 2.0).abs() < 1e-12);
    assert!(m.status.code() == Some(0) || m.status.code() == Some(1));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(run(&["hulldist", "--body", "cube:1", "--n", "10"]).status.code(), Some(2));
    assert_eq!(run(&["gumbel"]).status.code(), Some(2));
    let bad = tempfile::NamedTempFile::new().unwrap();
    std::fs::write(bad.path(), "body = ball:d=3\ncolour = red\n").unwrap();
    assert_eq!(run(&["gumbel", "--config", bad.path().to_str().unwrap()]).status.code(), Some(2));
}
