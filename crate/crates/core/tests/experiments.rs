use gumbel_hull::bodies::BodySpec;
use gumbel_hull::experiments::{
    hd_covering_ladder, median_scaling_check, run_gumbel_experiment, volume_ladder, write_records_csv,
    ExperimentConfig, MeshPolicy,
};
use gumbel_hull::geometry::Vec3;

fn config(body: &str, n_values: &[usize], replications: usize, policy: MeshPolicy) -> ExperimentConfig {
    ExperimentConfig {
        body: body.parse().unwrap(),
        n_values: n_values.to_vec(),
        replications,
        base_seed: 7,
        mesh_policy: policy,
        output: None,
    }
}

fn csv_bytes(cfg: &ExperimentConfig) -> Vec<u8> {
    let report = run_gumbel_experiment(cfg).unwrap();
    let mut out = Vec::new();
    write_records_csv(&report.records, &mut out).unwrap();
    out
}

#[test]
fn one_replication_gives_one_record_per_size() {
    let cfg = config("ball:d=3", &[100, 400, 1600], 1, MeshPolicy::Auto(2.0));
    let report = run_gumbel_experiment(&cfg).unwrap();
    assert_eq!(report.records.len(), 3);
    for (rec, n) in report.records.iter().zip([100, 400, 1600]) {
        assert_eq!(rec.n, n);
        assert!(rec.delta_h > 0.0);
        let v = rec.v.unwrap();
        assert!(v > 0.0 && v < 1.0);
    }
    assert!(report.gates_pass());
}

#[test]
fn records_are_reproducible_byte_for_byte() {
    for cfg in [
        config("ball:d=2", &[100, 1000], 20, MeshPolicy::Auto(2.0)),
        config("ellipsoid:2,1,1", &[100, 300], 6, MeshPolicy::Auto(2.0)),
    ] {
        let a = csv_bytes(&cfg);
        assert_eq!(a, csv_bytes(&cfg));
        let header = String::from_utf8(a[..a.iter().position(|&b| b == b'\n').unwrap()].to_vec()).unwrap();
        assert_eq!(header, "n,replication,seed,delta_h,rho,v,t_hausdorff,t_spacing");
    }
}

#[test]
fn mesh_policy_off_leaves_spacing_columns_empty() {
    let report = run_gumbel_experiment(&config("ball:d=3", &[200], 3, MeshPolicy::Off)).unwrap();
    assert!(report.records.iter().all(|r| r.rho.is_none() && r.v.is_none() && r.t_spacing.is_none()));
}

#[test]
fn circle_spacing_uses_the_exact_oracle() {
    let report = run_gumbel_experiment(&config("ball:d=2", &[1000], 200, MeshPolicy::Auto(2.0))).unwrap();
    let s = &report.sizes[0];
    assert!(s.ks_spacing_exact.is_some());
    assert_eq!(s.exact_oracle_passes(), Some(true), "{s:?}");
}

#[test]
fn config_file_round_trip_and_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.cfg");
    let out = dir.path().join("out");
    std::fs::write(
        &path,
        format!(
            "body = ball:d=2,r=1\nn_values = 100, 200\nreplications = 4\nbase_seed = 3\nmesh_policy = auto\noutput = {}\n",
            out.display()
        ),
    )
    .unwrap();
    let cfg = ExperimentConfig::from_file(&path).unwrap();
    let report = run_gumbel_experiment(&cfg).unwrap();
    report.write_outputs(cfg.output.as_ref().unwrap()).unwrap();
    let csv = std::fs::read_to_string(out.join("records.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 8);
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(json["sizes"].as_array().unwrap().len(), 2);
}

#[test]
fn median_statistic_is_scale_equivariant() {
    // Scaling the body by t scales delta_H by t and the target by t.
    for (small, large) in [("ball:d=3,r=1", "ball:d=3,r=3"), ("ball:d=2,r=1", "ball:d=2,r=3")] {
        let a = median_scaling_check(&small.parse::<BodySpec>().unwrap(), &[500], 25, 1, 1.0).unwrap();
        let b = median_scaling_check(&large.parse::<BodySpec>().unwrap(), &[500], 25, 1, 1.0).unwrap();
        assert!((b.target / a.target - 3.0).abs() < 1e-9);
        assert!((b.rows[0].median / a.rows[0].median - 3.0).abs() < 1e-6, "{} {}", a.rows[0].median, b.rows[0].median);
    }
}

#[test]
fn small_ladders_run() {
    let body = gumbel_hull::bodies::make_ball(3, 1.0).unwrap();
    let ladder = hd_covering_ladder(&body, &[100, 400], 3, 1, MeshPolicy::Auto(2.0)).unwrap();
    assert_eq!(ladder.rows.len(), 6);
    let centers = vec![body.point_from_normal(&Vec3::z())];
    let vol = volume_ladder(&body, &[0.4, 0.2], &centers).unwrap();
    assert!(vol.non_growing);
    let c = gumbel_hull::bodies::make_ball(2, 1.0).unwrap();
    let flat = volume_ladder(&c, &[0.4, 0.2, 0.1, 0.05], &[c.point_from_normal(&Vec3::x())]).unwrap();
    assert!(flat.rows.iter().all(|r| r.defect.unwrap() < 1e-10));
}
