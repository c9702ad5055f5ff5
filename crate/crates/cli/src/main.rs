//! `gumbel-hull` command-line driver.
//!
//! Every subcommand prints JSON (or CSV for `sample` and for `gumbel` without
//! an output directory) on stdout. The exit code is 0 iff the subcommand's
//! hard gates pass, 1 if a gate fails, 2 on usage or runtime errors.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use gumbel_hull::bodies::{BodySpec, BoundaryPoint, ConvexBody};
use gumbel_hull::experiments::{
    hd_covering_ladder, median_scaling_check, run_gumbel_experiment, volume_ladder, write_records_csv,
    ExperimentConfig, MeshPolicy,
};
use gumbel_hull::geometry::Vec3;
use gumbel_hull::hull::{convex_hull, hausdorff_distance};
use gumbel_hull::limits::{alpha_constant, scaling_constants, unit_ball_volume};
use gumbel_hull::metric::{build_metric_mesh, geodesic_ball_volume, max_spacing_statistic};
use gumbel_hull::sampling::{sample_h_kappa, sample_uniform_area};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "gumbel-hull", version, about = "Random inscribed polytopes and their Gumbel limits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo experiment: records CSV plus a JSON summary.
    Gumbel {
        /// key=value config file; flags below override its entries.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        body: Option<BodySpec>,
        /// Comma-separated sample sizes.
        #[arg(long, value_delimiter = ',')]
        n: Option<Vec<usize>>,
        #[arg(long)]
        replications: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// off | auto | auto:<divisor> | fixed:<resolution>
        #[arg(long)]
        mesh_policy: Option<MeshPolicy>,
        /// Directory for records.csv and summary.json. Without it the records
        /// go to stdout and the summary to stderr.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Hausdorff distance against half the squared covering radius.
    VerifyThm2 {
        #[arg(long)]
        body: BodySpec,
        #[arg(long, value_delimiter = ',', default_value = "100,1000,10000")]
        n: Vec<usize>,
        #[arg(long, default_value_t = 20)]
        seeds: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = "auto")]
        mesh_policy: MeshPolicy,
    },
    /// Geodesic ball volumes against the flat volume down a radius ladder.
    VolumeLadder {
        #[arg(long)]
        body: BodySpec,
        #[arg(long, value_delimiter = ',', default_value = "0.4,0.2,0.1")]
        r: Vec<f64>,
        /// Number of centres drawn from the optimal density.
        #[arg(long, default_value_t = 4)]
        centers: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Medians of the scaled Hausdorff distance against the limit constant.
    MedianCheck {
        #[arg(long)]
        body: BodySpec,
        #[arg(long, value_delimiter = ',', default_value = "1000,10000,100000")]
        n: Vec<usize>,
        #[arg(long, default_value_t = 300)]
        replications: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Allowed relative error at the largest n.
        #[arg(long, default_value_t = 0.25)]
        band: f64,
    },
    /// Scaling constants c_n, a_n, b_n and alpha.
    Constants {
        #[arg(long)]
        body: BodySpec,
        #[arg(long)]
        n: usize,
    },
    /// Boundary sample as CSV.
    Sample {
        #[arg(long)]
        body: BodySpec,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Uniform in surface area instead of the optimal density.
        #[arg(long)]
        area: bool,
    },
    /// Hausdorff distance of one sample's hull.
    Hulldist {
        #[arg(long)]
        body: BodySpec,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Geodesic covering radius and maximal spacing of one sample.
    Coverage {
        #[arg(long)]
        body: BodySpec,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = "auto")]
        mesh_policy: MeshPolicy,
    },
    /// Volume of one geodesic ball.
    Ballvol {
        #[arg(long)]
        body: BodySpec,
        /// Outer normal of the centre, comma-separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        normal: Vec<f64>,
        #[arg(long)]
        r: f64,
        /// Mesh resolution for balls that leave one chart.
        #[arg(long)]
        mesh: Option<f64>,
    },
}

fn point_json(p: &BoundaryPoint, d: usize) -> Value {
    json!({
        "point": p.coords(d),
        "normal": ([p.normal.x, p.normal.y, p.normal.z][..d]).to_vec(),
        "curvature": p.curvature,
    })
}

fn print_json(v: &Value) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn parse_normal(body: &ConvexBody, normal: &[f64]) -> Result<BoundaryPoint> {
    if normal.len() != body.dim() {
        bail!("--normal needs {} components, got {}", body.dim(), normal.len());
    }
    let u = Vec3::new(normal[0], normal[1], normal.get(2).copied().unwrap_or(0.0));
    if !(u.norm() > 0.0) {
        bail!("--normal must be nonzero");
    }
    Ok(body.point_from_normal(&u.normalize()))
}

/// Runs a subcommand; `Ok(false)` means a hard gate failed.
fn run(cmd: Command) -> Result<bool> {
    match cmd {
        Command::Gumbel {
            config,
            body,
            n,
            replications,
            seed,
            mesh_policy,
            out,
        } => {
            let mut cfg = match &config {
                Some(path) => ExperimentConfig::from_file(path)?,
                None => {
                    let body = body.clone().context("--body is required without --config")?;
                    ExperimentConfig {
                        body,
                        n_values: vec![1000],
                        replications: 100,
                        base_seed: 1,
                        mesh_policy: MeshPolicy::Auto(gumbel_hull::experiments::DEFAULT_MESH_DIVISOR),
                        output: None,
                    }
                }
            };
            if let Some(b) = body {
                cfg.body = b;
            }
            if let Some(n) = n {
                cfg.n_values = n;
            }
            if let Some(r) = replications {
                cfg.replications = r;
            }
            if let Some(s) = seed {
                cfg.base_seed = s;
            }
            if let Some(m) = mesh_policy {
                cfg.mesh_policy = m;
            }
            if out.is_some() {
                cfg.output = out;
            }
            cfg.validate()?;
            let report = run_gumbel_experiment(&cfg)?;
            match &cfg.output {
                Some(dir) => {
                    report.write_outputs(dir)?;
                    print_json(&report.summary_json())?;
                }
                None => {
                    write_records_csv(&report.records, std::io::stdout().lock())?;
                    eprintln!("{}", serde_json::to_string_pretty(&report.summary_json())?);
                }
            }
            Ok(report.gates_pass())
        }
        Command::VerifyThm2 {
            body,
            n,
            seeds,
            seed,
            mesh_policy,
        } => {
            let ladder = hd_covering_ladder(&body.build()?, &n, seeds, seed, mesh_policy)?;
            print_json(&serde_json::to_value(&ladder)?)?;
            Ok(ladder.stable)
        }
        Command::VolumeLadder { body, r, centers, seed } => {
            let k = body.build()?;
            let pts = sample_h_kappa(&k, centers, seed)?;
            let ladder = volume_ladder(&k, &r, pts.points())?;
            print_json(&serde_json::to_value(&ladder)?)?;
            Ok(ladder.non_growing)
        }
        Command::MedianCheck {
            body,
            n,
            replications,
            seed,
            band,
        } => {
            let rep = median_scaling_check(&body, &n, replications, seed, band)?;
            print_json(&serde_json::to_value(&rep)?)?;
            Ok(rep.trend_ok && rep.final_within_band)
        }
        Command::Constants { body, n } => {
            let k = body.build()?;
            let d = k.dim();
            let v_k = k.v_kappa()?;
            let sc = scaling_constants(d, n, v_k)?;
            print_json(&json!({
                "body": body.to_string(),
                "d": d,
                "v_kappa": v_k,
                "kappa_d_minus_1": unit_ball_volume(d - 1),
                "alpha": alpha_constant(d),
                "constants": sc,
            }))?;
            Ok(true)
        }
        Command::Sample { body, n, seed, area } => {
            let k = body.build()?;
            let s = if area {
                sample_uniform_area(&k, n, seed)?
            } else {
                sample_h_kappa(&k, n, seed)?
            };
            let mut w = csv::Writer::from_writer(std::io::stdout().lock());
            let names = ["x", "y", "z", "nx", "ny", "nz"];
            let d = k.dim();
            let mut header: Vec<&str> = names[..d].to_vec();
            header.extend(&names[3..3 + d]);
            header.push("curvature");
            w.write_record(&header)?;
            for p in s.points() {
                let mut row: Vec<String> = p.coords(d).iter().map(|x| x.to_string()).collect();
                row.extend([p.normal.x, p.normal.y, p.normal.z][..d].iter().map(|x| x.to_string()));
                row.push(p.curvature.to_string());
                w.write_record(&row)?;
            }
            w.flush()?;
            Ok(true)
        }
        Command::Hulldist { body, n, seed } => {
            let k = body.build()?;
            let poly = convex_hull(&sample_h_kappa(&k, n, seed)?);
            let (delta, facet) = hausdorff_distance(&k, &poly)?;
            print_json(&json!({
                "body": body.to_string(),
                "n": n,
                "seed": seed,
                "facets": poly.facets().len(),
                "hull_vertices": poly.vertex_indices().len(),
                "delta_h": delta,
                "deepest_facet": facet.vertex_indices,
                "cap_center": point_json(&facet.cap_center, k.dim()),
            }))?;
            Ok(true)
        }
        Command::Coverage {
            body,
            n,
            seed,
            mesh_policy,
        } => {
            let k = body.build()?;
            let v_k = k.v_kappa()?;
            let res = mesh_policy
                .resolution(k.dim(), n, v_k)?
                .context("coverage needs a mesh policy other than `off`")?;
            let mesh = build_metric_mesh(&k, res)?;
            let s = sample_h_kappa(&k, n, seed)?;
            let (v, cov) = max_spacing_statistic(&s, &mesh, v_k)?;
            print_json(&json!({
                "body": body.to_string(),
                "n": n,
                "seed": seed,
                "mesh_resolution": mesh.resolution(),
                "rho": cov.radius,
                "rho_precision": cov.precision,
                "v": v,
                "witness": point_json(&cov.witness, k.dim()),
            }))?;
            Ok(true)
        }
        Command::Ballvol { body, normal, r, mesh } => {
            let k = body.build()?;
            let x = parse_normal(&k, &normal)?;
            let m = mesh.map(|h| build_metric_mesh(&k, h)).transpose()?;
            let vol = geodesic_ball_volume(&k, &x, r, m.as_ref())?;
            let flat = unit_ball_volume(k.dim() - 1) * r.powi(k.dim() as i32 - 1);
            print_json(&json!({
                "body": body.to_string(),
                "center": point_json(&x, k.dim()),
                "r": r,
                "volume": vol,
                "flat_volume": flat,
                "defect": (vol - flat).abs(),
            }))?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("gumbel-hull: a hard gate failed");
            ExitCode::from(1)
        }
        Err(e) => {
            let _ = std::io::stdout().flush();
            eprintln!("gumbel-hull: {e:#}");
            ExitCode::from(2)
        }
    }
}
