use serde::Serialize;

use super::config::MeshPolicy;
use super::gumbel::replication_seed;
use crate::bodies::ConvexBody;
use crate::error::{Error, Result};
use crate::hull::{convex_hull, hausdorff_distance};
use crate::metric::{build_metric_mesh, covering_radius, MetricMesh};
use crate::sampling::sample_h_kappa;

/// `delta_H`, `rho` and the residual `|delta_H - rho^2 / 2|` for one sample.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HdCoveringRow {
    pub n: usize,
    pub seed: u64,
    pub delta_h: f64,
    pub rho: f64,
    pub residual: f64,
    /// `residual / rho^3`.
    pub c_hat: f64,
}

fn mesh_for(body: &ConvexBody, n: usize, policy: MeshPolicy) -> Result<MetricMesh> {
    let v_k = body.v_kappa()?;
    let resolution = policy
        .resolution(body.dim(), n, v_k)?
        .ok_or_else(|| Error::Config("the covering radius needs a mesh policy other than `off`".into()))?;
    build_metric_mesh(body, resolution)
}

/// One sample of size `n`: Hausdorff distance of the hull against the
/// covering radius.
pub fn verify_hd_covering(body: &ConvexBody, n: usize, seed: u64, mesh_policy: MeshPolicy) -> Result<HdCoveringRow> {
    let mesh = mesh_for(body, n, mesh_policy)?;
    hd_row(body, n, seed, &mesh)
}

fn hd_row(body: &ConvexBody, n: usize, seed: u64, mesh: &MetricMesh) -> Result<HdCoveringRow> {
    let sample = sample_h_kappa(body, n, seed)?;
    let poly = convex_hull(&sample);
    let (delta_h, _) = hausdorff_distance(body, &poly)?;
    let rho = covering_radius(&sample, mesh)?.radius;
    let residual = (delta_h - 0.5 * rho * rho).abs();
    Ok(HdCoveringRow {
        n,
        seed,
        delta_h,
        rho,
        residual,
        c_hat: residual / rho.powi(3),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct HdLevel {
    pub n: usize,
    pub c_hat: f64,
    pub mean_rho: f64,
    pub max_residual_over_rho2: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct HdLadder {
    pub body: String,
    pub rows: Vec<HdCoveringRow>,
    pub levels: Vec<HdLevel>,
    /// Body-level constant: the largest `C_hat` over the ladder.
    pub c_hat: f64,
    /// `C_hat` at each level stays below `GROWTH_FACTOR` times the largest
    /// value at the coarser levels.
    pub stable: bool,
}

/// Tolerated growth of the per-level `C_hat` (maxima over a handful of
/// seeds fluctuate).
pub const GROWTH_FACTOR: f64 = 1.5;

/// Runs `seeds` samples at each `n` and fits `C_hat = max residual / rho^3`.
pub fn hd_covering_ladder(
    body: &ConvexBody,
    n_values: &[usize],
    seeds: usize,
    base_seed: u64,
    mesh_policy: MeshPolicy,
) -> Result<HdLadder> {
    use rayon::prelude::*;
    let mut rows = Vec::new();
    let mut levels = Vec::new();
    for (i, &n) in n_values.iter().enumerate() {
        let mesh = mesh_for(body, n, mesh_policy)?;
        let level: Vec<HdCoveringRow> = (0..seeds)
            .into_par_iter()
            .map(|r| hd_row(body, n, replication_seed(base_seed, i, r), &mesh))
            .collect::<Result<_>>()?;
        levels.push(HdLevel {
            n,
            c_hat: level.iter().map(|r| r.c_hat).fold(0.0, f64::max),
            mean_rho: level.iter().map(|r| r.rho).sum::<f64>() / level.len().max(1) as f64,
            max_residual_over_rho2: level.iter().map(|r| r.residual / (r.rho * r.rho)).fold(0.0, f64::max),
        });
        rows.extend(level);
    }
    let mut stable = true;
    let mut worst = 0.0_f64;
    for (k, l) in levels.iter().enumerate() {
        if k > 0 && l.c_hat > GROWTH_FACTOR * worst {
            stable = false;
        }
        worst = worst.max(l.c_hat);
    }
    Ok(HdLadder {
        body: body.describe(),
        rows,
        levels,
        c_hat: worst,
        stable,
    })
}

/// Planar analytic check: on the unit circle `delta_H = 1 - cos rho`.
/// Returns the residuals `|(1 - cos rho) - rho^2 / 2|` and the least-squares
/// slope of `ln residual` against `ln rho`.
pub fn circle_residual_slope(rhos: &[f64]) -> (Vec<f64>, f64) {
    let residuals: Vec<f64> = rhos.iter().map(|&r| ((1.0 - r.cos()) - 0.5 * r * r).abs()).collect();
    let xs: Vec<f64> = rhos.iter().map(|r| r.ln()).collect();
    let ys: Vec<f64> = residuals.iter().map(|r| r.ln()).collect();
    (residuals, least_squares_slope(&xs, &ys))
}

pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}
