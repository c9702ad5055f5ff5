use rayon::prelude::*;
use serde::Serialize;

use crate::bodies::{BoundaryPoint, ConvexBody};
use crate::error::Result;
use crate::limits::unit_ball_volume;
use crate::metric::geodesic_ball_volume;

#[derive(Clone, Debug, Serialize)]
pub struct VolumeRow {
    pub center: usize,
    pub center_point: [f64; 3],
    pub r: f64,
    /// `None` when the ball does not fit in one chart.
    pub volume: Option<f64>,
    pub defect: Option<f64>,
    /// `defect / r^d`.
    pub defect_ratio: Option<f64>,
    /// Leading term `pi r^4 / (12 R)` of the defect on a sphere of radius `R`.
    pub sphere_series: Option<f64>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VolumeLadder {
    pub body: String,
    pub rows: Vec<VolumeRow>,
    /// For every centre, `defect / r^d` does not grow as `r` decreases (10%
    /// slack plus an absolute floor of `1e-10 / r^d` for exact zeros).
    pub non_growing: bool,
    pub max_defect_ratio: f64,
}

/// `vol_gamma(B(x, r))` against `kappa_{d-1} r^{d-1}` for every centre and
/// radius. Balls are measured without a mesh, so radii that leave the chart
/// of their centre are reported as errors rather than approximated.
pub fn volume_ladder(body: &ConvexBody, r_values: &[f64], centers: &[BoundaryPoint]) -> Result<VolumeLadder> {
    let d = body.dim();
    let k = unit_ball_volume(d - 1);
    let jobs: Vec<(usize, f64)> = (0..centers.len())
        .flat_map(|c| r_values.iter().map(move |&r| (c, r)))
        .collect();
    let rows: Vec<VolumeRow> = jobs
        .par_iter()
        .map(|&(c, r)| {
            let x = &centers[c];
            let flat = k * r.powi(d as i32 - 1);
            let sphere_series = match (d, body.sphere_radius()) {
                (3, Some(radius)) => Some(std::f64::consts::PI * r.powi(4) / (12.0 * radius)),
                _ => None,
            };
            let (volume, error) = match geodesic_ball_volume(body, x, r, None) {
                Ok(v) => (Some(v), None),
                Err(e) => (None, Some(e.to_string())),
            };
            let defect = volume.map(|v| (v - flat).abs());
            VolumeRow {
                center: c,
                center_point: [x.ambient.x, x.ambient.y, x.ambient.z],
                r,
                volume,
                defect,
                defect_ratio: defect.map(|x| x / r.powi(d as i32)),
                sphere_series,
                error,
            }
        })
        .collect();
    let mut non_growing = true;
    for c in 0..centers.len() {
        let mut mine: Vec<&VolumeRow> = rows.iter().filter(|row| row.center == c && row.volume.is_some()).collect();
        mine.sort_by(|a, b| b.r.total_cmp(&a.r));
        for w in mine.windows(2) {
            let (big, small) = (w[0].defect_ratio.unwrap(), w[1].defect_ratio.unwrap());
            if small > 1.1 * big + 1e-10 / w[1].r.powi(d as i32) {
                non_growing = false;
            }
        }
    }
    let max_defect_ratio = rows.iter().filter_map(|r| r.defect_ratio).fold(0.0, f64::max);
    Ok(VolumeLadder {
        body: body.describe(),
        rows,
        non_growing,
        max_defect_ratio,
    })
}
