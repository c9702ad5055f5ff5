use serde::Serialize;

use super::config::{ExperimentConfig, MeshPolicy};
use super::gumbel::{run_gumbel_experiment, GumbelReport};
use crate::bodies::BodySpec;
use crate::error::Result;
use crate::limits::unit_ball_volume;

/// `(n / ln n)^{2/(d-1)} delta_H` for each distance.
pub fn scaled_deltas(d: usize, n: usize, deltas: &[f64]) -> Vec<f64> {
    let nf = n as f64;
    let factor = (nf / nf.ln()).powf(2.0 / (d as f64 - 1.0));
    deltas.iter().map(|x| factor * x).collect()
}

pub fn median(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Limit of the scaled distance: `(1/2) (v_k / kappa_{d-1})^{2/(d-1)}`.
pub fn median_target(d: usize, v_k: f64) -> f64 {
    0.5 * (v_k / unit_ball_volume(d - 1)).powf(2.0 / (d as f64 - 1.0))
}

#[derive(Clone, Debug, Serialize)]
pub struct MedianRow {
    pub n: usize,
    pub median: f64,
    pub relative_error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct MedianReport {
    pub body: String,
    pub target: f64,
    pub rows: Vec<MedianRow>,
    /// The relative error never grows by more than `TREND_SLACK` from one
    /// `n` to the next.
    pub trend_ok: bool,
    pub band: f64,
    /// The median at the largest `n` is within `band` of the target.
    pub final_within_band: bool,
}

/// Allowed growth of the relative error between consecutive sizes.
pub const TREND_SLACK: f64 = 0.02;

/// Builds the median table from an experiment's records.
pub fn median_report(report: &GumbelReport, band: f64) -> MedianReport {
    let d = report.config.dim();
    let target = median_target(d, report.v_k);
    let rows: Vec<MedianRow> = report
        .sizes
        .iter()
        .map(|s| MedianRow {
            n: s.n,
            median: s.median_scaled_delta,
            relative_error: (s.median_scaled_delta - target).abs() / target,
        })
        .collect();
    let trend_ok = rows
        .windows(2)
        .all(|w| w[1].relative_error <= w[0].relative_error + TREND_SLACK);
    let final_within_band = rows.last().is_some_and(|r| r.relative_error <= band);
    MedianReport {
        body: report.config.body.to_string(),
        target,
        rows,
        trend_ok,
        band,
        final_within_band,
    }
}

/// Empirical medians of `(n / ln n)^{2/(d-1)} delta_H` over `replications`
/// runs per `n`, compared with the limit constant.
pub fn median_scaling_check(
    body: &BodySpec,
    n_values: &[usize],
    replications: usize,
    base_seed: u64,
    band: f64,
) -> Result<MedianReport> {
    let cfg = ExperimentConfig {
        body: body.clone(),
        n_values: n_values.to_vec(),
        replications,
        base_seed,
        mesh_policy: MeshPolicy::Off,
        output: None,
    };
    Ok(median_report(&run_gumbel_experiment(&cfg)?, band))
}
