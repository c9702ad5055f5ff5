//! Monte Carlo drivers: the Gumbel experiment, the Hausdorff/covering
//! residual study, the ball-volume ladder and the median scaling check.

mod config;
mod gumbel;
mod hd;
mod ladder;
mod median;

pub use config::{ExperimentConfig, MeshPolicy, DEFAULT_MESH_DIVISOR};
pub use gumbel::{
    replication_seed, reseed, run_gumbel_experiment, write_records_csv, ExperimentRecord, GumbelReport,
    ReplicationFailure, SizeSummary,
};
pub use hd::{
    circle_residual_slope, hd_covering_ladder, least_squares_slope, verify_hd_covering, HdCoveringRow, HdLadder,
    HdLevel, GROWTH_FACTOR,
};
pub use ladder::{volume_ladder, VolumeLadder, VolumeRow};
pub use median::{
    median, median_report, median_scaling_check, median_target, scaled_deltas, MedianReport, MedianRow,
    TREND_SLACK,
};
