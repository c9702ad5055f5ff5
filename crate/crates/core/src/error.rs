use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported dimension {0}: only d = 2 and d = 3 are supported")]
    UnsupportedDimension(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("point is {offset:.3e} off the boundary (tolerance {tolerance:.3e})")]
    OffBoundary { offset: f64, tolerance: f64 },

    #[error("chart radius exceeded: |y| = {norm:.6} > {limit:.6}")]
    ChartRadiusExceeded { norm: f64, limit: f64 },

    #[error("quadrature did not converge: relative change {achieved:.3e} at level {level}")]
    QuadratureNotConverged { level: u32, achieved: f64 },

    #[error("rejection envelope violated: ratio {ratio:.6} exceeds bound {bound:.6}")]
    EnvelopeViolated { ratio: f64, bound: f64 },

    #[error("degenerate (affinely dependent) point set")]
    DegeneratePolytope,

    #[error("resolution {resolution:.3e} needs {triangles} triangles, above the cap of {cap}")]
    ResolutionTooSmall {
        resolution: f64,
        triangles: usize,
        cap: usize,
    },

    #[error("sample set and mesh belong to different bodies")]
    BodyMismatch,

    #[error("radius {radius:.6} exceeds the admissible bound {limit:.6}")]
    RadiusTooLarge { radius: f64, limit: f64 },

    #[error("n = {n} is too small (need n >= {min})")]
    SampleSizeTooSmall { n: usize, min: usize },

    #[error("numerically unstable: {0}")]
    NumericallyUnstable(String),

    #[error("empty sample")]
    EmptySample,

    #[error("mesh too coarse: {0}")]
    MeshTooCoarse(String),

    #[error("invalid body spec `{spec}`: {reason}")]
    BodySpec { spec: String, reason: String },

    #[error("invalid config: {0}")]
    Config(String),

    #[error("{failed} of {total} replications failed (limit 1%)")]
    TooManyFailures { failed: usize, total: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
