//! Textual body specifications used by the CLI and config files.
//!
//! ```text
//! spec      := ball | ellipsoid
//! ball      := "ball:" ball-arg ("," ball-arg)*
//! ball-arg  := "d=" integer | "r=" real          (d required, r defaults to 1)
//! ellipsoid := "ellipsoid:" real "," real ["," real]
//! ```
//!
//! Examples: `ball:d=3,r=1`, `ball:d=2`, `ellipsoid:2,1,1`, `ellipsoid:2,1`.

use std::fmt;
use std::str::FromStr;

use super::{make_ball, make_ellipsoid, ConvexBody};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum BodySpec {
    Ball { dim: usize, radius: f64 },
    Ellipsoid { semi_axes: Vec<f64> },
}

impl BodySpec {
    pub fn build(&self) -> Result<ConvexBody> {
        match self {
            BodySpec::Ball { dim, radius } => make_ball(*dim, *radius),
            BodySpec::Ellipsoid { semi_axes } => make_ellipsoid(semi_axes),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            BodySpec::Ball { dim, .. } => *dim,
            BodySpec::Ellipsoid { semi_axes } => semi_axes.len(),
        }
    }
}

fn bad(spec: &str, reason: impl Into<String>) -> Error {
    Error::BodySpec {
        spec: spec.to_string(),
        reason: reason.into(),
    }
}

fn real(spec: &str, s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| bad(spec, format!("`{s}` is not a number")))
}

impl FromStr for BodySpec {
    type Err = Error;

    fn from_str(spec: &str) -> Result<Self> {
        let (kind, args) = spec
            .trim()
            .split_once(':')
            .ok_or_else(|| bad(spec, "expected `kind:arguments`"))?;
        match kind.trim() {
            "ball" => {
                let (mut dim, mut radius) = (None, 1.0);
                for arg in args.split(',') {
                    let (key, value) = arg
                        .split_once('=')
                        .ok_or_else(|| bad(spec, format!("expected key=value, got `{arg}`")))?;
                    match key.trim() {
                        "d" => {
                            dim = Some(value.trim().parse::<usize>().map_err(|_| {
                                bad(spec, format!("`{value}` is not a dimension"))
                            })?)
                        }
                        "r" => radius = real(spec, value)?,
                        other => return Err(bad(spec, format!("unknown ball key `{other}`"))),
                    }
                }
                let dim = dim.ok_or_else(|| bad(spec, "ball needs `d=`"))?;
                Ok(BodySpec::Ball { dim, radius })
            }
            "ellipsoid" => {
                let semi_axes = args
                    .split(',')
                    .map(|s| real(spec, s))
                    .collect::<Result<Vec<_>>>()?;
                if !(2..=3).contains(&semi_axes.len()) {
                    return Err(bad(spec, "ellipsoid needs 2 or 3 semi-axes"));
                }
                Ok(BodySpec::Ellipsoid { semi_axes })
            }
            other => Err(bad(spec, format!("unknown body kind `{other}`"))),
        }
    }
}

impl fmt::Display for BodySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BodySpec::Ball { dim, radius } => write!(f, "ball:d={dim},r={radius}"),
            BodySpec::Ellipsoid { semi_axes } => {
                let s: Vec<String> = semi_axes.iter().map(|a| a.to_string()).collect();
                write!(f, "ellipsoid:{}", s.join(","))
            }
        }
    }
}
