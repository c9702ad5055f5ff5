//! Flat `key = value` experiment configuration.
//!
//! ```text
//! # unit sphere, three sample sizes
//! body = ball:d=3,r=1
//! d = 3                      # optional, must match the body
//! n_values = 1000, 10000
//! replications = 300
//! base_seed = 42
//! mesh_policy = auto         # off | auto | auto:<divisor> | fixed:<resolution>
//! output = results/sphere    # directory for records.csv and summary.json
//! ```
//!
//! Blank lines and `#` comments are ignored. Unknown keys are errors.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::bodies::BodySpec;
use crate::error::{Error, Result};
use crate::limits::{scaling_constants, MIN_SCALING_N};

/// How covering meshes are sized.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum MeshPolicy {
    /// No mesh: covering radius and spacing are not computed.
    Off,
    /// Resolution `rho_estimate / divisor` with
    /// `rho_estimate = (v_k ln n / (kappa_{d-1} n))^{1/(d-1)}`.
    Auto(f64),
    /// A fixed resolution for every `n`.
    Fixed(f64),
}

/// Default divisor of the automatic policy. The covering search refines
/// cells adaptively, so the mesh only needs to resolve the sample scale.
pub const DEFAULT_MESH_DIVISOR: f64 = 2.0;

impl MeshPolicy {
    pub fn resolution(&self, d: usize, n: usize, v_k: f64) -> Result<Option<f64>> {
        match *self {
            MeshPolicy::Off => Ok(None),
            MeshPolicy::Fixed(r) => Ok(Some(r)),
            MeshPolicy::Auto(divisor) => {
                let sc = scaling_constants(d, n.max(MIN_SCALING_N), v_k)?;
                Ok(Some(sc.c_n.sqrt() / divisor))
            }
        }
    }
}

impl FromStr for MeshPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("bad mesh_policy `{s}`"));
        let positive = |v: &str| match v.trim().parse::<f64>() {
            Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
            _ => Err(bad()),
        };
        match s.trim() {
            "off" => Ok(MeshPolicy::Off),
            "auto" => Ok(MeshPolicy::Auto(DEFAULT_MESH_DIVISOR)),
            other => match other.split_once(':') {
                Some(("auto", v)) => Ok(MeshPolicy::Auto(positive(v)?)),
                Some(("fixed", v)) => Ok(MeshPolicy::Fixed(positive(v)?)),
                _ => Err(bad()),
            },
        }
    }
}

impl std::fmt::Display for MeshPolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MeshPolicy::Off => write!(f, "off"),
            MeshPolicy::Auto(d) => write!(f, "auto:{d}"),
            MeshPolicy::Fixed(r) => write!(f, "fixed:{r}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub body: BodySpec,
    pub n_values: Vec<usize>,
    pub replications: usize,
    pub base_seed: u64,
    pub mesh_policy: MeshPolicy,
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn dim(&self) -> usize {
        self.body.dim()
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_values.is_empty() {
            return Err(Error::Config("n_values is empty".into()));
        }
        if self.n_values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("n_values must be strictly increasing".into()));
        }
        if self.n_values[0] < MIN_SCALING_N {
            return Err(Error::SampleSizeTooSmall {
                n: self.n_values[0],
                min: MIN_SCALING_N,
            });
        }
        if self.replications == 0 {
            return Err(Error::Config("replications must be at least 1".into()));
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        std::fs::read_to_string(path)?.parse()
    }
}

impl FromStr for ExperimentConfig {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut body: Option<BodySpec> = None;
        let mut dim: Option<usize> = None;
        let mut n_values = None;
        let mut replications = None;
        let mut base_seed = 0u64;
        let mut mesh_policy = MeshPolicy::Auto(DEFAULT_MESH_DIVISOR);
        let mut output = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            let number = |what: &str| -> Result<u64> {
                value
                    .parse::<u64>()
                    .map_err(|_| Error::Config(format!("line {}: {what} `{value}` is not an integer", lineno + 1)))
            };
            match key {
                "body" => body = Some(value.parse()?),
                "d" => dim = Some(number("d")? as usize),
                "n_values" => {
                    let parsed: std::result::Result<Vec<usize>, _> =
                        value.split(',').map(|v| v.trim().replace('_', "").parse::<usize>()).collect();
                    n_values = Some(parsed.map_err(|_| {
                        Error::Config(format!("line {}: bad n_values `{value}`", lineno + 1))
                    })?);
                }
                "replications" => replications = Some(number("replications")? as usize),
                "base_seed" => base_seed = number("base_seed")?,
                "mesh_policy" => mesh_policy = value.parse()?,
                "output" => output = Some(PathBuf::from(value)),
                other => return Err(Error::Config(format!("line {}: unknown key `{other}`", lineno + 1))),
            }
        }
        let body = body.ok_or_else(|| Error::Config("missing key `body`".into()))?;
        if let Some(d) = dim {
            if d != body.dim() {
                return Err(Error::Config(format!(
                    "d = {d} does not match body `{body}` of dimension {}",
                    body.dim()
                )));
            }
        }
        let cfg = ExperimentConfig {
            body,
            n_values: n_values.ok_or_else(|| Error::Config("missing key `n_values`".into()))?,
            replications: replications.ok_or_else(|| Error::Config("missing key `replications`".into()))?,
            base_seed,
            mesh_policy,
            output,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_documented_example() {
        let cfg: ExperimentConfig = "# comment\nbody = ball:d=3,r=1\nd = 3\nn_values = 1000, 10_000\n\
                                     replications = 300\nbase_seed = 42\nmesh_policy = auto:4\noutput = out\n"
            .parse()
            .unwrap();
        assert_eq!(cfg.n_values, vec![1000, 10_000]);
        assert_eq!(cfg.mesh_policy, MeshPolicy::Auto(4.0));
        assert_eq!(cfg.output, Some(PathBuf::from("out")));
        assert_eq!(cfg.dim(), 3);
    }

    #[test]
    fn rejects_bad_configs() {
        for text in [
            "n_values = 100\nreplications = 1",
            "body = ball:d=3\nn_values = 100, 50\nreplications = 1",
            "body = ball:d=3\nn_values = 100\nreplications = 0",
            "body = ball:d=3\nd = 2\nn_values = 100\nreplications = 1",
            "body = ball:d=3\nn_values = 100\nreplications = 1\ncolour = red",
            "body = ball:d=3\nn_values = 8\nreplications = 1",
            "body = ball:d=3\nn_values = 100\nreplications = 1\nmesh_policy = fine",
        ] {
            assert!(text.parse::<ExperimentConfig>().is_err(), "{text}");
        }
    }

    #[test]
    fn auto_resolution_follows_the_covering_scale() {
        let r = MeshPolicy::Auto(2.0).resolution(3, 1000, 4.0 * std::f64::consts::PI).unwrap().unwrap();
        let expected = (4.0 * 1000f64.ln() / 1000.0).sqrt() / 2.0;
        assert!((r - expected).abs() < 1e-15);
        assert_eq!(MeshPolicy::Off.resolution(3, 1000, 1.0).unwrap(), None);
    }
}
