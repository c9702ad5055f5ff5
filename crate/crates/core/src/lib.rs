//! Random inscribed polytopes of smooth convex bodies.
//!
//! Points are drawn on the boundary of a convex body `K` with the density
//! `h_kappa = sqrt(kappa) / v_kappa` that minimizes the asymptotic Hausdorff
//! distance of their convex hull to `K`. The crate builds the hull, measures
//! the Hausdorff distance through facet cap heights, computes the geodesic
//! covering radius and the maximal-spacing statistic in the
//! second-fundamental-form metric, and runs the Monte Carlo experiments that
//! compare all of this with the Gumbel limit law.
//!
//! ```
//! use gumbel_hull::bodies::make_ball;
//! use gumbel_hull::hull::{convex_hull, hausdorff_distance};
//! use gumbel_hull::sampling::sample_h_kappa;
//!
//! let sphere = make_ball(3, 1.0)?;
//! let sample = sample_h_kappa(&sphere, 500, 42)?;
//! let hull = convex_hull(&sample);
//! let (delta, _facet) = hausdorff_distance(&sphere, &hull)?;
//! assert!(delta > 0.0 && delta < 0.1);
//! # Ok::<(), gumbel_hull::Error>(())
//! ```

pub mod bodies;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod hull;
pub mod limits;
pub mod metric;
pub mod quadrature;
pub mod sampling;

pub use error::{Error, Result};

#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../book/src/bodies.md")]
    struct Bodies;
    #[doc = include_str!("../../../book/src/hull.md")]
    struct Hull;
    #[doc = include_str!("../../../book/src/metric.md")]
    struct Metric;
    #[doc = include_str!("../../../book/src/coverage.md")]
    struct Coverage;
    #[doc = include_str!("../../../book/src/limits.md")]
    struct Limits;
    #[doc = include_str!("../../../book/src/experiments.md")]
    struct Experiments;
}
