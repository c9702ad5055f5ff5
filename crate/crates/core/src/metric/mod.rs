//! The Riemannian metric on the boundary given by the second fundamental
//! form, and everything measured in it.
//!
//! In the graph chart over the supporting plane at `p` the metric is
//! `q_u(s) = s^T f''(u) s / sqrt(1 + |f'(u)|^2)`. Distances come in three
//! tiers:
//!
//! * on a sphere of radius `R` the form is `1/R` times the first fundamental
//!   form, so `gamma = sqrt(R) * angle` ([`geodesic_distance_exact_sphere`]);
//! * for nearby pairs, `gamma_bar(x, y) = sqrt(2 dist(y, H_K(x)))`
//!   ([`geodesic_distance_tangent`]), accurate to second order;
//! * far pairs and certification go through graph distances on a
//!   [`MetricMesh`], or through the path-relaxation oracle
//!   [`geodesic_distance_relaxed`].

mod coverage;
mod mesh;
mod volume;

pub use coverage::{covering_radius, max_spacing_statistic, Coverage};
pub use mesh::{build_metric_mesh, MetricMesh, MAX_TRIANGLES};
pub use volume::{geodesic_ball_volume, sphere_ball_volume, volume_radius_limit};

use nalgebra::Matrix2;

use crate::bodies::{BoundaryPoint, Chart, ConvexBody};
use crate::error::{Error, Result};
use crate::geometry::Vec3;

/// The metric matrix `Q` at chart point `u` of the chart at `base`.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricTensor {
    pub base: BoundaryPoint,
    pub u: Vec<f64>,
    /// `(d-1) x (d-1)`, stored in the upper-left block.
    pub q: Matrix2<f64>,
    pub dim: usize,
}

impl MetricTensor {
    /// Eigenvalues in increasing order (one value when `d = 2`).
    pub fn eigenvalues(&self) -> Vec<f64> {
        if self.dim == 2 {
            return vec![self.q[(0, 0)]];
        }
        let (lo, hi) = crate::bodies::sym_eigenvalues(
            2,
            &[[self.q[(0, 0)], self.q[(0, 1)]], [self.q[(1, 0)], self.q[(1, 1)]]],
        );
        vec![lo, hi]
    }

    /// `q_u(s)`.
    pub fn apply(&self, s: &[f64]) -> f64 {
        let k = self.dim - 1;
        let mut acc = 0.0;
        for i in 0..k {
            for j in 0..k {
                acc += self.q[(i, j)] * s[i] * s[j];
            }
        }
        acc
    }
}

/// `Q = f''(u) / sqrt(1 + |f'(u)|^2)` from a lifted chart point.
pub(crate) fn q_matrix(body: &ConvexBody, chart: &Chart, u: [f64; 2]) -> Option<Matrix2<f64>> {
    let (_, jet) = body.lift(chart, u)?;
    let g2 = jet.gradient[0].powi(2) + jet.gradient[1].powi(2);
    let s = 1.0 / (1.0 + g2).sqrt();
    let h = jet.hessian;
    Some(Matrix2::new(h[0][0], h[0][1], h[1][0], h[1][1]) * s)
}

pub fn metric_tensor(body: &ConvexBody, p: &BoundaryPoint, u: &[f64]) -> Result<MetricTensor> {
    let k = body.dim() - 1;
    if u.len() != k {
        return Err(Error::InvalidParameter(format!("chart vector must have {k} entries")));
    }
    let mut uu = [0.0; 2];
    uu[..k].copy_from_slice(u);
    let norm = (uu[0] * uu[0] + uu[1] * uu[1]).sqrt();
    let limit = body.graph_domain_radius();
    if norm > limit {
        return Err(Error::ChartRadiusExceeded { norm, limit });
    }
    let q = q_matrix(body, &body.chart_at(p), uu).ok_or(Error::ChartRadiusExceeded { norm, limit })?;
    Ok(MetricTensor {
        base: *p,
        u: u.to_vec(),
        q,
        dim: body.dim(),
    })
}

/// Angle between two vectors, stable for small and near-antipodal angles.
pub(crate) fn angle_between(a: &Vec3, b: &Vec3) -> f64 {
    a.cross(b).norm().atan2(a.dot(b))
}

/// `gamma(x, y) = sqrt(R) * angle(x, y)` on the sphere of radius `R` centred
/// at the origin.
pub fn geodesic_distance_exact_sphere(x: &BoundaryPoint, y: &BoundaryPoint, radius: f64) -> f64 {
    radius.sqrt() * angle_between(&x.ambient, &y.ambient)
}

/// One-sided `gamma_bar`, or `None` when `y` is outside the chart of `x`.
pub(crate) fn tangent_one_sided(body: &ConvexBody, x: &BoundaryPoint, y: &BoundaryPoint) -> Option<f64> {
    let v = y.ambient - x.ambient;
    let n = x.normal;
    let along = v.dot(&n);
    let tangential = (v - n * along).norm();
    if tangential > body.graph_domain_radius() || x.normal.dot(&y.normal) <= 0.0 {
        return None;
    }
    let gap = body.support(&n) - n.dot(&y.ambient);
    Some((2.0 * gap.max(0.0)).sqrt())
}

/// Symmetrized tangent-plane distance
/// `(gamma_bar(x, y) + gamma_bar(y, x)) / 2` with
/// `gamma_bar(x, y) = sqrt(2 (h_K(u_x) - <u_x, y>))`.
pub fn geodesic_distance_tangent(body: &ConvexBody, x: &BoundaryPoint, y: &BoundaryPoint) -> Result<f64> {
    match (tangent_one_sided(body, x, y), tangent_one_sided(body, y, x)) {
        (Some(a), Some(b)) => Ok(0.5 * (a + b)),
        _ => Err(Error::ChartRadiusExceeded {
            norm: (y.ambient - x.ambient).norm(),
            limit: body.graph_domain_radius(),
        }),
    }
}

/// Fastest distance tier available for a pair: exact on spheres, tangent
/// approximation within chart range, otherwise `None`.
pub(crate) fn tier_distance(body: &ConvexBody, x: &BoundaryPoint, y: &BoundaryPoint) -> Option<f64> {
    if let Some(r) = body.sphere_radius() {
        return Some(geodesic_distance_exact_sphere(x, y, r));
    }
    geodesic_distance_tangent(body, x, y).ok()
}

/// Metric length of the chord `a -> b` by the midpoint rule in the chart at
/// `a`, averaged with the same rule from `b`.
pub(crate) fn chord_length(body: &ConvexBody, a: &BoundaryPoint, b: &BoundaryPoint) -> Option<f64> {
    let one = |p: &BoundaryPoint, q: &BoundaryPoint| {
        let chart = body.chart_at(p);
        let y = chart.project(&q.ambient);
        let qm = q_matrix(body, &chart, [0.5 * y[0], 0.5 * y[1]])?;
        let v = nalgebra::Vector2::new(y[0], y[1]);
        Some(v.dot(&(qm * v)).max(0.0).sqrt())
    };
    Some(0.5 * (one(a, b)? + one(b, a)?))
}

/// Discrete energy minimizer between chart points `0` and `target`, started
/// from `nodes`, returning the polyline length.
fn relax_polyline(body: &ConvexBody, chart: &Chart, nodes: &mut [[f64; 2]], k: usize) -> Option<f64> {
    let m = nodes.len() - 1;
    let scale = (nodes[m][0].powi(2) + nodes[m][1].powi(2)).sqrt();
    let h = 1e-4 * scale;
    let qform = |q: &Matrix2<f64>, d: [f64; 2]| {
        q[(0, 0)] * d[0] * d[0] + (q[(0, 1)] + q[(1, 0)]) * d[0] * d[1] + q[(1, 1)] * d[1] * d[1]
    };
    // d/dm of q_m(d), by central differences.
    let dq = |mid: [f64; 2], d: [f64; 2]| -> Option<[f64; 2]> {
        let mut g = [0.0; 2];
        for (c, gc) in g.iter_mut().enumerate().take(k) {
            let mut lo = mid;
            let mut hi = mid;
            lo[c] -= h;
            hi[c] += h;
            *gc = (qform(&q_matrix(body, chart, hi)?, d) - qform(&q_matrix(body, chart, lo)?, d)) / (2.0 * h);
        }
        Some(g)
    };
    for _sweep in 0..400 {
        let mut max_step = 0.0_f64;
        for i in 1..m {
            let (a, y, b) = (nodes[i - 1], nodes[i], nodes[i + 1]);
            let m1 = [0.5 * (a[0] + y[0]), 0.5 * (a[1] + y[1])];
            let m2 = [0.5 * (y[0] + b[0]), 0.5 * (y[1] + b[1])];
            let d1 = [y[0] - a[0], y[1] - a[1]];
            let d2 = [b[0] - y[0], b[1] - y[1]];
            let (q1, q2) = (q_matrix(body, chart, m1)?, q_matrix(body, chart, m2)?);
            let (g1, g2) = (dq(m1, d1)?, dq(m2, d2)?);
            let mut grad = nalgebra::Vector2::zeros();
            for c in 0..k {
                let t1: f64 = (0..k).map(|j| q1[(c, j)] * d1[j]).sum();
                let t2: f64 = (0..k).map(|j| q2[(c, j)] * d2[j]).sum();
                grad[c] = 2.0 * t1 - 2.0 * t2 + 0.5 * (g1[c] + g2[c]);
            }
            let hess = (q1 + q2) * 2.0;
            let step = if k == 1 {
                nalgebra::Vector2::new(grad[0] / hess[(0, 0)], 0.0)
            } else {
                hess.try_inverse()? * grad
            };
            nodes[i][0] -= step[0];
            nodes[i][1] -= step[1];
            max_step = max_step.max(step.norm());
        }
        if max_step <= 1e-13 * scale {
            break;
        }
    }
    let mut len = 0.0;
    for i in 0..m {
        let (a, b) = (nodes[i], nodes[i + 1]);
        let mid = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
        len += qform(&q_matrix(body, chart, mid)?, [b[0] - a[0], b[1] - a[1]]).max(0.0).sqrt();
    }
    Some(len)
}

/// Accurate geodesic distance for pairs within one graph chart.
///
/// The path is a polyline in the chart of `x` whose interior nodes minimize
/// the discrete energy `sum q_mid(delta)` (Gauss–Seidel sweeps with the
/// local Hessian `2 (Q1 + Q2)` and finite-difference metric gradients). The
/// polyline is relaxed with 4, 8 and 16 segments, each started from the
/// previous one, and the midpoint-rule lengths are extrapolated as
/// `(4 L_16 - L_8) / 3`.
pub fn geodesic_distance_relaxed(body: &ConvexBody, x: &BoundaryPoint, y: &BoundaryPoint) -> Result<f64> {
    let k = body.dim() - 1;
    let chart = body.chart_at(x);
    let target = chart.project(&y.ambient);
    let norm = (target[0].powi(2) + target[1].powi(2)).sqrt();
    let limit = body.graph_domain_radius();
    let too_far = Error::ChartRadiusExceeded { norm, limit };
    if norm > limit || x.normal.dot(&y.normal) <= 0.0 {
        return Err(too_far);
    }
    if norm == 0.0 {
        return Ok(0.0);
    }
    let mut nodes: Vec<[f64; 2]> = (0..=4)
        .map(|i| {
            let t = i as f64 / 4.0;
            [t * target[0], t * target[1]]
        })
        .collect();
    let mut lengths = Vec::new();
    for level in 0..3 {
        if level > 0 {
            let mut finer = Vec::with_capacity(2 * nodes.len() - 1);
            for w in nodes.windows(2) {
                finer.push(w[0]);
                finer.push([0.5 * (w[0][0] + w[1][0]), 0.5 * (w[0][1] + w[1][1])]);
            }
            finer.push(*nodes.last().unwrap());
            nodes = finer;
        }
        lengths.push(relax_polyline(body, &chart, &mut nodes, k).ok_or(Error::ChartRadiusExceeded { norm, limit })?);
    }
    Ok((4.0 * lengths[2] - lengths[1]) / 3.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::{make_ball, make_ellipsoid};

    #[test]
    fn sphere_metric_is_identity_at_the_origin() {
        let s = make_ball(3, 1.0).unwrap();
        let p = s.point_from_normal(&Vec3::new(0.0, 0.6, 0.8));
        let t = metric_tensor(&s, &p, &[0.0, 0.0]).unwrap();
        assert!((t.q - Matrix2::identity()).norm() < 1e-12);
    }

    #[test]
    fn sphere_metric_off_centre_matches_closed_form() {
        // f(y) = 1 - sqrt(1 - |y|^2): f'' = I / w + y y^T / w^3, w = sqrt(1 - |y|^2),
        // and sqrt(1 + |f'|^2) = 1 / w.
        let s = make_ball(3, 1.0).unwrap();
        let p = s.point_from_normal(&Vec3::z());
        let y = [0.18, 0.24];
        let t = metric_tensor(&s, &p, &y).unwrap();
        let w = (1.0 - 0.09_f64).sqrt();
        let yy = nalgebra::Vector2::new(y[0], y[1]);
        let expect = (Matrix2::identity() / w + yy * yy.transpose() / w.powi(3)) * w;
        assert!((t.q - expect).norm() < 1e-10);
    }

    #[test]
    fn ellipsoid_metric_at_the_tip() {
        let e = make_ellipsoid(&[2.0, 1.0, 1.0]).unwrap();
        let p = e.boundary_point(&[2.0, 0.0, 0.0]).unwrap();
        let t = metric_tensor(&e, &p, &[0.0, 0.0]).unwrap();
        assert!((t.q - Matrix2::identity() * 2.0).norm() < 1e-12);
    }

    #[test]
    fn exact_sphere_distances() {
        let s = make_ball(3, 1.0).unwrap();
        let x = s.point_from_normal(&Vec3::x());
        let y = s.point_from_normal(&Vec3::y());
        let z = s.point_from_normal(&-Vec3::x());
        assert!((geodesic_distance_exact_sphere(&x, &y, 1.0) - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert!((geodesic_distance_exact_sphere(&x, &z, 1.0) - std::f64::consts::PI).abs() < 1e-15);
        assert_eq!(geodesic_distance_exact_sphere(&x, &x, 1.0), 0.0);
    }

    #[test]
    fn tangent_distance_on_the_sphere() {
        let s = make_ball(3, 1.0).unwrap();
        let x = s.point_from_normal(&Vec3::z());
        let y = s.point_from_normal(&Vec3::new(0.1_f64.sin(), 0.0, 0.1_f64.cos()));
        let g = geodesic_distance_tangent(&s, &x, &y).unwrap();
        assert!((g - (2.0 * (1.0 - 0.1_f64.cos())).sqrt()).abs() < 1e-14);
        assert!((g - 0.1).abs() < 1e-3);
        assert_eq!(geodesic_distance_tangent(&s, &x, &x).unwrap(), 0.0);
        let far = s.point_from_normal(&-Vec3::z());
        assert!(geodesic_distance_tangent(&s, &x, &far).is_err());
    }

    #[test]
    fn relaxed_distance_is_exact_on_spheres() {
        for r in [1.0, 2.0] {
            let s = make_ball(3, r).unwrap();
            let x = s.point_from_normal(&Vec3::new(0.3, -0.2, 0.9).normalize());
            let y = s.point_from_normal(&Vec3::new(0.45, -0.1, 0.85).normalize());
            let g = geodesic_distance_relaxed(&s, &x, &y).unwrap();
            let exact = geodesic_distance_exact_sphere(&x, &y, r);
            assert!((g - exact).abs() < 1e-8 * exact, "{g} vs {exact}");
        }
    }

    #[test]
    fn relaxed_distance_on_a_circle_is_metric_arclength() {
        let c = make_ball(2, 1.0).unwrap();
        let x = c.point_from_normal(&Vec3::x());
        let y = c.point_from_normal(&Vec3::new(0.3_f64.cos(), 0.3_f64.sin(), 0.0));
        let g = geodesic_distance_relaxed(&c, &x, &y).unwrap();
        assert!((g - 0.3).abs() < 1e-8, "{g}");
    }
}
