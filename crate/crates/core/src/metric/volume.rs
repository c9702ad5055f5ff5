use std::f64::consts::PI;

use super::{chord_length, geodesic_distance_exact_sphere, geodesic_distance_relaxed, q_matrix, tier_distance, MetricMesh};
use crate::bodies::{BoundaryPoint, Chart, ConvexBody};
use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;

/// Metric volume of a geodesic ball of radius `r` on a sphere of radius
/// `radius`: `min(2r, 2 pi sqrt(R))` in the plane, the cap
/// `2 pi R (1 - cos(r / sqrt(R)))` in space.
pub fn sphere_ball_volume(dim: usize, radius: f64, r: f64) -> f64 {
    let theta = r / radius.sqrt();
    if dim == 2 {
        return (2.0 * r).min(2.0 * PI * radius.sqrt());
    }
    if theta >= PI {
        return 4.0 * PI * radius;
    }
    2.0 * PI * radius * (1.0 - theta.cos())
}

/// Radius up to which a ball is guaranteed to fit in one graph chart: since
/// `gamma >= sqrt(c_K) |y|` on the chart, `0.9 sqrt(c_K)` times the chart
/// radius is safe. Larger balls often still fit, depending on the centre.
pub fn volume_radius_limit(body: &ConvexBody) -> f64 {
    if body.dim() == 2 {
        return f64::INFINITY;
    }
    if let Some(r) = body.sphere_radius() {
        return PI * r.sqrt();
    }
    0.9 * body.constants().form_lower.sqrt() * body.graph_domain_radius()
}

const SECTORS_SPHERE: usize = 512;
const SECTORS: usize = 128;
const RADIAL_NODES: usize = 16;

/// `vol_gamma(B_gamma(x, r)) = int_B sqrt(kappa) dH`.
///
/// In the plane this is the metric length `min(2r, v_kappa)` of an arc. In
/// space the ball is written in polar coordinates in the chart of `x`: along
/// each sector ray the radius `t(theta)` where the distance reaches `r` is
/// found by a secant search, and the area element
/// `sqrt(kappa) sqrt(1 + |grad f|^2) t dt` is integrated by Gauss-Legendre
/// in `t` and by the trapezoid rule in `theta`, which is spectrally accurate
/// for the periodic integrand. Distances are exact on spheres and relaxed
/// geodesics otherwise.
///
/// Balls that leave the chart are measured on `mesh` when one is given:
/// graph distances from `x`, with triangles clipped by linear interpolation
/// of the distance along their edges. Graph distances overestimate by up to
/// about 4% depending on direction, so this fallback is coarse.
pub fn geodesic_ball_volume(body: &ConvexBody, x: &BoundaryPoint, r: f64, mesh: Option<&MetricMesh>) -> Result<f64> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidParameter(format!("radius must be positive, got {r}")));
    }
    if body.dim() == 2 {
        return Ok((2.0 * r).min(body.v_kappa()?));
    }
    if let Some(m) = mesh {
        if !m.body().same_body(body) {
            return Err(Error::BodyMismatch);
        }
    }
    match polar_volume(body, x, r) {
        Err(Error::RadiusTooLarge { .. } | Error::ChartRadiusExceeded { .. }) if mesh.is_some() => {
            Ok(mesh_volume(mesh.unwrap(), x, r))
        }
        other => other,
    }
}

fn polar_volume(body: &ConvexBody, x: &BoundaryPoint, r: f64) -> Result<f64> {
    let limit = body.graph_domain_radius();
    let chart = body.chart_at(x);
    let sphere = body.sphere_radius();
    let sectors = if sphere.is_some() { SECTORS_SPHERE } else { SECTORS };
    let q0 = q_matrix(body, &chart, [0.0, 0.0]).ok_or(Error::RadiusTooLarge { radius: r, limit })?;
    let (nodes, weights) = gauss_legendre(RADIAL_NODES);
    let domain = body.graph_domain_radius();
    let mut total = 0.0;
    for j in 0..sectors {
        let theta = 2.0 * PI * j as f64 / sectors as f64;
        let e = [theta.cos(), theta.sin()];
        let dist = |t: f64| -> Result<f64> {
            let (y, _) = body
                .lift(&chart, [t * e[0], t * e[1]])
                .ok_or(Error::RadiusTooLarge { radius: r, limit })?;
            let p = body.point_at(y, None);
            match sphere {
                Some(radius) => Ok(geodesic_distance_exact_sphere(x, &p, radius)),
                None => geodesic_distance_relaxed(body, x, &p),
            }
        };
        let q = q0[(0, 0)] * e[0] * e[0] + 2.0 * q0[(0, 1)] * e[0] * e[1] + q0[(1, 1)] * e[1] * e[1];
        let edge = ray_root(dist, r / q.sqrt(), r, domain)?;
        let mut ray = 0.0;
        for (s, w) in nodes.iter().zip(&weights) {
            let t = 0.5 * edge * (1.0 + s);
            ray += w * t * area_density(body, &chart, [t * e[0], t * e[1]])?;
        }
        total += 0.5 * edge * ray;
    }
    Ok(total * 2.0 * PI / sectors as f64)
}

fn mesh_volume(mesh: &MetricMesh, x: &BoundaryPoint, r: f64) -> f64 {
    let body = mesh.body();
    let sources: Vec<(usize, f64)> = mesh
        .nearest_vertices(&x.ambient, 8)
        .into_iter()
        .filter_map(|v| {
            let p = &mesh.vertices()[v];
            tier_distance(body, x, p).or_else(|| chord_length(body, x, p)).map(|d| (v, d))
        })
        .collect();
    let dist = mesh.dijkstra(&sources);
    mesh.triangles()
        .iter()
        .map(|t| {
            let [a, b, c] = t.map(|i| &mesh.vertices()[i as usize]);
            let area = crate::geometry::triangle_area(&a.ambient, &b.ambient, &c.ambient)
                * (a.curvature.sqrt() + b.curvature.sqrt() + c.curvature.sqrt())
                / 3.0;
            area * clipped_fraction(t.map(|i| dist[i as usize]), r)
        })
        .sum()
}

/// Area fraction of a triangle where the linear interpolant of the vertex
/// values `d` is below `r`.
fn clipped_fraction(mut d: [f64; 3], r: f64) -> f64 {
    d.sort_by(f64::total_cmp);
    let [d0, d1, d2] = d;
    if d2 <= r {
        1.0
    } else if d0 >= r {
        0.0
    } else if d1 >= r {
        (r - d0) / (d1 - d0) * (r - d0) / (d2 - d0)
    } else {
        1.0 - (d2 - r) / (d2 - d0) * (d2 - r) / (d2 - d1)
    }
}

/// `sqrt(kappa) sqrt(1 + |grad f|^2)` at a chart point.
fn area_density(body: &ConvexBody, chart: &Chart, y: [f64; 2]) -> Result<f64> {
    let norm = (y[0] * y[0] + y[1] * y[1]).sqrt();
    let (p, jet) = body.lift(chart, y).ok_or(Error::ChartRadiusExceeded {
        norm,
        limit: body.graph_domain_radius(),
    })?;
    let g2 = jet.gradient[0].powi(2) + jet.gradient[1].powi(2);
    Ok(body.model().curvature(&p).sqrt() * (1.0 + g2).sqrt())
}

/// Solves `dist(t) = r` for the increasing function `dist` by secant steps
/// safeguarded with bisection.
fn ray_root(dist: impl Fn(f64) -> Result<f64>, guess: f64, r: f64, domain: f64) -> Result<f64> {
    let too_far = || Error::RadiusTooLarge { radius: r, limit: domain };
    let mut lo = (0.0, -r);
    let mut hi: Option<(f64, f64)> = None;
    let mut t = guess.min(domain);
    for _ in 0..60 {
        let g = dist(t)? - r;
        if g.abs() <= 1e-13 * r {
            return Ok(t);
        }
        if g < 0.0 {
            lo = (t, g);
        } else {
            hi = Some((t, g));
        }
        t = match hi {
            None => {
                if lo.0 >= domain {
                    return Err(too_far());
                }
                (lo.0 * r / (r + lo.1)).max(lo.0 * 1.01).min(domain)
            }
            Some((th, gh)) => {
                let secant = lo.0 - lo.1 * (th - lo.0) / (gh - lo.1);
                if secant > lo.0 && secant < th {
                    secant
                } else {
                    0.5 * (lo.0 + th)
                }
            }
        };
        if let Some((th, _)) = hi {
            if th - lo.0 <= 1e-14 * th {
                return Ok(t);
            }
        }
    }
    Ok(t)
}
