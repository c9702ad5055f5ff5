//! Convex hulls of boundary samples and the Hausdorff distance to the body.
//!
//! Because the hull `K_n` is inscribed in `K`, the Hausdorff distance is the
//! largest cap height: for a facet with outward normal `u` and offset `c`,
//! `h_F = h_K(u) - c` is the gap between the facet plane and the parallel
//! supporting plane of `K`, and `delta_H(K_n, K) = max_F h_F`.

mod incremental;
pub mod predicates;

use std::cmp::Ordering;
use std::collections::BTreeSet;

use crate::bodies::{BoundaryPoint, ConvexBody};
use crate::error::{Error, Result};
use crate::geometry::{closest_point_on_segment, closest_point_on_triangle, Vec3};
use crate::sampling::SampleSet;

pub use incremental::hull3;
use predicates::orient2d;

/// Seed of the insertion order of the incremental hull; fixed, so hulls are
/// reproducible.
const INSERTION_SEED: u64 = 0x5EED_4011;

/// A facet of the inscribed polytope (an edge when `d = 2`).
#[derive(Clone, Debug, PartialEq)]
pub struct HullFacet {
    /// Indices into the sample, counterclockwise seen from outside.
    pub vertex_indices: Vec<usize>,
    pub outward_normal: Vec3,
    /// `<outward_normal, v>` for the facet vertices (their mean).
    pub offset: f64,
    /// `h_K(outward_normal) - offset`.
    pub cap_height: f64,
    /// Boundary point of `K` with normal `outward_normal`.
    pub cap_center: BoundaryPoint,
}

/// The convex hull `K_n` of a sample.
#[derive(Clone, Debug)]
pub struct InscribedPolytope {
    sample: SampleSet,
    facets: Vec<HullFacet>,
    is_degenerate: bool,
}

impl InscribedPolytope {
    pub fn sample(&self) -> &SampleSet {
        &self.sample
    }

    pub fn facets(&self) -> &[HullFacet] {
        &self.facets
    }

    pub fn is_degenerate(&self) -> bool {
        self.is_degenerate
    }

    /// Sorted indices of the sample points that are hull vertices.
    pub fn vertex_indices(&self) -> Vec<usize> {
        let set: BTreeSet<usize> = self
            .facets
            .iter()
            .flat_map(|f| f.vertex_indices.iter().copied())
            .collect();
        set.into_iter().collect()
    }

    /// `V - E + F` of the boundary complex (`d = 3`), or `V - E` (`d = 2`).
    pub fn euler_characteristic(&self) -> i64 {
        let v = self.vertex_indices().len() as i64;
        let f = self.facets.len() as i64;
        if self.sample.body().dim() == 2 {
            return v - f;
        }
        let mut edges = BTreeSet::new();
        for facet in &self.facets {
            let ix = &facet.vertex_indices;
            for i in 0..3 {
                let (a, b) = (ix[i], ix[(i + 1) % 3]);
                edges.insert((a.min(b), a.max(b)));
            }
        }
        v - edges.len() as i64 + f
    }
}

/// Normal of a triangle from the cross product of its two longest edges.
fn triangle_normal(a: &Vec3, b: &Vec3, c: &Vec3) -> Vec3 {
    let e = [b - a, c - b, a - c];
    let shortest = (0..3)
        .min_by(|&i, &j| e[i].norm_squared().total_cmp(&e[j].norm_squared()))
        .unwrap();
    let (p, q) = ((shortest + 1) % 3, (shortest + 2) % 3);
    e[p].cross(&e[q]).normalize()
}

fn make_facet(body: &ConvexBody, pts: &[BoundaryPoint], ix: Vec<usize>, normal: Vec3) -> HullFacet {
    let offset = ix.iter().map(|&i| normal.dot(&pts[i].ambient)).sum::<f64>() / ix.len() as f64;
    HullFacet {
        cap_height: body.support(&normal) - offset,
        cap_center: body.point_from_normal(&normal),
        vertex_indices: ix,
        outward_normal: normal,
        offset,
    }
}

/// Monotone chain hull of planar points; vertex indices in counterclockwise
/// order, collinear points dropped.
pub fn hull2(pts: &[Vec3]) -> Option<Vec<usize>> {
    let mut order: Vec<usize> = (0..pts.len()).collect();
    order.sort_by(|&i, &j| {
        pts[i].x.total_cmp(&pts[j].x).then(pts[i].y.total_cmp(&pts[j].y))
    });
    order.dedup_by(|i, j| pts[*i].x == pts[*j].x && pts[*i].y == pts[*j].y);
    if order.len() < 3 {
        return None;
    }
    let mut hull: Vec<usize> = Vec::with_capacity(order.len() + 1);
    for pass in 0..2 {
        let base = hull.len();
        let seq: Box<dyn Iterator<Item = &usize>> = if pass == 0 {
            Box::new(order.iter())
        } else {
            Box::new(order.iter().rev())
        };
        for &i in seq {
            while hull.len() >= base + 2
                && orient2d(&pts[hull[hull.len() - 2]], &pts[hull[hull.len() - 1]], &pts[i])
                    != Ordering::Greater
            {
                hull.pop();
            }
            hull.push(i);
        }
        hull.pop();
    }
    (hull.len() >= 3).then_some(hull)
}

/// `K_n = conv(points)`. Affinely dependent input yields a degenerate
/// polytope without facets.
pub fn convex_hull(points: &SampleSet) -> InscribedPolytope {
    let body = points.body();
    let pts = points.points();
    let coords: Vec<Vec3> = pts.iter().map(|p| p.ambient).collect();
    let facets = if body.dim() == 2 {
        hull2(&coords).map(|ring| {
            (0..ring.len())
                .map(|k| {
                    let (i, j) = (ring[k], ring[(k + 1) % ring.len()]);
                    let e = coords[j] - coords[i];
                    let normal = Vec3::new(e.y, -e.x, 0.0).normalize();
                    make_facet(body, pts, vec![i, j], normal)
                })
                .collect::<Vec<_>>()
        })
    } else {
        hull3(&coords, INSERTION_SEED).map(|tris| {
            tris.into_iter()
                .map(|t| {
                    let [a, b, c] = t.map(|i| i as usize);
                    let normal = triangle_normal(&coords[a], &coords[b], &coords[c]);
                    make_facet(body, pts, vec![a, b, c], normal)
                })
                .collect()
        })
    };
    InscribedPolytope {
        sample: points.clone(),
        is_degenerate: facets.is_none(),
        facets: facets.unwrap_or_default(),
    }
}

/// `delta_H(K_n, K) = max_F h_F` together with the maximizing facet.
pub fn hausdorff_distance(body: &ConvexBody, poly: &InscribedPolytope) -> Result<(f64, HullFacet)> {
    if !body.same_body(poly.sample.body()) {
        return Err(Error::BodyMismatch);
    }
    if poly.is_degenerate {
        return Err(Error::DegeneratePolytope);
    }
    let best = poly
        .facets
        .iter()
        .max_by(|a, b| a.cap_height.total_cmp(&b.cap_height))
        .ok_or(Error::DegeneratePolytope)?;
    Ok((best.cap_height.max(0.0), best.clone()))
}

/// Euclidean distance from `x` to the boundary of the polytope, by
/// projection onto every facet.
pub fn distance_to_polytope_boundary(poly: &InscribedPolytope, x: &Vec3) -> f64 {
    let pts = poly.sample.points();
    poly.facets
        .iter()
        .map(|f| {
            let v = &f.vertex_indices;
            let q = if v.len() == 2 {
                closest_point_on_segment(x, &pts[v[0]].ambient, &pts[v[1]].ambient)
            } else {
                closest_point_on_triangle(x, &pts[v[0]].ambient, &pts[v[1]].ambient, &pts[v[2]].ambient)
            };
            (x - q).norm_squared()
        })
        .fold(f64::INFINITY, f64::min)
        .sqrt()
}

/// Direct evaluation of `max_{x in mesh} dist(x, K_n)` over boundary points
/// of `K`. Points of the boundary of `K` lie outside the interior of `K_n`,
/// so the distance to `K_n` is the distance to its boundary.
pub fn brute_force_hausdorff(poly: &InscribedPolytope, mesh: &[Vec3]) -> f64 {
    mesh.iter()
        .map(|x| distance_to_polytope_boundary(poly, x))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::make_ball;
    use crate::geometry::fibonacci_directions;
    use crate::sampling::sample_h_kappa;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn square_in_the_circle() {
        let c = make_ball(2, 1.0).unwrap();
        let normals: Vec<Vec3> = (0..4)
            .map(|k| {
                let t = FRAC_PI_2 * k as f64;
                Vec3::new(t.cos(), t.sin(), 0.0)
            })
            .collect();
        let poly = convex_hull(&SampleSet::from_normals(&c, &normals));
        assert_eq!(poly.facets().len(), 4);
        let (d, _) = hausdorff_distance(&c, &poly).unwrap();
        assert!((d - (1.0 - 0.5_f64.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn regular_tetrahedron_in_the_sphere() {
        let s = make_ball(3, 1.0).unwrap();
        let normals = [
            Vec3::new(1.0, 1.0, 1.0),
            Vec3::new(1.0, -1.0, -1.0),
            Vec3::new(-1.0, 1.0, -1.0),
            Vec3::new(-1.0, -1.0, 1.0),
        ];
        let poly = convex_hull(&SampleSet::from_normals(&s, &normals));
        assert_eq!(poly.facets().len(), 4);
        assert_eq!(poly.euler_characteristic(), 2);
        let (d, f) = hausdorff_distance(&s, &poly).unwrap();
        assert!((d - 2.0 / 3.0).abs() < 1e-14);
        assert!((f.cap_center.ambient - f.outward_normal).norm() < 1e-15);
    }

    #[test]
    fn random_sphere_hull_is_simplicial() {
        let s = make_ball(3, 1.0).unwrap();
        let sample = sample_h_kappa(&s, 100, 9).unwrap();
        let poly = convex_hull(&sample);
        assert_eq!(poly.facets().len(), 196);
        assert_eq!(poly.euler_characteristic(), 2);
        assert_eq!(poly.vertex_indices().len(), 100);
        for f in poly.facets() {
            assert!(f.cap_height >= 0.0);
            for p in sample.points() {
                assert!(f.outward_normal.dot(&p.ambient) <= f.offset + 1e-12);
            }
        }
    }

    #[test]
    fn degenerate_input_is_flagged() {
        let s = make_ball(3, 1.0).unwrap();
        let circle: Vec<Vec3> = fibonacci_directions(2, 10);
        let poly = convex_hull(&SampleSet::from_normals(&s, &circle));
        assert!(poly.is_degenerate());
        assert!(matches!(hausdorff_distance(&s, &poly), Err(Error::DegeneratePolytope)));
    }

    #[test]
    fn hausdorff_is_monotone_on_nested_samples() {
        for d in [2, 3] {
            let b = make_ball(d, 1.0).unwrap();
            let sample = sample_h_kappa(&b, 4000, 2).unwrap();
            let mut last = f64::INFINITY;
            for m in [50, 200, 1000, 4000] {
                let (h, _) = hausdorff_distance(&b, &convex_hull(&sample.truncated(m))).unwrap();
                assert!(h <= last && h > 0.0);
                last = h;
            }
        }
    }

    #[test]
    fn mismatched_body_is_rejected() {
        let a = make_ball(3, 1.0).unwrap();
        let b = make_ball(3, 2.0).unwrap();
        let poly = convex_hull(&sample_h_kappa(&a, 20, 1).unwrap());
        assert!(matches!(hausdorff_distance(&b, &poly), Err(Error::BodyMismatch)));
    }
}
