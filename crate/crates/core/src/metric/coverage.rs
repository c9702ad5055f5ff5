use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

use kiddo::{ImmutableKdTree, SquaredEuclidean};
use rayon::prelude::*;

use super::{chord_length, geodesic_ball_volume, sphere_ball_volume, tier_distance, MetricMesh};
use crate::bodies::{BoundaryPoint, ConvexBody};
use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::sampling::SampleSet;

/// The geodesic covering radius with the point that attains it.
#[derive(Clone, Copy, Debug)]
pub struct Coverage {
    pub radius: f64,
    pub witness: BoundaryPoint,
    /// Upper bound on `true radius - radius` left by the search (zero in
    /// the plane, where the computation is exact).
    pub precision: f64,
}

/// Relative stopping precision of the branch and bound.
const RELATIVE_PRECISION: f64 = 1e-7;
const MAX_DEPTH: u32 = 48;

/// Distance-to-sample field `f(z) = min_x gamma(z, x)`.
struct Field<'a> {
    body: &'a ConvexBody,
    mesh: &'a MetricMesh,
    points: &'a [BoundaryPoint],
    tree: ImmutableKdTree<f64, 3>,
    /// `gamma >= lipschitz * |z - x|` for nearby pairs.
    lipschitz: f64,
    graph: OnceLock<Vec<f64>>,
}

fn key(p: &Vec3) -> [f64; 3] {
    [p.x, p.y, p.z]
}

impl<'a> Field<'a> {
    fn new(mesh: &'a MetricMesh, points: &'a [BoundaryPoint]) -> Self {
        let body = mesh.body();
        let coords: Vec<[f64; 3]> = points.iter().map(|p| key(&p.ambient)).collect();
        let lipschitz = match body.sphere_radius() {
            Some(r) => 1.0 / r.sqrt(),
            None => 0.9 * body.constants().form_lower.sqrt(),
        };
        Self {
            body,
            mesh,
            points,
            tree: ImmutableKdTree::new_from_slice(&coords),
            lipschitz,
            graph: OnceLock::new(),
        }
    }

    fn eval(&self, z: &BoundaryPoint) -> f64 {
        let q = key(&z.ambient);
        let nearest = self.tree.nearest_one::<SquaredEuclidean>(&q);
        let Some(first) = tier_distance(self.body, z, &self.points[nearest.item as usize]) else {
            return self.graph_eval(z);
        };
        let reach = first / self.lipschitz;
        self.tree
            .within_unsorted::<SquaredEuclidean>(&q, reach * reach * (1.0 + 1e-12))
            .iter()
            .filter_map(|c| tier_distance(self.body, z, &self.points[c.item as usize]))
            .fold(first, f64::min)
    }

    /// Fallback when no sample is within chart range: graph distances from
    /// the samples, continued to `z` from its nearest vertex.
    fn graph_eval(&self, z: &BoundaryPoint) -> f64 {
        let field = self.graph.get_or_init(|| {
            let sources: Vec<(usize, f64)> = self
                .points
                .iter()
                .map(|p| {
                    let v = self.mesh.nearest_vertex(&p.ambient);
                    (v, link(self.body, p, &self.mesh.vertices()[v]))
                })
                .collect();
            self.mesh.dijkstra(&sources)
        });
        let v = self.mesh.nearest_vertex(&z.ambient);
        field[v] + link(self.body, z, &self.mesh.vertices()[v])
    }
}

fn link(body: &ConvexBody, a: &BoundaryPoint, b: &BoundaryPoint) -> f64 {
    tier_distance(body, a, b)
        .or_else(|| chord_length(body, a, b))
        .unwrap_or(f64::INFINITY)
}

struct Cell {
    points: [BoundaryPoint; 3],
    values: [f64; 3],
    upper: f64,
    depth: u32,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.upper == other.upper
    }
}

impl Eq for Cell {}

impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.upper.total_cmp(&other.upper)
    }
}

impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Metric length of a cell edge. `gamma_bar` is a square root of a
/// difference and bottoms out near `sqrt(eps)` for very close points, so
/// off the sphere edges use the chart midpoint rule instead.
fn cell_edge(body: &ConvexBody, a: &BoundaryPoint, b: &BoundaryPoint) -> f64 {
    if body.sphere_radius().is_some() {
        return link(body, a, b);
    }
    chord_length(body, a, b).unwrap_or(f64::INFINITY)
}

fn make_cell(body: &ConvexBody, points: [BoundaryPoint; 3], values: [f64; 3], depth: u32, safety: f64) -> Cell {
    let mut edge = 0.0_f64;
    for i in 0..3 {
        edge = edge.max(cell_edge(body, &points[i], &points[(i + 1) % 3]));
    }
    let low = values.iter().copied().fold(f64::INFINITY, f64::min);
    Cell {
        points,
        values,
        upper: low + safety * edge,
        depth,
    }
}

fn check(points: &SampleSet, mesh: &MetricMesh) -> Result<()> {
    if points.n() == 0 {
        return Err(Error::EmptySample);
    }
    if !points.body().same_body(mesh.body()) {
        return Err(Error::BodyMismatch);
    }
    Ok(())
}

/// Geodesic covering radius `rho(P) = max_z min_x gamma(z, x)`.
///
/// In the plane the samples are placed by exact metric arclength and `rho`
/// is half the largest gap. In space the maximum of the distance field is
/// located by branch and bound over the mesh triangles: a triangle is
/// bounded above by its smallest vertex value plus its longest edge (times
/// 1.25 off the sphere, to absorb the error of `gamma_bar`), and cells that
/// may still beat the best vertex value are split at normal-space midpoints
/// until the bound is within `1e-7 rho`. Distances are exact on spheres and
/// `gamma_bar` otherwise, with graph distances for pairs beyond chart range.
pub fn covering_radius(points: &SampleSet, mesh: &MetricMesh) -> Result<Coverage> {
    check(points, mesh)?;
    let body = mesh.body();
    if let Some(arc) = mesh.arc() {
        let mut s: Vec<f64> = points.points().iter().map(|p| arc.position_of(p)).collect();
        s.sort_by(f64::total_cmp);
        let total = arc.total();
        let (mut gap, mut start) = (s[0] + total - s[s.len() - 1], s[s.len() - 1]);
        for w in s.windows(2) {
            if w[1] - w[0] > gap {
                gap = w[1] - w[0];
                start = w[0];
            }
        }
        return Ok(Coverage {
            radius: 0.5 * gap,
            witness: arc.point_at(start + 0.5 * gap),
            precision: 0.0,
        });
    }

    let field = Field::new(mesh, points.points());
    let safety = if body.sphere_radius().is_some() { 1.0 } else { 1.25 };
    let values: Vec<f64> = mesh.vertices().par_iter().map(|v| field.eval(v)).collect();
    let (mut best, mut witness) = (f64::NEG_INFINITY, mesh.vertices()[0]);
    for (v, &f) in mesh.vertices().iter().zip(&values) {
        if f > best {
            best = f;
            witness = *v;
        }
    }
    let mut heap: BinaryHeap<Cell> = mesh
        .triangles()
        .iter()
        .map(|t| {
            let idx = t.map(|i| i as usize);
            make_cell(
                body,
                idx.map(|i| mesh.vertices()[i]),
                idx.map(|i| values[i]),
                0,
                safety,
            )
        })
        .filter(|c| c.upper > best)
        .collect();
    let mut precision = 0.0_f64;
    while let Some(cell) = heap.pop() {
        if cell.upper <= best * (1.0 + RELATIVE_PRECISION) {
            precision = precision.max(cell.upper - best);
            break;
        }
        if cell.depth >= MAX_DEPTH {
            precision = precision.max(cell.upper - best);
            continue;
        }
        let mid = |a: usize, b: usize| {
            let u = (cell.points[a].normal + cell.points[b].normal).normalize();
            body.point_from_normal(&u)
        };
        let m = [mid(0, 1), mid(1, 2), mid(2, 0)];
        let fm = m.map(|p| field.eval(&p));
        for (p, &f) in m.iter().zip(&fm) {
            if f > best {
                best = f;
                witness = *p;
            }
        }
        let [a, b, c] = cell.points;
        let [fa, fb, fc] = cell.values;
        let children = [
            ([a, m[0], m[2]], [fa, fm[0], fm[2]]),
            ([m[0], b, m[1]], [fm[0], fb, fm[1]]),
            ([m[2], m[1], c], [fm[2], fm[1], fc]),
            ([m[0], m[1], m[2]], fm),
        ];
        for (pts, vals) in children {
            let child = make_cell(body, pts, vals, cell.depth + 1, safety);
            if child.upper > best * (1.0 + RELATIVE_PRECISION) {
                heap.push(child);
            }
        }
    }
    Ok(Coverage {
        radius: best,
        witness,
        precision,
    })
}

/// Maximal-spacing statistic `V = vol_gamma(B(w, rho)) / v_k` at the
/// covering witness `w`, returned with the covering data.
///
/// The empty ball of radius `rho` around the witness is the largest empty
/// ball up to the variation of ball volumes with the centre, which is of
/// relative order `rho`. Volumes are exact in the plane and on spheres, and
/// computed by [`geodesic_ball_volume`] otherwise.
pub fn max_spacing_statistic(points: &SampleSet, mesh: &MetricMesh, v_k: f64) -> Result<(f64, Coverage)> {
    if !(v_k > 0.0 && v_k.is_finite()) {
        return Err(Error::InvalidParameter(format!("v_k must be positive, got {v_k}")));
    }
    let cov = covering_radius(points, mesh)?;
    let body = mesh.body();
    let volume = if body.dim() == 2 {
        2.0 * cov.radius
    } else if let Some(r) = body.sphere_radius() {
        sphere_ball_volume(3, r, cov.radius)
    } else {
        geodesic_ball_volume(body, &cov.witness, cov.radius, Some(mesh))?
    };
    Ok((volume / v_k, cov))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::{make_ball, make_ellipsoid};
    use crate::metric::build_metric_mesh;
    use crate::sampling::sample_h_kappa;
    use std::f64::consts::PI;

    fn circle_points(angles: &[f64]) -> (ConvexBody, SampleSet) {
        let c = make_ball(2, 1.0).unwrap();
        let normals: Vec<Vec3> = angles.iter().map(|t| Vec3::new(t.cos(), t.sin(), 0.0)).collect();
        let s = SampleSet::from_normals(&c, &normals);
        (c, s)
    }

    #[test]
    fn circle_examples() {
        let (c, four) = circle_points(&[0.0, PI / 2.0, PI, 1.5 * PI]);
        let mesh = build_metric_mesh(&c, 0.1).unwrap();
        let cov = covering_radius(&four, &mesh).unwrap();
        assert!((cov.radius - PI / 4.0).abs() < 1e-10);
        let (v, _) = max_spacing_statistic(&four, &mesh, 2.0 * PI).unwrap();
        assert!((v - 0.25).abs() < 1e-10);
        let (_, one) = circle_points(&[0.4]);
        let cov = covering_radius(&one, &mesh).unwrap();
        assert!((cov.radius - PI).abs() < 1e-10);
        assert!((cov.witness.ambient + Vec3::new(0.4f64.cos(), 0.4f64.sin(), 0.0)).norm() < 1e-9);
        let (_, two) = circle_points(&[0.0, PI]);
        let (v, _) = max_spacing_statistic(&two, &mesh, 2.0 * PI).unwrap();
        assert!((v - 0.5).abs() < 1e-10);
    }

    #[test]
    fn octahedron_on_the_sphere() {
        let s = make_ball(3, 1.0).unwrap();
        let normals: Vec<Vec3> = [Vec3::x(), Vec3::y(), Vec3::z()]
            .iter()
            .flat_map(|e| [*e, -*e])
            .collect();
        let pts = SampleSet::from_normals(&s, &normals);
        let mesh = build_metric_mesh(&s, 0.2).unwrap();
        let cov = covering_radius(&pts, &mesh).unwrap();
        let rho = (1.0 / 3f64.sqrt()).acos();
        assert!((cov.radius - rho).abs() < 1e-6, "{}", cov.radius);
        let w = cov.witness.ambient;
        assert!((w.x.abs() - w.y.abs()).abs() < 1e-2 && (w.y.abs() - w.z.abs()).abs() < 1e-2);
        let (v, _) = max_spacing_statistic(&pts, &mesh, 4.0 * PI).unwrap();
        assert!((v - (1.0 - 1.0 / 3f64.sqrt()) / 2.0).abs() < 1e-6);
    }

    #[test]
    fn body_mismatch_and_empty() {
        let s = make_ball(3, 1.0).unwrap();
        let e = make_ellipsoid(&[2.0, 1.0, 1.0]).unwrap();
        let mesh = build_metric_mesh(&s, 0.3).unwrap();
        let pts = sample_h_kappa(&e, 10, 1).unwrap();
        assert!(matches!(covering_radius(&pts, &mesh), Err(Error::BodyMismatch)));
        let empty = SampleSet::from_points(&s, vec![], 0);
        assert!(matches!(covering_radius(&empty, &mesh), Err(Error::EmptySample)));
    }

    #[test]
    fn adding_points_never_increases_rho() {
        for body in [make_ball(3, 1.0).unwrap(), make_ellipsoid(&[2.0, 1.0, 1.0]).unwrap()] {
            let pts = sample_h_kappa(&body, 400, 9).unwrap();
            let mesh = build_metric_mesh(&body, 0.1).unwrap();
            let mut last = f64::INFINITY;
            for m in [100, 200, 400] {
                let rho = covering_radius(&pts.truncated(m), &mesh).unwrap().radius;
                assert!(rho <= last * (1.0 + 1e-6), "{rho} > {last}");
                last = rho;
            }
        }
    }

    #[test]
    fn witness_is_a_true_maximum_on_a_dense_probe() {
        let s = make_ball(3, 1.0).unwrap();
        let pts = sample_h_kappa(&s, 300, 5).unwrap();
        let mesh = build_metric_mesh(&s, 0.1).unwrap();
        let cov = covering_radius(&pts, &mesh).unwrap();
        let fine = build_metric_mesh(&s, 0.01).unwrap();
        let probe = fine
            .vertices()
            .iter()
            .map(|v| {
                pts.points()
                    .iter()
                    .map(|p| crate::metric::geodesic_distance_exact_sphere(v, p, 1.0))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max);
        assert!(probe <= cov.radius + 1e-9);
        assert!(cov.radius - probe < 0.01);
    }
}
