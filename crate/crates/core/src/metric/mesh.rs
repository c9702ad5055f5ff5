use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::f64::consts::PI;

use kiddo::{ImmutableKdTree, SquaredEuclidean};

use super::chord_length;
use crate::bodies::{BoundaryPoint, ConvexBody};
use crate::error::{Error, Result};
use crate::geometry::{direction_angles, direction_from_angles, triangle_area, Vec3};
use crate::quadrature::gauss_legendre;
use crate::sampling::icosphere;

/// Memory cap: the finest admissible triangulation (icosahedron subdivided
/// eight times has 1.3 million triangles).
pub const MAX_TRIANGLES: usize = 20 * 4usize.pow(8);
/// Cap on polygon vertices in the plane.
pub const MAX_POLYGON_VERTICES: usize = 10_000_000;

const ARC_PANELS: usize = 4096;

/// Cumulative metric arclength `s(t) = int sqrt(kappa) ds` of a planar body
/// as a function of the direction angle `t in [-pi, pi)`.
#[derive(Debug)]
pub(crate) struct ArcTable {
    body: ConvexBody,
    cumulative: Vec<f64>,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl ArcTable {
    fn new(body: &ConvexBody) -> Self {
        let (nodes, weights) = gauss_legendre(8);
        let mut table = Self {
            body: body.clone(),
            cumulative: Vec::with_capacity(ARC_PANELS + 1),
            nodes,
            weights,
        };
        let h = 2.0 * PI / ARC_PANELS as f64;
        let mut acc = 0.0;
        table.cumulative.push(0.0);
        for j in 0..ARC_PANELS {
            let a = -PI + h * j as f64;
            acc += table.segment(a, a + h);
            table.cumulative.push(acc);
        }
        table
    }

    fn density(&self, t: f64) -> f64 {
        let model = self.body.model();
        let w = direction_from_angles(2, [t, 0.0]);
        model.curvature(&model.from_direction(&w)).sqrt() * model.direction_jacobian(&w)
    }

    fn segment(&self, a: f64, b: f64) -> f64 {
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * self.density(mid + half * x))
            .sum::<f64>()
            * half
    }

    pub(crate) fn total(&self) -> f64 {
        self.cumulative[ARC_PANELS]
    }

    /// Metric arclength from angle `-pi` to angle `t`.
    pub(crate) fn position(&self, t: f64) -> f64 {
        let h = 2.0 * PI / ARC_PANELS as f64;
        let j = (((t + PI) / h).floor().max(0.0) as usize).min(ARC_PANELS - 1);
        let a = -PI + h * j as f64;
        self.cumulative[j] + self.segment(a, t)
    }

    /// Direction angle at metric arclength `s` (taken modulo the total).
    pub(crate) fn angle_at(&self, s: f64) -> f64 {
        let total = self.total();
        let s = s.rem_euclid(total);
        let j = match self.cumulative.binary_search_by(|c| c.total_cmp(&s)) {
            Ok(i) => return -PI + 2.0 * PI * i as f64 / ARC_PANELS as f64,
            Err(i) => i.saturating_sub(1).min(ARC_PANELS - 1),
        };
        let h = 2.0 * PI / ARC_PANELS as f64;
        let (lo, hi) = (-PI + h * j as f64, -PI + h * (j + 1) as f64);
        let mut t = lo + h * (s - self.cumulative[j]) / (self.cumulative[j + 1] - self.cumulative[j]);
        for _ in 0..20 {
            let step = (self.position(t) - s) / self.density(t);
            t = (t - step).clamp(lo, hi);
            if step.abs() < 1e-15 {
                break;
            }
        }
        t
    }

    pub(crate) fn point_at(&self, s: f64) -> BoundaryPoint {
        let w = direction_from_angles(2, [self.angle_at(s), 0.0]);
        self.body.point_from_direction(&w)
    }

    pub(crate) fn position_of(&self, p: &BoundaryPoint) -> f64 {
        let w = self.body.model().to_direction(&p.ambient);
        self.position(direction_angles(2, &w)[0])
    }
}

/// Discretization of the boundary with edge lengths in the metric.
///
/// In the plane the vertices are equally spaced in metric arclength, which
/// is integrated exactly by quadrature. In space the mesh is an icosahedron
/// subdivided in normal space and pushed to the boundary by the inverse
/// Gauss map, refined uniformly until every triangle edge is at most
/// `resolution` long. Edge lengths use the chart midpoint rule. The
/// shortest-path graph also links the two apexes across every edge, which
/// cuts the direction bias of graph distances on triangular lattices from
/// about 15% to about 4%.
pub struct MetricMesh {
    body: ConvexBody,
    resolution: f64,
    vertices: Vec<BoundaryPoint>,
    triangles: Vec<[u32; 3]>,
    edges: Vec<(u32, u32, f64)>,
    offsets: Vec<usize>,
    links: Vec<(u32, f64)>,
    tree: ImmutableKdTree<f64, 3>,
    arc: Option<ArcTable>,
}

impl std::fmt::Debug for MetricMesh {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MetricMesh")
            .field("body", &self.body.describe())
            .field("resolution", &self.resolution)
            .field("vertices", &self.vertices.len())
            .field("triangles", &self.triangles.len())
            .finish()
    }
}

#[derive(PartialEq)]
struct Entry(f64, u32);

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub fn build_metric_mesh(body: &ConvexBody, resolution: f64) -> Result<MetricMesh> {
    if !(resolution > 0.0 && resolution.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "resolution must be positive, got {resolution}"
        )));
    }
    if body.dim() == 2 {
        build_polygon(body, resolution)
    } else {
        build_triangulation(body, resolution)
    }
}

fn build_polygon(body: &ConvexBody, resolution: f64) -> Result<MetricMesh> {
    let arc = ArcTable::new(body);
    let total = arc.total();
    let count = (total / resolution).ceil().max(3.0);
    if count > MAX_POLYGON_VERTICES as f64 {
        return Err(Error::ResolutionTooSmall {
            resolution,
            triangles: count as usize,
            cap: MAX_POLYGON_VERTICES,
        });
    }
    let m = count as usize;
    let step = total / m as f64;
    let vertices: Vec<BoundaryPoint> = (0..m).map(|i| arc.point_at(step * i as f64)).collect();
    let edges: Vec<(u32, u32, f64)> = (0..m)
        .map(|i| (i as u32, ((i + 1) % m) as u32, step))
        .collect();
    Ok(assemble(body, resolution, vertices, Vec::new(), edges, Vec::new(), Some(arc)))
}

fn unique_edges(tris: &[[u32; 3]]) -> HashMap<(u32, u32), Vec<u32>> {
    let mut map: HashMap<(u32, u32), Vec<u32>> = HashMap::with_capacity(tris.len() * 3 / 2);
    for t in tris {
        for i in 0..3 {
            let (a, b, c) = (t[i], t[(i + 1) % 3], t[(i + 2) % 3]);
            map.entry((a.min(b), a.max(b))).or_default().push(c);
        }
    }
    map
}

fn build_triangulation(body: &ConvexBody, resolution: f64) -> Result<MetricMesh> {
    let mut level = 0u32;
    loop {
        let triangles_at = |l: u32| 20usize.saturating_mul(4usize.saturating_pow(l));
        if triangles_at(level) > MAX_TRIANGLES {
            return Err(Error::ResolutionTooSmall {
                resolution,
                triangles: triangles_at(level),
                cap: MAX_TRIANGLES,
            });
        }
        let (normals, tris) = icosphere(level);
        let vertices: Vec<BoundaryPoint> = normals.iter().map(|u| body.point_from_normal(u)).collect();
        let edge_map = unique_edges(&tris);
        let mut edges: Vec<(u32, u32, f64)> = Vec::with_capacity(edge_map.len());
        let mut longest = 0.0_f64;
        let mut sorted: Vec<_> = edge_map.iter().collect();
        sorted.sort_unstable_by_key(|(k, _)| **k);
        for (&(a, b), _) in &sorted {
            let len = chord_length(body, &vertices[a as usize], &vertices[b as usize])
                .ok_or_else(|| Error::MeshTooCoarse(format!("edge {a}-{b} leaves the chart")))?;
            longest = longest.max(len);
            edges.push((a, b, len));
        }
        if longest > resolution {
            // Edges roughly halve per subdivision: jump ahead.
            let jump = (longest / resolution).log2().ceil().max(1.0) as u32;
            let next = level + if level == 0 { 1 } else { jump };
            if triangles_at(next) > MAX_TRIANGLES {
                return Err(Error::ResolutionTooSmall {
                    resolution,
                    triangles: triangles_at(next),
                    cap: MAX_TRIANGLES,
                });
            }
            level = next;
            continue;
        }
        let mut shortcuts = Vec::with_capacity(edges.len());
        for (_, apexes) in sorted {
            if let [c, d] = apexes[..] {
                let len = chord_length(body, &vertices[c as usize], &vertices[d as usize])
                    .ok_or_else(|| Error::MeshTooCoarse("shortcut leaves the chart".into()))?;
                shortcuts.push((c.min(d), c.max(d), len));
            }
        }
        return Ok(assemble(body, resolution, vertices, tris, edges, shortcuts, None));
    }
}

fn assemble(
    body: &ConvexBody,
    resolution: f64,
    vertices: Vec<BoundaryPoint>,
    triangles: Vec<[u32; 3]>,
    edges: Vec<(u32, u32, f64)>,
    shortcuts: Vec<(u32, u32, f64)>,
    arc: Option<ArcTable>,
) -> MetricMesh {
    let n = vertices.len();
    let mut degree = vec![0usize; n + 1];
    for &(a, b, _) in edges.iter().chain(&shortcuts) {
        degree[a as usize + 1] += 1;
        degree[b as usize + 1] += 1;
    }
    for i in 0..n {
        degree[i + 1] += degree[i];
    }
    let offsets = degree;
    let mut fill = offsets.clone();
    let mut links = vec![(0u32, 0.0); offsets[n]];
    for &(a, b, w) in edges.iter().chain(&shortcuts) {
        links[fill[a as usize]] = (b, w);
        fill[a as usize] += 1;
        links[fill[b as usize]] = (a, w);
        fill[b as usize] += 1;
    }
    let coords: Vec<[f64; 3]> = vertices.iter().map(|p| [p.ambient.x, p.ambient.y, p.ambient.z]).collect();
    MetricMesh {
        body: body.clone(),
        resolution,
        tree: ImmutableKdTree::new_from_slice(&coords),
        vertices,
        triangles,
        edges,
        offsets,
        links,
        arc,
    }
}

impl MetricMesh {
    pub fn body(&self) -> &ConvexBody {
        &self.body
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn vertices(&self) -> &[BoundaryPoint] {
        &self.vertices
    }

    /// Triangles (empty in the plane).
    pub fn triangles(&self) -> &[[u32; 3]] {
        &self.triangles
    }

    /// Mesh edges `(a, b, metric length)`: polygon sides or triangle edges.
    pub fn edges(&self) -> &[(u32, u32, f64)] {
        &self.edges
    }

    pub fn max_edge_length(&self) -> f64 {
        self.edges.iter().map(|e| e.2).fold(0.0, f64::max)
    }

    /// Total metric volume: perimeter in the plane, sum of flat triangle
    /// areas times mean `sqrt(kappa)` in space.
    pub fn total_metric_volume(&self) -> f64 {
        if self.triangles.is_empty() {
            return self.edges.iter().map(|e| e.2).sum();
        }
        self.triangles
            .iter()
            .map(|t| {
                let [a, b, c] = t.map(|i| &self.vertices[i as usize]);
                triangle_area(&a.ambient, &b.ambient, &c.ambient)
                    * (a.curvature.sqrt() + b.curvature.sqrt() + c.curvature.sqrt())
                    / 3.0
            })
            .sum()
    }

    /// Neighbours of vertex `i` in the shortest-path graph.
    pub fn neighbours(&self, i: usize) -> &[(u32, f64)] {
        &self.links[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn nearest_vertex(&self, x: &Vec3) -> usize {
        self.tree.nearest_one::<SquaredEuclidean>(&[x.x, x.y, x.z]).item as usize
    }

    /// The `k` vertices nearest to `x` in the ambient norm.
    pub fn nearest_vertices(&self, x: &Vec3, k: usize) -> Vec<usize> {
        self.tree
            .nearest_n::<SquaredEuclidean>(&[x.x, x.y, x.z], std::num::NonZero::new(k.max(1)).unwrap())
            .into_iter()
            .map(|nn| nn.item as usize)
            .collect()
    }

    /// Multi-source shortest-path distances; `sources` are `(vertex, initial
    /// distance)` pairs.
    pub fn dijkstra(&self, sources: &[(usize, f64)]) -> Vec<f64> {
        let mut dist = vec![f64::INFINITY; self.vertices.len()];
        let mut heap = BinaryHeap::new();
        for &(v, d0) in sources {
            if d0 < dist[v] {
                dist[v] = d0;
                heap.push(Entry(d0, v as u32));
            }
        }
        while let Some(Entry(d, v)) = heap.pop() {
            if d > dist[v as usize] {
                continue;
            }
            for &(w, len) in self.neighbours(v as usize) {
                let nd = d + len;
                if nd < dist[w as usize] {
                    dist[w as usize] = nd;
                    heap.push(Entry(nd, w));
                }
            }
        }
        dist
    }

    pub fn graph_distance(&self, a: usize, b: usize) -> f64 {
        self.dijkstra(&[(a, 0.0)])[b]
    }

    pub fn is_connected(&self) -> bool {
        self.vertices.is_empty() || self.dijkstra(&[(0, 0.0)]).iter().all(|d| d.is_finite())
    }

    pub(crate) fn arc(&self) -> Option<&ArcTable> {
        self.arc.as_ref()
    }
}
