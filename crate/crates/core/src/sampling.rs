//! The total curvature measure `v_kappa` and reproducible boundary samplers.
//!
//! Both samplers propose a uniform direction `w` on the unit sphere and map it
//! to the boundary by the body's star parametrization. A first rejection step
//! with weight `J(w) / area_envelope` turns this into the area-uniform law; a
//! second step with weight `sqrt(kappa) / sqrt_kappa_envelope` gives density
//! `h_kappa`. A ratio above one at run time means the certified envelope was
//! too small and is reported as [`Error::EnvelopeViolated`].
//!
//! Generator: ChaCha8 seeded with `seed_from_u64(seed)`. Replication `r` of an
//! experiment uses `base_seed + r`.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::bodies::{BoundaryPoint, ConvexBody};
use crate::error::{Error, Result};
use crate::geometry::{direction_angles, triangle_area, CompensatedSum, Vec3};
use crate::quadrature::{full_range, integrate_directions};

/// Finest quadrature level tried before giving up.
const MAX_QUAD_LEVEL: u32 = 12;
const QUAD_REL_TOL: f64 = 1e-8;

/// Integral of `g(x) dH^{d-1}` over the boundary region whose directions lie
/// in `range`, refined by doubling from `quad_level` until stable.
pub fn boundary_integral(
    body: &ConvexBody,
    g: &(dyn Fn(&Vec3) -> f64 + Sync),
    range: [[f64; 2]; 2],
    quad_level: u32,
) -> Result<f64> {
    if quad_level < 1 {
        return Err(Error::InvalidParameter("quad_level must be >= 1".into()));
    }
    let model = body.model();
    let dim = body.dim();
    let integrand = |w: &Vec3| {
        let x = model.from_direction(w);
        g(&x) * model.direction_jacobian(w)
    };
    let mut level = quad_level;
    let mut prev = integrate_directions(dim, &integrand, range, 1 << level);
    let mut change = f64::INFINITY;
    while level < MAX_QUAD_LEVEL {
        level += 1;
        let next = integrate_directions(dim, &integrand, range, 1 << level);
        change = ((next - prev) / next).abs();
        prev = next;
        if change < QUAD_REL_TOL {
            return Ok(next);
        }
    }
    Err(Error::QuadratureNotConverged {
        level,
        achieved: change,
    })
}

/// `v_kappa(K) = integral of sqrt(kappa)` over the boundary.
pub fn v_kappa(body: &ConvexBody, quad_level: u32) -> Result<f64> {
    let model = body.model();
    boundary_integral(
        body,
        &|x: &Vec3| model.curvature(x).sqrt(),
        full_range(body.dim()),
        quad_level,
    )
}

/// Surface measure (perimeter or area) of the boundary.
pub fn surface_area(body: &ConvexBody) -> Result<f64> {
    boundary_integral(body, &|_: &Vec3| 1.0, full_range(body.dim()), 2)
}

/// Independent estimate of `v_kappa` for `d = 3` by summing flat triangle
/// areas times the mean `sqrt(kappa)` over a subdivided icosahedron in normal
/// space pushed to the boundary, with two Richardson steps over `levels`,
/// `levels + 1`, `levels + 2`.
pub fn v_kappa_mesh_sum(body: &ConvexBody, levels: u32) -> Result<f64> {
    if body.dim() != 3 {
        return Err(Error::UnsupportedDimension(body.dim()));
    }
    let model = body.model();
    let sums: Vec<f64> = (levels..levels + 3)
        .map(|l| {
            let (verts, tris) = icosphere(l);
            let pts: Vec<Vec3> = verts.iter().map(|u| model.inverse_normal(u)).collect();
            let sk: Vec<f64> = pts.iter().map(|x| model.curvature(x).sqrt()).collect();
            let mut s = CompensatedSum::default();
            for t in &tris {
                let [a, b, c] = t.map(|i| i as usize);
                s.add(triangle_area(&pts[a], &pts[b], &pts[c]) * (sk[a] + sk[b] + sk[c]) / 3.0);
            }
            s.value()
        })
        .collect();
    let r1 = (4.0 * sums[1] - sums[0]) / 3.0;
    let r2 = (4.0 * sums[2] - sums[1]) / 3.0;
    Ok((16.0 * r2 - r1) / 15.0)
}

/// Unit icosahedron subdivided `level` times, vertices projected to the
/// sphere. Returns vertices and counterclockwise (outward) triangles.
pub fn icosphere(level: u32) -> (Vec<Vec3>, Vec<[u32; 3]>) {
    let t = (1.0 + 5.0_f64.sqrt()) / 2.0;
    let mut verts: Vec<Vec3> = [
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ]
    .iter()
    .map(|v| Vec3::new(v[0], v[1], v[2]).normalize())
    .collect();
    let mut tris: Vec<[u32; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..level {
        let mut mid = std::collections::HashMap::new();
        let mut next = Vec::with_capacity(tris.len() * 4);
        let mut midpoint = |a: u32, b: u32, verts: &mut Vec<Vec3>| -> u32 {
            let key = (a.min(b), a.max(b));
            *mid.entry(key).or_insert_with(|| {
                verts.push(((verts[a as usize] + verts[b as usize]) * 0.5).normalize());
                (verts.len() - 1) as u32
            })
        };
        for &[a, b, c] in &tris {
            let ab = midpoint(a, b, &mut verts);
            let bc = midpoint(b, c, &mut verts);
            let ca = midpoint(c, a, &mut verts);
            next.extend_from_slice(&[[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        tris = next;
    }
    (verts, tris)
}

/// Independent boundary samples, all from one body.
#[derive(Clone, Debug)]
pub struct SampleSet {
    body: ConvexBody,
    points: Vec<BoundaryPoint>,
    seed: u64,
}

impl SampleSet {
    /// Wraps explicit boundary points (for deterministic configurations).
    pub fn from_points(body: &ConvexBody, points: Vec<BoundaryPoint>, seed: u64) -> Self {
        Self {
            body: body.clone(),
            points,
            seed,
        }
    }

    /// Boundary points with the given outward normals.
    pub fn from_normals(body: &ConvexBody, normals: &[Vec3]) -> Self {
        let points = normals
            .iter()
            .map(|u| body.point_from_normal(&u.normalize()))
            .collect();
        Self::from_points(body, points, 0)
    }

    pub fn body(&self) -> &ConvexBody {
        &self.body
    }

    pub fn points(&self) -> &[BoundaryPoint] {
        &self.points
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    /// First `m` points: a nested subsample.
    pub fn truncated(&self, m: usize) -> Self {
        Self::from_points(&self.body, self.points[..m.min(self.n())].to_vec(), self.seed)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Target {
    Area,
    HKappa,
}

fn uniform_direction(dim: usize, rng: &mut ChaCha8Rng) -> Vec3 {
    loop {
        let mut g = Vec3::zeros();
        for i in 0..dim {
            g[i] = rng.sample(StandardNormal);
        }
        let n = g.norm();
        if n > 1e-12 {
            return g / n;
        }
    }
}

fn accept(rng: &mut ChaCha8Rng, value: f64, bound: f64) -> Result<bool> {
    let ratio = value / bound;
    if !(ratio <= 1.0) {
        return Err(Error::EnvelopeViolated { ratio, bound: 1.0 });
    }
    Ok(rng.random::<f64>() < ratio)
}

fn draw(body: &ConvexBody, n: usize, seed: u64, target: Target) -> Result<SampleSet> {
    if n < 1 {
        return Err(Error::SampleSizeTooSmall { n, min: 1 });
    }
    let model = body.model();
    let dim = body.dim();
    let c = body.constants();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(n);
    while points.len() < n {
        let w = uniform_direction(dim, &mut rng);
        if !accept(&mut rng, model.direction_jacobian(&w), c.area_envelope)? {
            continue;
        }
        let x = model.from_direction(&w);
        if target == Target::HKappa
            && !accept(&mut rng, model.curvature(&x).sqrt(), c.sqrt_kappa_envelope)?
        {
            continue;
        }
        points.push(body.point_at(x, Some(w)));
    }
    Ok(SampleSet::from_points(body, points, seed))
}

/// `n` i.i.d. boundary points with density `h_kappa = sqrt(kappa) / v_kappa`.
pub fn sample_h_kappa(body: &ConvexBody, n: usize, seed: u64) -> Result<SampleSet> {
    draw(body, n, seed, Target::HKappa)
}

/// `n` i.i.d. boundary points from the normalized surface measure.
pub fn sample_uniform_area(body: &ConvexBody, n: usize, seed: u64) -> Result<SampleSet> {
    draw(body, n, seed, Target::Area)
}

/// Partition of the boundary into patches by direction: 32 equal arcs in the
/// plane, 4 equal-area polar bands times 8 azimuth sectors in space.
pub const PATCH_COUNT: usize = 32;

fn band_edges() -> [f64; 5] {
    [0.0, 0.5, 1.0, 1.5, 2.0_f64].map(|s| (1.0 - s).acos())
}

fn patch_range(dim: usize, k: usize) -> [[f64; 2]; 2] {
    if dim == 2 {
        let h = TAU / PATCH_COUNT as f64;
        // Angles from `direction_angles` lie in (-pi, pi].
        return [[-PI + h * k as f64, -PI + h * (k + 1) as f64], [0.0, 0.0]];
    }
    let edges = band_edges();
    let (band, sector) = (k / 8, k % 8);
    let h = TAU / 8.0;
    [
        [edges[band], edges[band + 1]],
        [-PI + h * sector as f64, -PI + h * (sector + 1) as f64],
    ]
}

/// Patch containing a boundary point.
pub fn patch_index(body: &ConvexBody, p: &BoundaryPoint) -> usize {
    let dim = body.dim();
    let w = body.model().to_direction(&p.ambient);
    let a = direction_angles(dim, &w);
    let bin = |x: f64, lo: f64, width: f64, count: usize| {
        (((x - lo) / width).floor().max(0.0) as usize).min(count - 1)
    };
    if dim == 2 {
        return bin(a[0], -PI, TAU / PATCH_COUNT as f64, PATCH_COUNT);
    }
    let edges = band_edges();
    let band = (1..4).filter(|&i| a[0] >= edges[i]).count();
    band * 8 + bin(a[1], -PI, TAU / 8.0, 8)
}

/// Probability of each patch under `h_kappa` (`curvature_weighted`) or the
/// normalized area measure.
pub fn patch_masses(body: &ConvexBody, curvature_weighted: bool) -> Result<Vec<f64>> {
    let model = body.model();
    let g = |x: &Vec3| {
        if curvature_weighted {
            model.curvature(x).sqrt()
        } else {
            1.0
        }
    };
    let masses = (0..PATCH_COUNT)
        .map(|k| boundary_integral(body, &g, patch_range(body.dim(), k), 2))
        .collect::<Result<Vec<_>>>()?;
    let total: f64 = masses.iter().sum();
    Ok(masses.into_iter().map(|m| m / total).collect())
}
