use gumbel_hull::bodies::ConvexBody;
use gumbel_hull::geometry::Vec3;
use gumbel_hull::sampling::icosphere;

/// Dense boundary points and their largest Euclidean spacing.
pub fn dense_boundary(body: &ConvexBody) -> (Vec<Vec3>, f64) {
    let pts: Vec<Vec3> = if body.dim() == 2 {
        (0..20_000)
            .map(|i| {
                let t = std::f64::consts::TAU * i as f64 / 20_000.0;
                body.point_from_normal(&Vec3::new(t.cos(), t.sin(), 0.0)).ambient
            })
            .collect()
    } else {
        let (normals, _) = icosphere(6);
        normals.iter().map(|u| body.point_from_normal(u).ambient).collect()
    };
    let spacing = if body.dim() == 2 {
        pts.windows(2).map(|w| (w[1] - w[0]).norm()).fold(0.0, f64::max)
    } else {
        let (normals, tris) = icosphere(6);
        tris.iter()
            .flat_map(|t| {
                let p = t.map(|i| body.point_from_normal(&normals[i as usize]).ambient);
                [(p[0] - p[1]).norm(), (p[1] - p[2]).norm(), (p[2] - p[0]).norm()]
            })
            .fold(0.0, f64::max)
    };
    (pts, spacing)
}
