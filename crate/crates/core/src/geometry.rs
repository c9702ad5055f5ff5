//! Small vector helpers shared by the modules. Points of planar bodies are
//! stored as 3-vectors with a zero third coordinate.

use nalgebra::Vector3;

pub type Vec3 = Vector3<f64>;

/// Orthonormal basis of the tangent space orthogonal to the unit vector `u`.
///
/// In the plane only the first vector is meaningful. The 3D construction is
/// the branchless frame of Duff et al., continuous except across `u.z = 0`
/// sign changes.
pub fn tangent_basis(dim: usize, u: &Vec3) -> [Vec3; 2] {
    if dim == 2 {
        return [Vec3::new(-u.y, u.x, 0.0), Vec3::zeros()];
    }
    let sign = 1.0_f64.copysign(u.z);
    let a = -1.0 / (sign + u.z);
    let b = u.x * u.y * a;
    [
        Vec3::new(1.0 + sign * u.x * u.x * a, sign * b, -sign * u.x),
        Vec3::new(b, sign + u.y * u.y * a, -u.y),
    ]
}

/// Deterministic, roughly equidistributed unit vectors (Fibonacci lattice on
/// the sphere, equally spaced angles on the circle).
pub fn fibonacci_directions(dim: usize, count: usize) -> Vec<Vec3> {
    if dim == 2 {
        return (0..count)
            .map(|i| {
                let t = std::f64::consts::TAU * (i as f64 + 0.5) / count as f64;
                Vec3::new(t.cos(), t.sin(), 0.0)
            })
            .collect();
    }
    let golden = std::f64::consts::PI * (3.0 - 5.0_f64.sqrt());
    (0..count)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / count as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * i as f64;
            Vec3::new(r * phi.cos(), r * phi.sin(), z)
        })
        .collect()
}

/// The coordinate axes and their negatives in dimension `dim`.
pub fn axis_directions(dim: usize) -> Vec<Vec3> {
    let mut out = Vec::with_capacity(2 * dim);
    for i in 0..dim {
        let mut e = Vec3::zeros();
        e[i] = 1.0;
        out.push(e);
        out.push(-e);
    }
    out
}

/// Polar coordinates of a unit direction: `[t, 0]` on the circle and
/// `[theta, phi]` (polar angle from +z, azimuth) on the sphere.
pub fn direction_angles(dim: usize, w: &Vec3) -> [f64; 2] {
    if dim == 2 {
        [w.y.atan2(w.x), 0.0]
    } else {
        [w.z.clamp(-1.0, 1.0).acos(), w.y.atan2(w.x)]
    }
}

/// Inverse of [`direction_angles`].
pub fn direction_from_angles(dim: usize, angles: [f64; 2]) -> Vec3 {
    if dim == 2 {
        Vec3::new(angles[0].cos(), angles[0].sin(), 0.0)
    } else {
        let (st, ct) = angles[0].sin_cos();
        let (sp, cp) = angles[1].sin_cos();
        Vec3::new(st * cp, st * sp, ct)
    }
}

/// Area of the planar triangle spanned by three points.
pub fn triangle_area(a: &Vec3, b: &Vec3, c: &Vec3) -> f64 {
    0.5 * (b - a).cross(&(c - a)).norm()
}

/// Closest point of the triangle `abc` to `p` (Ericson's region test).
pub fn closest_point_on_triangle(p: &Vec3, a: &Vec3, b: &Vec3, c: &Vec3) -> Vec3 {
    let (ab, ac, ap) = (b - a, c - a, p - a);
    let (d1, d2) = (ab.dot(&ap), ac.dot(&ap));
    if d1 <= 0.0 && d2 <= 0.0 {
        return *a;
    }
    let bp = p - b;
    let (d3, d4) = (ab.dot(&bp), ac.dot(&bp));
    if d3 >= 0.0 && d4 <= d3 {
        return *b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        return a + ab * (d1 / (d1 - d3));
    }
    let cp = p - c;
    let (d5, d6) = (ab.dot(&cp), ac.dot(&cp));
    if d6 >= 0.0 && d5 <= d6 {
        return *c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        return a + ac * (d2 / (d2 - d6));
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
    }
    let denom = 1.0 / (va + vb + vc);
    a + ab * (vb * denom) + ac * (vc * denom)
}

/// Closest point of the segment `ab` to `p`.
pub fn closest_point_on_segment(p: &Vec3, a: &Vec3, b: &Vec3) -> Vec3 {
    let ab = b - a;
    let t = ((p - a).dot(&ab) / ab.norm_squared()).clamp(0.0, 1.0);
    a + ab * t
}

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}
