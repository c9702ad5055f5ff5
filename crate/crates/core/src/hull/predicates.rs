//! Orientation predicates: a floating-point determinant with a static error
//! filter, falling back to exact rational arithmetic inside the filter band.

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use std::cmp::Ordering;

use crate::geometry::Vec3;

/// Relative width of the uncertainty band, scaled by `scale^3` (or `^2`).
const FILTER: f64 = 1e-12;

fn exact(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite coordinate")
}

fn sign(x: &BigRational) -> Ordering {
    if x.is_zero() {
        Ordering::Equal
    } else if x.is_positive() {
        Ordering::Greater
    } else {
        Ordering::Less
    }
}

/// Sign of `det[b - a, c - a, d - a]`: `Greater` when `d` lies on the side
/// of the plane `abc` that `(b - a) x (c - a)` points to.
pub fn orient3d(a: &Vec3, b: &Vec3, c: &Vec3, d: &Vec3) -> Ordering {
    let (u, v, w) = (b - a, c - a, d - a);
    let det = u.cross(&v).dot(&w);
    let scale = u.amax().max(v.amax()).max(w.amax());
    if det.abs() > FILTER * scale * scale * scale {
        return det.partial_cmp(&0.0).unwrap_or(Ordering::Equal);
    }
    orient3d_exact(a, b, c, d)
}

pub fn orient3d_exact(a: &Vec3, b: &Vec3, c: &Vec3, d: &Vec3) -> Ordering {
    let q = |p: &Vec3| [exact(p.x), exact(p.y), exact(p.z)];
    let (a, b, c, d) = (q(a), q(b), q(c), q(d));
    let diff = |p: &[BigRational; 3]| {
        [&p[0] - &a[0], &p[1] - &a[1], &p[2] - &a[2]]
    };
    let (u, v, w) = (diff(&b), diff(&c), diff(&d));
    let det = &u[0] * (&v[1] * &w[2] - &v[2] * &w[1])
        - &u[1] * (&v[0] * &w[2] - &v[2] * &w[0])
        + &u[2] * (&v[0] * &w[1] - &v[1] * &w[0]);
    sign(&det)
}

/// Sign of `det[b - a, c - a]` in the plane (z ignored): `Greater` for a
/// counterclockwise turn.
pub fn orient2d(a: &Vec3, b: &Vec3, c: &Vec3) -> Ordering {
    let (ux, uy, vx, vy) = (b.x - a.x, b.y - a.y, c.x - a.x, c.y - a.y);
    let det = ux * vy - uy * vx;
    let scale = ux.abs().max(uy.abs()).max(vx.abs()).max(vy.abs());
    if det.abs() > FILTER * scale * scale {
        return det.partial_cmp(&0.0).unwrap_or(Ordering::Equal);
    }
    let (ax, ay) = (exact(a.x), exact(a.y));
    let det = (exact(b.x) - &ax) * (exact(c.y) - &ay) - (exact(b.y) - &ay) * (exact(c.x) - &ax);
    sign(&det)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orientation_of_the_unit_simplex() {
        let o = Vec3::zeros();
        let (x, y, z) = (Vec3::x(), Vec3::y(), Vec3::z());
        assert_eq!(orient3d(&o, &x, &y, &z), Ordering::Greater);
        assert_eq!(orient3d(&o, &y, &x, &z), Ordering::Less);
        assert_eq!(orient3d(&o, &x, &y, &(x + y)), Ordering::Equal);
        assert_eq!(orient2d(&o, &x, &y), Ordering::Greater);
        assert_eq!(orient2d(&o, &x, &(x * 2.0)), Ordering::Equal);
    }

    #[test]
    fn exact_fallback_resolves_near_coplanar_points() {
        // The fourth point sits one ulp above the plane z = 0.5.
        let h = 0.5;
        let a = Vec3::new(0.1, 0.2, h);
        let b = Vec3::new(0.7, 0.3, h);
        let c = Vec3::new(0.3, 0.9, h);
        let d = Vec3::new(0.4, 0.4, f64::from_bits(h.to_bits() + 1));
        assert_eq!(orient3d(&a, &b, &c, &d), Ordering::Greater);
        let e = Vec3::new(0.4, 0.4, f64::from_bits(h.to_bits() - 1));
        assert_eq!(orient3d(&a, &b, &c, &e), Ordering::Less);
        assert_eq!(orient3d(&a, &b, &c, &Vec3::new(0.4, 0.4, h)), Ordering::Equal);
    }

    #[test]
    fn filtered_and_exact_agree_on_random_input() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let mut p = || Vec3::new(rng.random(), rng.random(), rng.random());
        for _ in 0..500 {
            let (a, b, c, d) = (p(), p(), p(), p());
            assert_eq!(orient3d(&a, &b, &c, &d), orient3d_exact(&a, &b, &c, &d));
        }
    }
}
