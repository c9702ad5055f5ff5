//! Smooth convex bodies with positive Gaussian curvature.
//!
//! A body is described by a [`BoundaryModel`]: an implicit level-set function
//! with closed-form first and second derivatives, the support function, the
//! inverse of the Gauss map, and a star-shaped parametrization of the boundary
//! over the unit sphere of directions. Everything downstream (local graph
//! charts, curvature, sampling proposals, meshes) is derived from these
//! evaluators, so a user-supplied model gets the full machinery.
//!
//! [`ConvexBody`] wraps a model together with constants certified numerically
//! at construction time: the chart radius `lambda` on which the osculating
//! paraboloid sandwich `b0/2 <= f <= 2 b0` holds, the quadratic-form bounds
//! `c_K`, `C_K`, and the rejection-sampling envelopes.

mod quadric;
mod spec;

use std::fmt;
use std::sync::{Arc, OnceLock};

use nalgebra::{DMatrix, DVector, Matrix3};

use crate::error::{Error, Result};
use crate::geometry::{
    axis_directions, direction_angles, fibonacci_directions, tangent_basis, Vec3,
};

pub use quadric::{Ball, Ellipsoid};
pub use spec::BodySpec;

/// Closed-form description of the boundary of a convex body in `R^2` or `R^3`.
///
/// Planar bodies use 3-vectors with zero third coordinate throughout.
pub trait BoundaryModel: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;

    /// Level-set function: negative inside, zero on the boundary, convex.
    fn level(&self, x: &Vec3) -> f64;
    fn level_gradient(&self, x: &Vec3) -> Vec3;
    fn level_hessian(&self, x: &Vec3) -> Matrix3<f64>;

    /// `h_K(u) = max_{y in K} <u, y>` for a unit vector `u`.
    fn support(&self, u: &Vec3) -> f64;

    /// The boundary point with outward unit normal `u`.
    fn inverse_normal(&self, u: &Vec3) -> Vec3;

    /// Star-shaped parametrization of the boundary by unit directions.
    fn from_direction(&self, w: &Vec3) -> Vec3;

    /// Inverse of [`BoundaryModel::from_direction`].
    fn to_direction(&self, x: &Vec3) -> Vec3;

    /// Surface-measure density of the parametrization with respect to the
    /// uniform measure on the sphere (circle) of directions.
    fn direction_jacobian(&self, w: &Vec3) -> f64;

    fn diameter(&self) -> f64;

    /// Gaussian curvature at a boundary point. The default uses the implicit
    /// formula `grad^T adj(H) grad / |grad|^(d+1)`.
    fn curvature(&self, x: &Vec3) -> f64 {
        implicit_curvature(self.dim(), &self.level_gradient(x), &self.level_hessian(x))
    }

    /// `Some(r)` when the body is a Euclidean ball of radius `r` (enables
    /// closed-form geodesics).
    fn sphere_radius(&self) -> Option<f64> {
        None
    }

    fn describe(&self) -> String;
}

/// Gaussian curvature of the level set `{F = 0}` from the gradient and Hessian
/// of `F`.
pub fn implicit_curvature(dim: usize, g: &Vec3, h: &Matrix3<f64>) -> f64 {
    let norm = g.norm();
    if dim == 2 {
        let num = g.y * g.y * h[(0, 0)] - 2.0 * g.x * g.y * h[(0, 1)] + g.x * g.x * h[(1, 1)];
        return num / norm.powi(3);
    }
    let cof = |r0: usize, r1: usize, c0: usize, c1: usize| {
        h[(r0, c0)] * h[(r1, c1)] - h[(r0, c1)] * h[(r1, c0)]
    };
    let adj = Matrix3::new(
        cof(1, 2, 1, 2),
        -cof(0, 2, 1, 2),
        cof(0, 1, 1, 2),
        -cof(1, 2, 0, 2),
        cof(0, 2, 0, 2),
        -cof(0, 1, 0, 2),
        cof(1, 2, 0, 1),
        -cof(0, 2, 0, 1),
        cof(0, 1, 0, 1),
    );
    g.dot(&(adj * g)) / norm.powi(4)
}

/// A point on the boundary together with its local differential data.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryPoint {
    pub ambient: Vec3,
    /// Index of the parametrization chart; the direction chart is the only one.
    pub chart_id: u32,
    /// Polar angles of the parametrizing direction (`[t, 0]` in the plane).
    pub chart_coords: [f64; 2],
    pub normal: Vec3,
    pub curvature: f64,
}

impl BoundaryPoint {
    /// Ambient coordinates truncated to the body dimension.
    pub fn coords(&self, dim: usize) -> Vec<f64> {
        self.ambient.as_slice()[..dim].to_vec()
    }
}

/// Value, gradient and Hessian of the local graph function `f^(p)` at a chart
/// point.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphJet {
    pub value: f64,
    pub gradient: DVector<f64>,
    pub hessian: DMatrix<f64>,
}

/// Fixed-size variant of [`GraphJet`] used on hot paths; entries beyond the
/// chart dimension are zero.
#[derive(Clone, Copy, Debug)]
pub struct LocalJet {
    pub value: f64,
    pub gradient: [f64; 2],
    pub hessian: [[f64; 2]; 2],
}

/// Constants certified for a body by scanning its boundary.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BodyConstants {
    /// Chart radius: the sandwich `b0/2 <= f <= 2 b0` holds for `|y| <= 4 lambda`.
    pub lambda: f64,
    /// `c_K`: lower bound for `b0(y) / |y|^2` (half the least principal curvature).
    pub form_lower: f64,
    /// `C_K`: upper bound for `b0(y) / |y|^2`.
    pub form_upper: f64,
    pub min_principal_curvature: f64,
    pub max_principal_curvature: f64,
    pub kappa_min: f64,
    pub kappa_max: f64,
    /// Envelope for the area-uniform acceptance step.
    pub area_envelope: f64,
    /// Envelope for the `sqrt(kappa)` acceptance step.
    pub sqrt_kappa_envelope: f64,
}

struct BodyInner {
    model: Box<dyn BoundaryModel>,
    constants: BodyConstants,
    v_kappa: OnceLock<f64>,
}

/// A certified convex body; cheap to clone and safe to share across threads.
#[derive(Clone)]
pub struct ConvexBody {
    inner: Arc<BodyInner>,
}

impl fmt::Debug for ConvexBody {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConvexBody")
            .field("model", &self.inner.model)
            .field("constants", &self.inner.constants)
            .finish()
    }
}

/// A local graph chart over the supporting hyperplane at a boundary point.
#[derive(Clone, Copy, Debug)]
pub struct Chart {
    pub origin: Vec3,
    pub normal: Vec3,
    pub basis: [Vec3; 2],
    pub dim: usize,
}

impl Chart {
    /// Chart coordinates of the orthogonal projection of `x` onto the
    /// supporting hyperplane.
    pub fn project(&self, x: &Vec3) -> [f64; 2] {
        let v = x - self.origin;
        if self.dim == 2 {
            [v.dot(&self.basis[0]), 0.0]
        } else {
            [v.dot(&self.basis[0]), v.dot(&self.basis[1])]
        }
    }

    fn planar(&self, y: [f64; 2]) -> Vec3 {
        self.origin + self.basis[0] * y[0] + self.basis[1] * y[1]
    }
}

const ON_BOUNDARY_REL_TOL: f64 = 1e-9;

impl ConvexBody {
    /// Wraps a model and certifies its constants.
    pub fn new(model: impl BoundaryModel + 'static) -> Result<Self> {
        Self::from_boxed(Box::new(model))
    }

    pub fn from_boxed(model: Box<dyn BoundaryModel>) -> Result<Self> {
        let dim = model.dim();
        if dim != 2 && dim != 3 {
            return Err(Error::UnsupportedDimension(dim));
        }
        let constants = certify(model.as_ref())?;
        Ok(Self {
            inner: Arc::new(BodyInner {
                model,
                constants,
                v_kappa: OnceLock::new(),
            }),
        })
    }

    pub fn dim(&self) -> usize {
        self.inner.model.dim()
    }

    pub fn model(&self) -> &dyn BoundaryModel {
        self.inner.model.as_ref()
    }

    pub fn constants(&self) -> &BodyConstants {
        &self.inner.constants
    }

    pub fn diameter(&self) -> f64 {
        self.inner.model.diameter()
    }

    pub fn sphere_radius(&self) -> Option<f64> {
        self.inner.model.sphere_radius()
    }

    pub fn describe(&self) -> String {
        self.inner.model.describe()
    }

    /// True when both handles describe the same body.
    pub fn same_body(&self, other: &ConvexBody) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.describe() == other.describe()
    }

    /// Tolerance for "lies on the boundary".
    pub fn boundary_tolerance(&self) -> f64 {
        ON_BOUNDARY_REL_TOL * self.diameter()
    }

    pub fn support(&self, u: &Vec3) -> f64 {
        self.inner.model.support(u)
    }

    /// Radius of the certified graph domain, `4 lambda`.
    pub fn graph_domain_radius(&self) -> f64 {
        4.0 * self.inner.constants.lambda
    }

    /// `v_kappa(K)`, computed once with the default quadrature level.
    pub fn v_kappa(&self) -> Result<f64> {
        if let Some(v) = self.inner.v_kappa.get() {
            return Ok(*v);
        }
        let v = crate::sampling::v_kappa(self, 2)?;
        Ok(*self.inner.v_kappa.get_or_init(|| v))
    }

    pub(crate) fn point_at(&self, x: Vec3, w: Option<Vec3>) -> BoundaryPoint {
        let model = self.model();
        let dim = model.dim();
        let g = model.level_gradient(&x);
        let w = w.unwrap_or_else(|| model.to_direction(&x));
        BoundaryPoint {
            ambient: x,
            chart_id: 0,
            chart_coords: direction_angles(dim, &w),
            normal: g.normalize(),
            curvature: model.curvature(&x),
        }
    }

    /// Boundary point parametrized by the unit direction `w`.
    pub fn point_from_direction(&self, w: &Vec3) -> BoundaryPoint {
        let x = self.model().from_direction(w);
        self.point_at(x, Some(*w))
    }

    /// Boundary point with outward unit normal `u` (`nu^{-1}(u)`).
    pub fn point_from_normal(&self, u: &Vec3) -> BoundaryPoint {
        let x = self.model().inverse_normal(u);
        let mut p = self.point_at(x, None);
        p.normal = *u;
        p
    }

    /// Builds a boundary point from ambient coordinates, rejecting points off
    /// the boundary.
    pub fn boundary_point(&self, x: &[f64]) -> Result<BoundaryPoint> {
        let dim = self.dim();
        if x.len() != dim {
            return Err(Error::InvalidParameter(format!(
                "expected {dim} coordinates, got {}",
                x.len()
            )));
        }
        let mut v = Vec3::zeros();
        v.as_mut_slice()[..dim].copy_from_slice(x);
        let p = self.point_at(v, None);
        self.check_on_boundary(&p)?;
        Ok(p)
    }

    fn check_on_boundary(&self, p: &BoundaryPoint) -> Result<()> {
        let offset = (self.support(&p.normal) - p.normal.dot(&p.ambient)).abs();
        let tolerance = self.boundary_tolerance();
        let g = self.model().level_gradient(&p.ambient).normalize();
        let normal_gap = (g - p.normal).norm();
        if offset > tolerance || normal_gap > 1e-6 || !offset.is_finite() {
            return Err(Error::OffBoundary {
                offset: offset.max(normal_gap),
                tolerance,
            });
        }
        Ok(())
    }

    /// `kappa_K(x)`, closed form for the built-in bodies.
    pub fn gaussian_curvature(&self, x: &BoundaryPoint) -> Result<f64> {
        self.check_on_boundary(x)?;
        Ok(self.model().curvature(&x.ambient))
    }

    /// The graph chart over the supporting hyperplane `H_K(p)`.
    pub fn chart_at(&self, p: &BoundaryPoint) -> Chart {
        let dim = self.dim();
        Chart {
            origin: p.ambient,
            normal: p.normal,
            basis: tangent_basis(dim, &p.normal),
            dim,
        }
    }

    /// Lifts a chart point to the boundary: returns the boundary point above
    /// `y` and the jet of the graph function there. `None` when the normal
    /// line through `y` misses the body.
    pub fn lift(&self, chart: &Chart, y: [f64; 2]) -> Option<(Vec3, LocalJet)> {
        lift_on(self.model(), chart, y)
    }

    /// `f^(p)(y)` with its gradient and Hessian, for `|y|` within the
    /// certified graph domain.
    pub fn graph_function_derivatives(&self, p: &BoundaryPoint, y: &[f64]) -> Result<GraphJet> {
        let k = self.dim() - 1;
        if y.len() != k {
            return Err(Error::InvalidParameter(format!(
                "chart vector must have {k} entries"
            )));
        }
        let mut yy = [0.0; 2];
        yy[..k].copy_from_slice(y);
        let norm = (yy[0] * yy[0] + yy[1] * yy[1]).sqrt();
        let limit = self.graph_domain_radius();
        if norm > limit {
            return Err(Error::ChartRadiusExceeded { norm, limit });
        }
        let chart = self.chart_at(p);
        let (_, jet) = self
            .lift(&chart, yy)
            .ok_or(Error::ChartRadiusExceeded { norm, limit })?;
        Ok(GraphJet {
            value: jet.value,
            gradient: DVector::from_fn(k, |i, _| jet.gradient[i]),
            hessian: DMatrix::from_fn(k, k, |i, j| jet.hessian[i][j]),
        })
    }

    /// The osculating quadratic form `b0^(p)(y) = (1/2) y^T f''(0) y`.
    pub fn osculating_form(&self, p: &BoundaryPoint, y: &[f64]) -> Result<f64> {
        let k = self.dim() - 1;
        let zero = vec![0.0; k];
        let jet = self.graph_function_derivatives(p, &zero)?;
        let v = DVector::from_column_slice(y);
        Ok(0.5 * v.dot(&(&jet.hessian * &v)))
    }
}

/// Eigenvalues of the symmetric `k x k` (k = 1, 2) matrix stored in a jet.
pub(crate) fn sym_eigenvalues(k: usize, m: &[[f64; 2]; 2]) -> (f64, f64) {
    if k == 1 {
        return (m[0][0], m[0][0]);
    }
    let mean = 0.5 * (m[0][0] + m[1][1]);
    let off = 0.5 * (m[0][1] + m[1][0]);
    let rad = (0.25 * (m[0][0] - m[1][1]).powi(2) + off * off).sqrt();
    (mean - rad, mean + rad)
}

fn certify(model: &dyn BoundaryModel) -> Result<BodyConstants> {
    let dim = model.dim();
    let diam = model.diameter();
    if !(diam > 0.0 && diam.is_finite()) {
        return Err(Error::InvalidParameter("diameter must be positive".into()));
    }

    let mut dirs = fibonacci_directions(dim, if dim == 2 { 2048 } else { 4096 });
    dirs.extend(axis_directions(dim));
    let (mut jac_max, mut sk_max) = (0.0_f64, 0.0_f64);
    let (mut kappa_min, mut kappa_max) = (f64::INFINITY, 0.0_f64);
    for w in &dirs {
        let x = model.from_direction(w);
        let kappa = model.curvature(&x);
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "Gaussian curvature {kappa} at {x:?} is not positive"
            )));
        }
        kappa_min = kappa_min.min(kappa);
        kappa_max = kappa_max.max(kappa);
        jac_max = jac_max.max(model.direction_jacobian(w));
        sk_max = sk_max.max(kappa.sqrt());
    }

    // Osculating-paraboloid sandwich scan over base points and tangent rays.
    let probe = ConvexBodyProbe { model, dim };
    let mut bases = fibonacci_directions(dim, if dim == 2 { 96 } else { 64 });
    bases.extend(axis_directions(dim));
    let rays: Vec<[f64; 2]> = if dim == 2 {
        vec![[1.0, 0.0], [-1.0, 0.0]]
    } else {
        (0..8)
            .map(|i| {
                let a = std::f64::consts::TAU * i as f64 / 8.0;
                [a.cos(), a.sin()]
            })
            .collect()
    };
    let step = diam / 256.0;
    let mut reach = f64::INFINITY;
    let (mut pmin, mut pmax) = (f64::INFINITY, 0.0_f64);
    for u in &bases {
        let chart = probe.chart(u);
        let Some((_, jet0)) = probe.lift(&chart, [0.0, 0.0]) else {
            return Err(Error::InvalidParameter("graph chart failed at y = 0".into()));
        };
        let (lo, hi) = sym_eigenvalues(dim - 1, &jet0.hessian);
        pmin = pmin.min(lo);
        pmax = pmax.max(hi);
        for ray in &rays {
            let mut last = 0.0;
            let mut s = step;
            while s <= diam {
                let y = [s * ray[0], s * ray[1]];
                let Some((_, jet)) = probe.lift(&chart, y) else { break };
                let h = &jet0.hessian;
                let b0 = 0.5
                    * (h[0][0] * y[0] * y[0]
                        + (h[0][1] + h[1][0]) * y[0] * y[1]
                        + h[1][1] * y[1] * y[1]);
                if jet.value > 2.0 * b0 || jet.value < 0.5 * b0 {
                    break;
                }
                last = s;
                s += step;
            }
            reach = reach.min(last);
        }
    }
    if !(reach > 0.0) || !(pmin > 0.0) {
        return Err(Error::InvalidParameter(
            "could not certify a positive chart radius".into(),
        ));
    }

    Ok(BodyConstants {
        lambda: 0.9 * reach / 4.0,
        form_lower: 0.95 * pmin / 2.0,
        form_upper: 1.05 * pmax / 2.0,
        min_principal_curvature: pmin,
        max_principal_curvature: pmax,
        kappa_min,
        kappa_max,
        area_envelope: 1.05 * jac_max,
        sqrt_kappa_envelope: 1.05 * sk_max,
    })
}

/// Borrowed view used during certification, before the body exists.
struct ConvexBodyProbe<'a> {
    model: &'a dyn BoundaryModel,
    dim: usize,
}

impl ConvexBodyProbe<'_> {
    fn chart(&self, u: &Vec3) -> Chart {
        Chart {
            origin: self.model.inverse_normal(u),
            normal: *u,
            basis: tangent_basis(self.dim, u),
            dim: self.dim,
        }
    }

    fn lift(&self, chart: &Chart, y: [f64; 2]) -> Option<(Vec3, LocalJet)> {
        lift_on(self.model, chart, y)
    }
}

/// Newton solve for the height of the boundary above the chart point `y`,
/// followed by implicit differentiation of the level set.
fn lift_on(model: &dyn BoundaryModel, chart: &Chart, y: [f64; 2]) -> Option<(Vec3, LocalJet)> {
    let base = chart.planar(y);
    let n = chart.normal;
    let mut t = 0.0_f64;
    let mut converged = false;
    for _ in 0..80 {
        let q = base - n * t;
        let g = model.level(&q);
        let slope = model.level_gradient(&q).dot(&n);
        if !(slope > 0.0) || !g.is_finite() {
            return None;
        }
        let step = g / slope;
        t += step;
        if step.abs() <= 4.0 * f64::EPSILON * (1.0 + t.abs()) {
            converged = true;
            break;
        }
    }
    if !converged {
        return None;
    }
    let q = base - n * t;
    let g = model.level_gradient(&q);
    let h = model.level_hessian(&q);
    let gn = g.dot(&n);
    if !(gn > 0.0) {
        return None;
    }
    let k = chart.dim - 1;
    let hn = h * n;
    let nhn = n.dot(&hn);
    let mut jet = LocalJet {
        value: t,
        gradient: [0.0; 2],
        hessian: [[0.0; 2]; 2],
    };
    for i in 0..k {
        jet.gradient[i] = g.dot(&chart.basis[i]) / gn;
    }
    for i in 0..k {
        for j in 0..k {
            let eij = chart.basis[i].dot(&(h * chart.basis[j]));
            let ein = chart.basis[i].dot(&hn);
            let ejn = chart.basis[j].dot(&hn);
            let fi = jet.gradient[i];
            let fj = jet.gradient[j];
            jet.hessian[i][j] = (eij - ein * fj - ejn * fi + nhn * fi * fj) / gn;
        }
    }
    Some((q, jet))
}

/// Euclidean ball of radius `radius` in dimension `d`.
pub fn make_ball(d: usize, radius: f64) -> Result<ConvexBody> {
    ConvexBody::new(Ball::new(d, radius)?)
}

/// Ellipsoid (ellipse in the plane) with the given semi-axes.
pub fn make_ellipsoid(semi_axes: &[f64]) -> Result<ConvexBody> {
    ConvexBody::new(Ellipsoid::new(semi_axes)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn bodies() -> Vec<ConvexBody> {
        vec![
            make_ball(2, 1.0).unwrap(),
            make_ball(3, 2.0).unwrap(),
            make_ellipsoid(&[2.0, 1.0]).unwrap(),
            make_ellipsoid(&[2.0, 1.0, 1.0]).unwrap(),
            make_ellipsoid(&[1.5, 1.0, 0.7]).unwrap(),
        ]
    }

    #[test]
    fn ball_constructor_checks() {
        assert!(matches!(make_ball(4, 1.0), Err(Error::UnsupportedDimension(4))));
        assert!(make_ball(3, 0.0).is_err());
        assert!(make_ellipsoid(&[1.0, -1.0, 1.0]).is_err());
        let s = make_ball(3, 2.0).unwrap();
        let p = s.point_from_normal(&Vec3::new(0.0, 0.6, 0.8));
        assert_relative_eq!(s.gaussian_curvature(&p).unwrap(), 0.25, epsilon = 1e-15);
    }

    #[test]
    fn unit_ellipsoid_matches_unit_ball() {
        let b = make_ball(3, 1.0).unwrap();
        let e = make_ellipsoid(&[1.0, 1.0, 1.0]).unwrap();
        for u in fibonacci_directions(3, 10) {
            assert_relative_eq!(b.support(&u), e.support(&u), epsilon = 1e-12);
            let (pb, pe) = (b.point_from_normal(&u), e.point_from_normal(&u));
            assert!((pb.ambient - pe.ambient).norm() < 1e-12);
            assert_relative_eq!(pb.curvature, pe.curvature, epsilon = 1e-12);
        }
    }

    #[test]
    fn ellipsoid_examples() {
        let e = make_ellipsoid(&[2.0, 1.0, 1.0]).unwrap();
        let tip = e.boundary_point(&[2.0, 0.0, 0.0]).unwrap();
        assert_relative_eq!(e.gaussian_curvature(&tip).unwrap(), 4.0, epsilon = 1e-12);
        let side = e.boundary_point(&[0.0, 1.0, 0.0]).unwrap();
        assert_relative_eq!(e.gaussian_curvature(&side).unwrap(), 0.25, epsilon = 1e-12);
        let x = Vec3::x();
        assert_relative_eq!(e.support(&x), 2.0);
        assert!((e.model().inverse_normal(&x) - Vec3::new(2.0, 0.0, 0.0)).norm() < 1e-15);
        let jet = e.graph_function_derivatives(&tip, &[0.0, 0.0]).unwrap();
        let (lo, hi) = sym_eigenvalues(2, &[
            [jet.hessian[(0, 0)], jet.hessian[(0, 1)]],
            [jet.hessian[(1, 0)], jet.hessian[(1, 1)]],
        ]);
        assert_relative_eq!(lo, 2.0, epsilon = 1e-12);
        assert_relative_eq!(hi, 2.0, epsilon = 1e-12);

        let ellipse = make_ellipsoid(&[2.0, 1.0]).unwrap();
        let p = ellipse.boundary_point(&[2.0, 0.0]).unwrap();
        assert_relative_eq!(ellipse.gaussian_curvature(&p).unwrap(), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn off_boundary_points_are_rejected() {
        let e = make_ellipsoid(&[2.0, 1.0, 1.0]).unwrap();
        assert!(matches!(
            e.boundary_point(&[1.9, 0.0, 0.0]),
            Err(Error::OffBoundary { .. })
        ));
        assert!(e.boundary_point(&[1.0, 0.0]).is_err());
    }

    #[test]
    fn sphere_graph_function() {
        let s = make_ball(3, 1.0).unwrap();
        for u in fibonacci_directions(3, 7) {
            let p = s.point_from_normal(&u);
            let j0 = s.graph_function_derivatives(&p, &[0.0, 0.0]).unwrap();
            assert!(j0.value.abs() < 1e-15 && j0.gradient.norm() < 1e-15);
            assert!((&j0.hessian - DMatrix::identity(2, 2)).norm() < 1e-12);
            let j = s.graph_function_derivatives(&p, &[0.06, 0.08]).unwrap();
            assert_relative_eq!(j.value, 1.0 - (1.0_f64 - 0.01).sqrt(), epsilon = 1e-14);
        }
    }

    #[test]
    fn chart_radius_is_enforced() {
        let s = make_ball(3, 1.0).unwrap();
        let p = s.point_from_normal(&Vec3::z());
        let r = s.graph_domain_radius() * 1.01;
        assert!(matches!(
            s.graph_function_derivatives(&p, &[r, 0.0]),
            Err(Error::ChartRadiusExceeded { .. })
        ));
    }

    #[test]
    fn hessian_matches_finite_differences() {
        let h = 1e-4;
        for body in bodies() {
            let k = body.dim() - 1;
            let r = 0.5 * body.graph_domain_radius();
            for (i, u) in fibonacci_directions(body.dim(), 12).iter().enumerate() {
                let p = body.point_from_normal(u);
                let a = 0.7 * i as f64;
                let y: Vec<f64> = [r * a.cos(), r * a.sin()][..k].to_vec();
                let jet = body.graph_function_derivatives(&p, &y).unwrap();
                let f = |dy: [f64; 2]| {
                    let mut z = y.clone();
                    for m in 0..k {
                        z[m] += dy[m];
                    }
                    body.graph_function_derivatives(&p, &z).unwrap().value
                };
                for a in 0..k {
                    for b in 0..k {
                        let mut ea = [0.0; 2];
                        let mut eb = [0.0; 2];
                        ea[a] = h;
                        eb[b] = h;
                        let fd = (f([ea[0] + eb[0], ea[1] + eb[1]])
                            - f([ea[0] - eb[0], ea[1] - eb[1]])
                            - f([eb[0] - ea[0], eb[1] - ea[1]])
                            + f([-ea[0] - eb[0], -ea[1] - eb[1]]))
                            / (4.0 * h * h);
                        let exact = jet.hessian[(a, b)];
                        let scale = jet.hessian.norm();
                        assert!(
                            (fd - exact).abs() <= 1e-6 * scale,
                            "{}: fd {fd} vs {exact}",
                            body.describe()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn hessian_determinant_is_gaussian_curvature() {
        for body in bodies() {
            let k = body.dim() - 1;
            for u in fibonacci_directions(body.dim(), 50) {
                let p = body.point_from_normal(&u);
                let jet = body.graph_function_derivatives(&p, &vec![0.0; k]).unwrap();
                let det = jet.hessian.determinant();
                let kappa = body.gaussian_curvature(&p).unwrap();
                assert!(((det - kappa) / kappa).abs() < 1e-10, "{det} vs {kappa}");
            }
        }
    }

    #[test]
    fn osculating_sandwich_and_form_bounds() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for body in bodies() {
            let c = *body.constants();
            let k = body.dim() - 1;
            for _ in 0..1000 {
                let mut u = Vec3::zeros();
                for i in 0..body.dim() {
                    u[i] = rng.random::<f64>() - 0.5;
                }
                let p = body.point_from_normal(&u.normalize());
                let r = body.graph_domain_radius() * rng.random::<f64>().sqrt();
                let a = rng.random::<f64>() * std::f64::consts::TAU;
                let y: Vec<f64> = [r * a.cos(), r * a.sin()][..k].to_vec();
                let f = body.graph_function_derivatives(&p, &y).unwrap().value;
                let b0 = body.osculating_form(&p, &y).unwrap();
                assert!(0.5 * b0 <= f && f <= 2.0 * b0, "{}", body.describe());
                let y2: f64 = y.iter().map(|v| v * v).sum();
                assert!(c.form_lower * y2 <= b0 && b0 <= c.form_upper * y2);
            }
        }
    }
}
