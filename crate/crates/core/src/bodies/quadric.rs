use nalgebra::Matrix3;

use super::BoundaryModel;
use crate::error::{Error, Result};
use crate::geometry::Vec3;

fn check_dim(d: usize) -> Result<()> {
    if d == 2 || d == 3 {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(d))
    }
}

/// Euclidean ball centred at the origin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ball {
    dim: usize,
    radius: f64,
}

impl Ball {
    pub fn new(dim: usize, radius: f64) -> Result<Self> {
        check_dim(dim)?;
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "ball radius must be positive, got {radius}"
            )));
        }
        Ok(Self { dim, radius })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
}

impl BoundaryModel for Ball {
    fn dim(&self) -> usize {
        self.dim
    }

    // F(x) = (|x|^2 - r^2) / (2r), so that |grad F| = 1 on the boundary.
    fn level(&self, x: &Vec3) -> f64 {
        (x.norm_squared() - self.radius * self.radius) / (2.0 * self.radius)
    }

    fn level_gradient(&self, x: &Vec3) -> Vec3 {
        x / self.radius
    }

    fn level_hessian(&self, _x: &Vec3) -> Matrix3<f64> {
        let mut h = Matrix3::identity() / self.radius;
        if self.dim == 2 {
            h[(2, 2)] = 0.0;
        }
        h
    }

    fn support(&self, _u: &Vec3) -> f64 {
        self.radius
    }

    fn inverse_normal(&self, u: &Vec3) -> Vec3 {
        u * self.radius
    }

    fn from_direction(&self, w: &Vec3) -> Vec3 {
        w * self.radius
    }

    fn to_direction(&self, x: &Vec3) -> Vec3 {
        x.normalize()
    }

    fn direction_jacobian(&self, _w: &Vec3) -> f64 {
        self.radius.powi(self.dim as i32 - 1)
    }

    fn diameter(&self) -> f64 {
        2.0 * self.radius
    }

    fn curvature(&self, _x: &Vec3) -> f64 {
        self.radius.powi(1 - self.dim as i32)
    }

    fn sphere_radius(&self) -> Option<f64> {
        Some(self.radius)
    }

    fn describe(&self) -> String {
        format!("ball:d={},r={}", self.dim, self.radius)
    }
}

/// Axis-aligned ellipsoid `sum x_i^2 / a_i^2 <= 1` (an ellipse when d = 2).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ellipsoid {
    dim: usize,
    axes: Vec3,
}

impl Ellipsoid {
    pub fn new(semi_axes: &[f64]) -> Result<Self> {
        check_dim(semi_axes.len())?;
        if let Some(a) = semi_axes.iter().find(|a| !(**a > 0.0 && a.is_finite())) {
            return Err(Error::InvalidParameter(format!(
                "semi-axes must be positive, got {a}"
            )));
        }
        let mut axes = Vec3::repeat(1.0);
        axes.as_mut_slice()[..semi_axes.len()].copy_from_slice(semi_axes);
        Ok(Self {
            dim: semi_axes.len(),
            axes,
        })
    }

    pub fn semi_axes(&self) -> &[f64] {
        &self.axes.as_slice()[..self.dim]
    }

    fn inv_sq(&self, i: usize) -> f64 {
        if i < self.dim {
            1.0 / (self.axes[i] * self.axes[i])
        } else {
            0.0
        }
    }
}

impl BoundaryModel for Ellipsoid {
    fn dim(&self) -> usize {
        self.dim
    }

    fn level(&self, x: &Vec3) -> f64 {
        0.5 * ((0..self.dim).map(|i| x[i] * x[i] * self.inv_sq(i)).sum::<f64>() - 1.0)
    }

    fn level_gradient(&self, x: &Vec3) -> Vec3 {
        Vec3::from_fn(|i, _| x[i] * self.inv_sq(i))
    }

    fn level_hessian(&self, _x: &Vec3) -> Matrix3<f64> {
        Matrix3::from_diagonal(&Vec3::from_fn(|i, _| self.inv_sq(i)))
    }

    fn support(&self, u: &Vec3) -> f64 {
        (0..self.dim)
            .map(|i| (self.axes[i] * u[i]).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    // Scale the normal components by the squared semi-axes and normalize back
    // onto the boundary.
    fn inverse_normal(&self, u: &Vec3) -> Vec3 {
        let h = self.support(u);
        Vec3::from_fn(|i, _| {
            if i < self.dim {
                self.axes[i] * self.axes[i] * u[i] / h
            } else {
                0.0
            }
        })
    }

    fn from_direction(&self, w: &Vec3) -> Vec3 {
        Vec3::from_fn(|i, _| if i < self.dim { self.axes[i] * w[i] } else { 0.0 })
    }

    fn to_direction(&self, x: &Vec3) -> Vec3 {
        Vec3::from_fn(|i, _| if i < self.dim { x[i] / self.axes[i] } else { 0.0 }).normalize()
    }

    // det(A) |A^{-1} w| for the linear map A = diag(a_i).
    fn direction_jacobian(&self, w: &Vec3) -> f64 {
        let det: f64 = self.semi_axes().iter().product();
        let s: f64 = (0..self.dim).map(|i| (w[i] / self.axes[i]).powi(2)).sum();
        det * s.sqrt()
    }

    fn diameter(&self) -> f64 {
        2.0 * self.semi_axes().iter().cloned().fold(0.0, f64::max)
    }

    // kappa = 1 / (prod a_i^2 * (sum x_i^2 / a_i^4)^((d+1)/2)).
    fn curvature(&self, x: &Vec3) -> f64 {
        let prod: f64 = self.semi_axes().iter().map(|a| a * a).product();
        let s: f64 = (0..self.dim).map(|i| (x[i] * self.inv_sq(i)).powi(2)).sum();
        1.0 / (prod * s.powf(0.5 * (self.dim as f64 + 1.0)))
    }

    fn describe(&self) -> String {
        let axes: Vec<String> = self.semi_axes().iter().map(|a| a.to_string()).collect();
        format!("ellipsoid:{}", axes.join(","))
    }
}
