//! Gauss–Legendre rules and composite integration over direction space.

use std::f64::consts::{PI, TAU};

use crate::geometry::{direction_from_angles, CompensatedSum, Vec3};

/// Nodes and weights of the `m`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(m >= 1, "rule needs at least one node");
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_m.
        let mut x = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(m, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(m, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre(m: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=m {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    if m == 0 {
        return (1.0, 0.0);
    }
    let d = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Order of the per-panel rule used by the composite integrators.
pub const PANEL_ORDER: usize = 8;

/// Composite Gauss–Legendre integral of `f` over `[a, b]` with `panels`
/// equal panels.
pub fn composite(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let (x, w) = gauss_legendre(PANEL_ORDER);
    let h = (b - a) / panels as f64;
    let mut sum = CompensatedSum::default();
    for p in 0..panels {
        let mid = a + h * (p as f64 + 0.5);
        for (xi, wi) in x.iter().zip(&w) {
            sum.add(wi * f(mid + 0.5 * h * xi));
        }
    }
    0.5 * h * sum.value()
}

/// Integral of `g(w)` over a region of the unit circle (`dim = 2`, angles
/// `t in range[0]`) or the unit sphere (`dim = 3`, polar angle in
/// `range[0]`, azimuth in `range[1]`) against the uniform angular measure.
pub fn integrate_directions(
    dim: usize,
    g: &(impl Fn(&Vec3) -> f64 + ?Sized),
    range: [[f64; 2]; 2],
    panels: usize,
) -> f64 {
    if dim == 2 {
        let [a, b] = range[0];
        return composite(|t| g(&direction_from_angles(2, [t, 0.0])), a, b, panels);
    }
    let [t0, t1] = range[0];
    let [p0, p1] = range[1];
    let (x, w) = gauss_legendre(PANEL_ORDER);
    let (pt, pp) = (panels, 2 * panels);
    let (ht, hp) = ((t1 - t0) / pt as f64, (p1 - p0) / pp as f64);
    let mut sum = CompensatedSum::default();
    for i in 0..pt {
        let mt = t0 + ht * (i as f64 + 0.5);
        for (xi, wi) in x.iter().zip(&w) {
            let theta = mt + 0.5 * ht * xi;
            let st = theta.sin();
            for j in 0..pp {
                let mp = p0 + hp * (j as f64 + 0.5);
                for (xj, wj) in x.iter().zip(&w) {
                    let phi = mp + 0.5 * hp * xj;
                    sum.add(wi * wj * st * g(&direction_from_angles(3, [theta, phi])));
                }
            }
        }
    }
    0.25 * ht * hp * sum.value()
}

/// The whole circle or sphere as an angle range.
pub fn full_range(dim: usize) -> [[f64; 2]; 2] {
    if dim == 2 {
        [[0.0, TAU], [0.0, 0.0]]
    } else {
        [[0.0, PI], [0.0, TAU]]
    }
}
