//! Constants of the Gumbel limit theorem, the standardizations, and the exact
//! maximal-spacing law on the circle. Logarithms are natural throughout: the
//! Gumbel law `exp(-e^{-x})` fixes the base.

mod gof;

pub use gof::{
    chi_square_test, kolmogorov_p_value, kolmogorov_critical_99, ks_noise_band, ks_statistic,
    kuiper_p_value, kuiper_statistic, two_sample_ks, ChiSquareResult,
};

use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::geometry::CompensatedSum;

/// Volume `kappa_k` of the `k`-dimensional Euclidean unit ball.
pub fn unit_ball_volume(k: usize) -> f64 {
    let h = 0.5 * k as f64;
    (h * std::f64::consts::PI.ln() - ln_gamma(h + 1.0)).exp()
}

/// `alpha = (sqrt(pi) Gamma((d+1)/2) / Gamma(d/2))^(d-2) / (d-1)!`.
pub fn alpha_constant(d: usize) -> f64 {
    assert!(d >= 2, "alpha is defined for d >= 2");
    let d = d as f64;
    let inner = 0.5 * std::f64::consts::PI.ln() + ln_gamma(0.5 * (d + 1.0)) - ln_gamma(0.5 * d);
    ((d - 2.0) * inner - ln_gamma(d)).exp()
}

/// Location and scale of the Hausdorff distance at sample size `n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScalingConstants {
    pub d: usize,
    pub n: usize,
    pub v_k: f64,
    pub c_n: f64,
    pub a_n: f64,
    pub b_n: f64,
    pub alpha: f64,
    pub kappa_vol: f64,
}

/// Smallest `n` with `ln ln n > 0` comfortably.
pub const MIN_SCALING_N: usize = 16;

pub fn scaling_constants(d: usize, n: usize, v_k: f64) -> Result<ScalingConstants> {
    if d < 2 {
        return Err(Error::UnsupportedDimension(d));
    }
    if n < MIN_SCALING_N {
        return Err(Error::SampleSizeTooSmall {
            n,
            min: MIN_SCALING_N,
        });
    }
    if !(v_k > 0.0 && v_k.is_finite()) {
        return Err(Error::InvalidParameter(format!("v_k must be positive, got {v_k}")));
    }
    let kappa_vol = unit_ball_volume(d - 1);
    let alpha = alpha_constant(d);
    let (nf, k) = (n as f64, (d - 1) as f64);
    let ln_n = nf.ln();
    let c_n = (v_k / kappa_vol * ln_n / nf).powf(2.0 / k);
    let b_n = c_n / (k * ln_n);
    let a_n = (0.5 + ((d as f64 - 2.0) * ln_n.ln() + alpha.ln()) / (k * ln_n)) * c_n;
    Ok(ScalingConstants {
        d,
        n,
        v_k,
        c_n,
        a_n,
        b_n,
        alpha,
        kappa_vol,
    })
}

pub fn gumbel_cdf(x: f64) -> f64 {
    (-(-x).exp()).exp()
}

/// Inverse of [`gumbel_cdf`] on `(0, 1)`.
pub fn gumbel_quantile(p: f64) -> f64 {
    -(-p.ln()).ln()
}

/// `(delta_H - a_n) / b_n`.
pub fn standardize_hausdorff(delta_h: f64, sc: &ScalingConstants) -> f64 {
    (delta_h - sc.a_n) / sc.b_n
}

/// `n V - ln n - (d - 2) ln ln n - ln alpha`.
pub fn standardize_spacing(v: f64, n: usize, d: usize) -> f64 {
    let nf = n as f64;
    nf * v - nf.ln() - (d as f64 - 2.0) * nf.ln().ln() - alpha_constant(d).ln()
}

/// Largest log-magnitude of a term in the alternating spacing sum that still
/// leaves about ten correct digits after cancellation.
const SPACING_LOG_TERM_LIMIT: f64 = 14.0;

/// Exact `P[M_n <= s]` for the largest of the `n` spacings of `n` i.i.d.
/// uniform points on a circle of unit length:
/// `sum_{k < 1/s} (-1)^k C(n, k) (1 - k s)^(n-1)`.
///
/// Valid for `2 <= n <= 10^4`. The sum is evaluated term by term in the log
/// domain with compensated summation, and refused when its terms are too
/// large for the cancellation to leave an accurate result.
pub fn circle_max_spacing_cdf(n: usize, s: f64) -> Result<f64> {
    if !(2..=10_000).contains(&n) {
        return Err(Error::InvalidParameter(format!(
            "spacing oracle needs 2 <= n <= 10^4, got {n}"
        )));
    }
    if s.is_nan() {
        return Err(Error::InvalidParameter("s is NaN".into()));
    }
    if s >= 1.0 {
        return Ok(1.0);
    }
    if s <= 1.0 / n as f64 {
        return Ok(0.0);
    }
    let nf = n as f64;
    let ln_fact_n = ln_gamma(nf + 1.0);
    let mut sum = CompensatedSum::default();
    let mut max_log = f64::NEG_INFINITY;
    let mut k = 0usize;
    while k <= n && (k as f64) * s < 1.0 {
        let kf = k as f64;
        let log_term = ln_fact_n - ln_gamma(kf + 1.0) - ln_gamma(nf - kf + 1.0)
            + (nf - 1.0) * (1.0 - kf * s).ln();
        max_log = max_log.max(log_term);
        let term = log_term.exp();
        sum.add(if k % 2 == 0 { term } else { -term });
        k += 1;
    }
    if max_log > SPACING_LOG_TERM_LIMIT {
        return Err(Error::NumericallyUnstable(format!(
            "alternating spacing sum at n = {n}, s = {s}: largest term e^{max_log:.1}"
        )));
    }
    Ok(sum.value().clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn ball_volumes() {
        let exact = [1.0, 2.0, PI, 4.0 * PI / 3.0, PI * PI / 2.0, 8.0 * PI * PI / 15.0];
        for (k, v) in exact.iter().enumerate() {
            assert!((unit_ball_volume(k) - v).abs() < 1e-12 * v, "k={k}");
        }
    }

    #[test]
    fn alpha_closed_forms() {
        // Gamma(3/2) = sqrt(pi)/2, Gamma(2) = 1, Gamma(5/2) = 3 sqrt(pi)/4, Gamma(3) = 2.
        assert_eq!(alpha_constant(2), 1.0);
        assert!((alpha_constant(3) - 1.0).abs() < 1e-12);
        assert!((alpha_constant(4) - 3.0 * PI * PI / 32.0).abs() < 1e-12);
        // d = 5: (sqrt(pi) Gamma(3) / Gamma(5/2))^3 / 4! = (8/3)^3 / 24.
        assert!((alpha_constant(5) - (8.0_f64 / 3.0).powi(3) / 24.0).abs() < 1e-12);
    }

    #[test]
    fn scaling_constants_examples() {
        let sc = scaling_constants(3, 1000, 4.0 * PI).unwrap();
        let l = 1000f64.ln();
        assert!((sc.c_n - 4.0 * l / 1000.0).abs() < 1e-15);
        assert!((sc.b_n - 0.002).abs() < 1e-15);
        assert!((sc.b_n * 2.0 * l - sc.c_n).abs() < 1e-17);
        assert!((sc.a_n - (0.5 + l.ln() / (2.0 * l)) * sc.c_n).abs() < 1e-15);
        let sc2 = scaling_constants(2, 100, 2.0 * PI).unwrap();
        assert!((sc2.c_n - (PI * 100f64.ln() / 100.0).powi(2)).abs() < 1e-15);
        assert!(matches!(scaling_constants(3, 15, 1.0), Err(Error::SampleSizeTooSmall { .. })));
    }

    #[test]
    fn location_approaches_half_of_scale() {
        let mut last = f64::INFINITY;
        for e in 2..12 {
            let sc = scaling_constants(3, 10usize.pow(e), 4.0 * PI).unwrap();
            let gap = (sc.a_n / sc.c_n - 0.5).abs();
            assert!(gap < last);
            last = gap;
        }
        // ln ln n / (2 ln n) at n = 10^11.
        assert!(last < 0.065);
    }

    #[test]
    fn gumbel_values() {
        assert!((gumbel_cdf(0.0) - (-1.0f64).exp()).abs() < 1e-16);
        assert!((gumbel_cdf(-(2f64.ln()).ln()) - 0.5).abs() < 1e-15);
        assert_eq!(gumbel_cdf(50.0), 1.0);
        assert!((gumbel_cdf(gumbel_quantile(0.3)) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn standardizations() {
        let sc = scaling_constants(3, 1000, 4.0 * PI).unwrap();
        assert!(standardize_hausdorff(sc.a_n, &sc).abs() < 1e-12);
        assert!((standardize_hausdorff(sc.a_n + sc.b_n, &sc) - 1.0).abs() < 1e-12);
        let t = standardize_hausdorff(0.021, &sc);
        assert!((t - (0.021 - sc.a_n) / 0.002).abs() < 1e-9);
        let l = 1000f64.ln();
        assert!((standardize_spacing(0.01, 1000, 3) - (10.0 - l - l.ln())).abs() < 1e-12);
        assert!(standardize_spacing(l / 1000.0, 1000, 2).abs() < 1e-12);
    }

    #[test]
    fn spacing_cdf_edges() {
        assert!((circle_max_spacing_cdf(2, 0.6).unwrap() - 0.2).abs() < 1e-13);
        assert_eq!(circle_max_spacing_cdf(7, 1.0).unwrap(), 1.0);
        assert_eq!(circle_max_spacing_cdf(7, 0.1).unwrap(), 0.0);
        assert!(circle_max_spacing_cdf(1, 0.5).is_err());
        assert!(circle_max_spacing_cdf(20_000, 0.5).is_err());
        let mut last = 0.0;
        for i in 1..200 {
            let p = circle_max_spacing_cdf(10, i as f64 / 200.0).unwrap();
            assert!(p >= last - 1e-14);
            last = p;
        }
    }
}
