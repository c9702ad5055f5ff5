//! Goodness-of-fit statistics.

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};

fn sorted(samples: &[f64]) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    if samples.iter().any(|x| x.is_nan()) {
        return Err(Error::InvalidParameter("sample contains NaN".into()));
    }
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    Ok(xs)
}

/// One-sided deviations `(D+, D-)` of the empirical CDF from `cdf`.
fn deviations(xs: &[f64], cdf: &dyn Fn(f64) -> f64) -> (f64, f64) {
    let n = xs.len() as f64;
    let (mut plus, mut minus) = (0.0_f64, 0.0_f64);
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        plus = plus.max((i + 1) as f64 / n - f);
        minus = minus.max(f - i as f64 / n);
    }
    (plus, minus)
}

/// Kolmogorov–Smirnov distance `sup |F_N - F|`.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    let xs = sorted(samples)?;
    let (p, m) = deviations(&xs, &cdf);
    Ok(p.max(m))
}

/// Kuiper statistic `D+ + D-`, invariant under rotations of the circle.
pub fn kuiper_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    let xs = sorted(samples)?;
    let (p, m) = deviations(&xs, &cdf);
    Ok(p + m)
}

/// Asymptotic p-value of a KS distance `d` from `n` samples, with the
/// Stephens small-sample correction.
pub fn kolmogorov_p_value(d: f64, n: usize) -> f64 {
    let sn = (n as f64).sqrt();
    let lambda = (sn + 0.12 + 0.11 / sn) * d;
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-17 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Asymptotic p-value of a Kuiper statistic `v` from `n` samples.
pub fn kuiper_p_value(v: f64, n: usize) -> f64 {
    let sn = (n as f64).sqrt();
    let lambda = (sn + 0.155 + 0.24 / sn) * v;
    if lambda < 0.4 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let k2l2 = (k * k) as f64 * lambda * lambda;
        let term = (4.0 * k2l2 - 1.0) * (-2.0 * k2l2).exp();
        sum += term;
        if term.abs() < 1e-17 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// `1.63 / sqrt(N)`: the 99% critical value of the one-sample KS distance.
pub fn kolmogorov_critical_99(n: usize) -> f64 {
    1.63 / (n as f64).sqrt()
}

/// `1.36 / sqrt(N)`: the 95% critical value, used as the sampling-noise band
/// when comparing KS distances across sample sizes.
pub fn ks_noise_band(n: usize) -> f64 {
    1.36 / (n as f64).sqrt()
}

/// Two-sample KS distance and its asymptotic p-value.
pub fn two_sample_ks(a: &[f64], b: &[f64]) -> Result<(f64, f64)> {
    let (xa, xb) = (sorted(a)?, sorted(b)?);
    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0_f64);
    while i < xa.len() && j < xb.len() {
        let x = xa[i].min(xb[j]);
        while i < xa.len() && xa[i] <= x {
            i += 1;
        }
        while j < xb.len() && xb[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let ne = (na * nb / (na + nb)).round() as usize;
    Ok((d, kolmogorov_p_value(d, ne.max(1))))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
}

/// Pearson chi-square test of observed counts against cell probabilities.
pub fn chi_square_test(observed: &[usize], probabilities: &[f64]) -> Result<ChiSquareResult> {
    if observed.len() != probabilities.len() || observed.len() < 2 {
        return Err(Error::InvalidParameter(
            "chi-square needs matching cells, at least two".into(),
        ));
    }
    let total: usize = observed.iter().sum();
    if total == 0 {
        return Err(Error::EmptySample);
    }
    let mass: f64 = probabilities.iter().sum();
    let mut statistic = 0.0;
    for (&o, &p) in observed.iter().zip(probabilities) {
        let e = total as f64 * p / mass;
        if !(e > 0.0) {
            return Err(Error::InvalidParameter("cell with zero expectation".into()));
        }
        statistic += (o as f64 - e).powi(2) / e;
    }
    let dof = observed.len() - 1;
    let dist = ChiSquared::new(dof as f64)
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    Ok(ChiSquareResult {
        statistic,
        degrees_of_freedom: dof,
        p_value: 1.0 - dist.cdf(statistic),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::limits::{gumbel_cdf, gumbel_quantile};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ks_basics() {
        assert_eq!(ks_statistic(&[0.0], |x| gumbel_cdf(x + gumbel_quantile(0.5))).unwrap(), 0.5);
        assert!(matches!(ks_statistic(&[], gumbel_cdf), Err(Error::EmptySample)));
    }

    #[test]
    fn ks_of_own_distribution_is_within_band() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 10_000;
        let xs: Vec<f64> = (0..n).map(|_| gumbel_quantile(rng.random())).collect();
        assert!(ks_statistic(&xs, gumbel_cdf).unwrap() < kolmogorov_critical_99(n));
    }

    #[test]
    fn kolmogorov_critical_value_matches_p_value() {
        // 1.63 / sqrt(N) is the asymptotic 1% point.
        let p = kolmogorov_p_value(1.628 / 1e6f64.sqrt(), 1_000_000);
        assert!((p - 0.01).abs() < 1e-3, "{p}");
    }

    #[test]
    fn kolmogorov_p_value_is_calibrated_by_simulation() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let (reps, n) = (2000, 200);
        let rejected = (0..reps)
            .filter(|_| {
                let xs: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
                let d = ks_statistic(&xs, |x| x).unwrap();
                kolmogorov_p_value(d, n) < 0.05
            })
            .count();
        let rate = rejected as f64 / reps as f64;
        assert!((rate - 0.05).abs() < 0.015, "{rate}");
    }

    #[test]
    fn kuiper_and_two_sample() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a: Vec<f64> = (0..2000).map(|_| rng.random::<f64>()).collect();
        let b: Vec<f64> = (0..2000).map(|_| rng.random::<f64>()).collect();
        let v = kuiper_statistic(&a, |x| x).unwrap();
        assert!(kuiper_p_value(v, a.len()) > 0.01);
        let (_, p) = two_sample_ks(&a, &b).unwrap();
        assert!(p > 0.01);
        let shifted: Vec<f64> = b.iter().map(|x| x * 0.8).collect();
        assert!(two_sample_ks(&a, &shifted).unwrap().1 < 1e-6);
    }

    #[test]
    fn chi_square_of_a_fair_die() {
        let r = chi_square_test(&[100, 100, 100, 100, 100, 100], &[1.0; 6]).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
        let r = chi_square_test(&[200, 0, 100, 100, 100, 100], &[1.0; 6]).unwrap();
        assert!(r.p_value < 1e-10);
    }
}
