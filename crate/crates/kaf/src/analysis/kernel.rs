use crate::error::{Error, Result};
use crate::numerics::RngState;
use std::f64::consts::TAU;

/// Outcome of an empirical random-feature kernel check.
///
/// `sup_error`/`mean_error` measure `|z(x)^T z(y) - exp(-|x-y|^2 / (2 sigma^2))|`
/// over sampled pairs. `diam` is the diameter of the sampling cube and
/// `sigma_p = 1/sigma` the bandwidth of the frequency distribution; together
/// they drive the classical uniform-approximation sample bound (see
/// [`KernelCheckReport::concentration_samples`]).
#[derive(Debug, Clone, PartialEq)]
pub struct KernelCheckReport {
    pub m: usize,
    pub sigma: f64,
    pub d: usize,
    pub n_pairs: usize,
    pub sup_error: f64,
    pub mean_error: f64,
    /// Diameter of the `[-1, 1]^d` sampling cube: `2 sqrt(d)`.
    pub diam: f64,
    /// Bandwidth of the frequency distribution: `1 / sigma`.
    pub sigma_p: f64,
}

impl KernelCheckReport {
    /// Feature count suggested by the uniform concentration bound for a
    /// target sup error `eps`: `2^8 (sigma_p * diam / eps)^2`. Reported for
    /// context only; it is extremely conservative compared to the measured
    /// errors.
    pub fn concentration_samples(&self, eps: f64) -> f64 {
        256.0 * (self.sigma_p * self.diam / eps).powi(2)
    }
}

/// Draws `m` frequencies `w ~ N(0, sigma^-2 I_d)` and phases `U[0, 2pi)`,
/// builds `sqrt(1/m)`-normalized cos/sin features, and measures how well the
/// feature inner product reproduces the Gaussian kernel on `n_pairs` point
/// pairs drawn uniformly from `[-1, 1]^d`.
pub fn kernel_approx_check(
    m: usize,
    sigma: f64,
    d: usize,
    n_pairs: usize,
    seed: u64,
) -> Result<KernelCheckReport> {
    if m < 1 || d < 1 || n_pairs < 1 {
        return Err(Error::Param(format!(
            "m, d, n_pairs must be >= 1, got {m}, {d}, {n_pairs}"
        )));
    }
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::Param(format!("sigma must be positive, got {sigma}")));
    }

    let mut rng = RngState::new(seed);
    let freqs = rng.sample_gaussian(0.0, 1.0 / sigma, m * d)?;
    let phases = rng.sample_uniform(0.0, TAU, m)?;

    let mut sup_error = 0.0f64;
    let mut sum_error = 0.0f64;
    for _ in 0..n_pairs {
        let x = rng.sample_uniform(-1.0, 1.0, d)?;
        let y = rng.sample_uniform(-1.0, 1.0, d)?;
        let approx = feature_dot(&freqs, &phases, m, d, &x, &y);
        let dist2: f64 = x
            .iter()
            .zip(&y)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        let exact = (-dist2 / (2.0 * sigma * sigma)).exp();
        let err = (approx - exact).abs();
        sup_error = sup_error.max(err);
        sum_error += err;
    }

    Ok(KernelCheckReport {
        m,
        sigma,
        d,
        n_pairs,
        sup_error,
        mean_error: sum_error / n_pairs as f64,
        diam: 2.0 * (d as f64).sqrt(),
        sigma_p: 1.0 / sigma,
    })
}

/// `z(x)^T z(y)` for the cos/sin feature map. The phase shifts cancel in the
/// inner product (`cos a cos b + sin a sin b = cos(a - b)`), so this reduces
/// to the mean of `cos(w^T (x - y))`.
fn feature_dot(freqs: &[f64], phases: &[f64], m: usize, d: usize, x: &[f64], y: &[f64]) -> f64 {
    let mut acc = 0.0;
    for i in 0..m {
        let row = &freqs[i * d..(i + 1) * d];
        let mut tx = phases[i];
        let mut ty = phases[i];
        for j in 0..d {
            tx += row[j] * x[j];
            ty += row[j] * y[j];
        }
        let (sx, cx) = tx.sin_cos();
        let (sy, cy) = ty.sin_cos();
        acc += cx * cy + sx * sy;
    }
    acc / m as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_points_give_unit_kernel() {
        // cos^2 + sin^2 = 1 term by term, so the dot is 1 up to rounding.
        let mut rng = RngState::new(3);
        let m = 257;
        let d = 5;
        let freqs = rng.sample_gaussian(0.0, 2.0, m * d).unwrap();
        let phases = rng.sample_uniform(0.0, TAU, m).unwrap();
        for t in 0..10 {
            let x = rng.sample_uniform(-1.0, 1.0, d).unwrap();
            let got = feature_dot(&freqs, &phases, m, d, &x, &x);
            assert!((got - 1.0).abs() < 1e-12, "trial {t}: {got}");
        }
    }

    #[test]
    fn report_invariants_hold() {
        let r = kernel_approx_check(512, 0.7, 3, 100, 9).unwrap();
        assert!(r.sup_error >= r.mean_error);
        assert!(r.mean_error >= 0.0);
        assert!((r.diam - 2.0 * 3.0f64.sqrt()).abs() < 1e-15);
        assert!((r.sigma_p - 1.0 / 0.7).abs() < 1e-15);
        assert_eq!((r.m, r.d, r.n_pairs), (512, 3, 100));
    }

    #[test]
    fn large_feature_count_tracks_the_gaussian_kernel() {
        let r = kernel_approx_check(4096, 1.0, 4, 200, 42).unwrap();
        assert!(r.sup_error < 0.1, "sup_error = {}", r.sup_error);
    }

    #[test]
    fn quadrupling_features_halves_the_mean_error() {
        // Monte Carlo rate: mean error ~ 1/sqrt(m), so m -> 4m gives ~0.5.
        let mut ratio_sum = 0.0;
        for seed in 0..10 {
            let lo = kernel_approx_check(1024, 1.0, 4, 200, seed).unwrap();
            let hi = kernel_approx_check(4096, 1.0, 4, 200, seed).unwrap();
            ratio_sum += hi.mean_error / lo.mean_error;
        }
        let ratio = ratio_sum / 10.0;
        assert!(
            (0.35..=0.7).contains(&ratio),
            "mean-error ratio = {ratio}"
        );
    }

    #[test]
    fn sup_error_median_is_nonincreasing_in_m() {
        let median = |m: usize| {
            let mut v: Vec<f64> = (0..10)
                .map(|seed| kernel_approx_check(m, 1.0, 4, 200, seed).unwrap().sup_error)
                .collect();
            v.sort_by(|a, b| a.partial_cmp(b).unwrap());
            0.5 * (v[4] + v[5])
        };
        let (a, b, c) = (median(256), median(1024), median(4096));
        assert!(a >= b && b >= c, "medians not monotone: {a} {b} {c}");
    }

    #[test]
    fn concentration_bound_is_conservative() {
        let r = kernel_approx_check(4096, 1.0, 4, 200, 7).unwrap();
        // The bound asks for far more features than needed in practice.
        assert!(r.concentration_samples(r.sup_error) > r.m as f64);
    }

    #[test]
    fn bad_parameters_are_rejected() {
        assert!(kernel_approx_check(0, 1.0, 4, 10, 0).is_err());
        assert!(kernel_approx_check(16, 0.0, 4, 10, 0).is_err());
        assert!(kernel_approx_check(16, -1.0, 4, 10, 0).is_err());
        assert!(kernel_approx_check(16, 1.0, 0, 10, 0).is_err());
        assert!(kernel_approx_check(16, 1.0, 4, 0, 0).is_err());
    }
}
