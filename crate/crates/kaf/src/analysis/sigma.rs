use crate::error::{Error, Result};
use crate::numerics::{gelu, normal_pdf};
use std::f64::consts::TAU;

/// Standard deviation of the Gaussian window that localizes the activation
/// before taking its transform. Matches the layer's operating regime where
/// normalized inputs concentrate within a few units of zero.
pub const SIGMA_WINDOW_STD: f64 = 2.0;

/// Half-width of the spatial integration interval. The windowed activation
/// decays like the Gaussian tail, so mass beyond `|x| = 40` is negligible
/// (below 1e-170) and widening the interval leaves the result unchanged.
pub const SPECTRUM_HALF_WIDTH: f64 = 40.0;

/// Result of the spectral bandwidth optimization for the frequency
/// initialization scale.
///
/// `alpha_opt = sqrt(integral_s / integral_s2)` where `integral_s` and
/// `integral_s2` are the per-cycle integrals of the windowed activation's
/// energy spectrum and its square. Both integrals are strictly positive and
/// the optimum lands near 1.64.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaOptReport {
    pub alpha_opt: f64,
    pub integral_s: f64,
    pub integral_s2: f64,
    /// Number of quadrature subintervals used for each transform value.
    pub n_mc: usize,
    pub grid_spacing: f64,
    pub grid_limit: f64,
    pub window_std: f64,
    pub half_width: f64,
}

/// Windowed activation sampled on a Simpson grid, with quadrature weights
/// folded in so each transform value is two dot products with cos/sin.
struct WindowedSamples {
    xs: Vec<f64>,
    weighted: Vec<f64>,
}

fn windowed_samples(n_mc: usize, half_width: f64) -> WindowedSamples {
    let n = if n_mc % 2 == 0 { n_mc } else { n_mc + 1 }; // Simpson needs even
    let h = 2.0 * half_width / n as f64;
    let mut xs = Vec::with_capacity(n + 1);
    let mut weighted = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let x = -half_width + j as f64 * h;
        let w = if j == 0 || j == n {
            1.0
        } else if j % 2 == 1 {
            4.0
        } else {
            2.0
        };
        xs.push(x);
        weighted.push(gelu(x) * normal_pdf(x / SIGMA_WINDOW_STD) / SIGMA_WINDOW_STD * w * h / 3.0);
    }
    WindowedSamples { xs, weighted }
}

impl WindowedSamples {
    /// Energy spectral density `S(omega) = |F(omega)|^2` of the windowed
    /// activation, where `F` is its forward angular-frequency transform.
    fn density(&self, omega: f64) -> f64 {
        let mut re = 0.0;
        let mut im = 0.0;
        for (x, w) in self.xs.iter().zip(&self.weighted) {
            let (s, c) = (omega * x).sin_cos();
            re += w * c;
            im -= w * s;
        }
        re * re + im * im
    }
}

/// One-off evaluation of the windowed activation's energy spectrum,
/// normalized exactly as in [`derive_sigma_opt`].
pub fn gelu_spectral_density(omega: f64, n_mc: usize, half_width: f64) -> Result<f64> {
    validate(n_mc, 0.05, 20.0, half_width)?;
    Ok(windowed_samples(n_mc, half_width).density(omega))
}

fn validate(n_mc: usize, grid_spacing: f64, grid_limit: f64, half_width: f64) -> Result<()> {
    if n_mc < 10_000 {
        return Err(Error::Param(format!(
            "n_mc must be >= 10000 for a converged transform, got {n_mc}"
        )));
    }
    if !(grid_spacing > 0.0 && grid_spacing <= 0.05) {
        return Err(Error::Param(format!(
            "frequency grid spacing must be in (0, 0.05], got {grid_spacing}"
        )));
    }
    if grid_limit < 20.0 {
        return Err(Error::Param(format!(
            "frequency grid must cover |omega| <= 20, got limit {grid_limit}"
        )));
    }
    if half_width < SPECTRUM_HALF_WIDTH {
        return Err(Error::Param(format!(
            "spatial half-width must be >= {SPECTRUM_HALF_WIDTH}, got {half_width}"
        )));
    }
    Ok(())
}

/// [`derive_sigma_opt`] with an explicit spatial half-width, for checking
/// that the default interval is already converged.
pub fn derive_sigma_opt_windowed(
    n_mc: usize,
    grid_spacing: f64,
    grid_limit: f64,
    half_width: f64,
) -> Result<SigmaOptReport> {
    validate(n_mc, grid_spacing, grid_limit, half_width)?;
    let samples = windowed_samples(n_mc, half_width);

    // S is even, so integrate over [0, limit] and mirror. Trapezoid rule on
    // the symmetric grid; the tails contribute nothing visible at |w| = 20.
    let k_max = (grid_limit / grid_spacing).round() as usize;
    let mut sum_s = 0.0;
    let mut sum_s2 = 0.0;
    for k in 0..=k_max {
        let s = samples.density(k as f64 * grid_spacing);
        let w = if k == 0 || k == k_max { 1.0 } else { 2.0 };
        sum_s += w * s;
        sum_s2 += w * s * s;
    }
    // Per-cycle normalization: d omega / (2 pi).
    let integral_s = sum_s * grid_spacing / TAU;
    let integral_s2 = sum_s2 * grid_spacing / TAU;

    Ok(SigmaOptReport {
        alpha_opt: (integral_s / integral_s2).sqrt(),
        integral_s,
        integral_s2,
        n_mc,
        grid_spacing,
        grid_limit,
        window_std: SIGMA_WINDOW_STD,
        half_width,
    })
}

/// Derives the bandwidth-optimal frequency scale by integrating the windowed
/// activation's energy spectrum: `alpha = sqrt(int S / int S^2)` with
/// per-cycle integrals. Requires at least 1e4 quadrature subintervals and a
/// frequency grid covering `|omega| <= 20` at spacing `<= 0.05`.
pub fn derive_sigma_opt(n_mc: usize, grid_spacing: f64, grid_limit: f64) -> Result<SigmaOptReport> {
    derive_sigma_opt_windowed(n_mc, grid_spacing, grid_limit, SPECTRUM_HALF_WIDTH)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report() -> SigmaOptReport {
        derive_sigma_opt(20_000, 0.02, 20.0).unwrap()
    }

    #[test]
    fn optimum_lands_in_the_expected_band() {
        let r = report();
        assert!(
            (1.5..=1.8).contains(&r.alpha_opt),
            "alpha_opt = {}",
            r.alpha_opt
        );
        // Regression pin for the exact convention implemented here.
        assert!((r.alpha_opt - 1.6425).abs() < 5e-3, "alpha_opt = {}", r.alpha_opt);
    }

    #[test]
    fn integrals_are_positive_and_in_range() {
        // Reference magnitudes 0.168 and 0.062, accepted within +/- 25%.
        let r = report();
        assert!(r.integral_s > 0.0 && r.integral_s2 > 0.0);
        assert!(
            (0.168 * 0.75..=0.168 * 1.25).contains(&r.integral_s),
            "integral_s = {}",
            r.integral_s
        );
        assert!(
            (0.062 * 0.75..=0.062 * 1.25).contains(&r.integral_s2),
            "integral_s2 = {}",
            r.integral_s2
        );
    }

    #[test]
    fn spectrum_decays_at_high_frequency() {
        let s5 = gelu_spectral_density(5.0, 20_000, SPECTRUM_HALF_WIDTH).unwrap();
        let s10 = gelu_spectral_density(10.0, 20_000, SPECTRUM_HALF_WIDTH).unwrap();
        assert!(s10 < s5, "S(10) = {s10} !< S(5) = {s5}");
        assert!(s10 > 0.0);
    }

    #[test]
    fn result_is_deterministic() {
        let a = report();
        let b = report();
        assert_eq!(a.alpha_opt.to_bits(), b.alpha_opt.to_bits());
        assert_eq!(a.integral_s.to_bits(), b.integral_s.to_bits());
        assert_eq!(a.integral_s2.to_bits(), b.integral_s2.to_bits());
    }

    #[test]
    fn doubling_the_spatial_interval_changes_nothing() {
        let a = report();
        // Same spatial resolution on the doubled interval.
        let b = derive_sigma_opt_windowed(40_000, 0.02, 20.0, 2.0 * SPECTRUM_HALF_WIDTH).unwrap();
        assert!(
            (a.alpha_opt - b.alpha_opt).abs() <= 1e-6,
            "alpha drifted: {} vs {}",
            a.alpha_opt,
            b.alpha_opt
        );
    }

    #[test]
    fn insufficient_resolution_is_rejected() {
        assert!(derive_sigma_opt(9_999, 0.02, 20.0).is_err());
        assert!(derive_sigma_opt(20_000, 0.06, 20.0).is_err());
        assert!(derive_sigma_opt(20_000, 0.0, 20.0).is_err());
        assert!(derive_sigma_opt(20_000, 0.02, 19.0).is_err());
        assert!(derive_sigma_opt_windowed(20_000, 0.02, 20.0, 30.0).is_err());
    }

    #[test]
    fn report_records_its_inputs() {
        let r = report();
        assert_eq!(r.n_mc, 20_000);
        assert_eq!(r.grid_spacing, 0.02);
        assert_eq!(r.grid_limit, 20.0);
        assert_eq!(r.window_std, SIGMA_WINDOW_STD);
        assert_eq!(r.half_width, SPECTRUM_HALF_WIDTH);
    }
}
