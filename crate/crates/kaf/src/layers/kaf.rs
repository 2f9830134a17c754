use crate::error::{Error, Result};
use crate::layers::norm::{layernorm_backward, layernorm_forward, LayerNormCache};
use crate::numerics::special::{gelu, normal_cdf, normal_pdf};
use crate::numerics::{Matrix, RngState};
use std::f64::consts::TAU;

/// Initial value of the Fourier-path scales `b`.
pub const SCALE_B_INIT: f64 = 1e-2;
/// Standard deviation of the Fourier-mixing matrix `V` at init (variance 0.01).
pub const V_INIT_STD: f64 = 0.1;
/// Default frequency standard deviation; see `analysis::derive_sigma_opt`
/// for where this number comes from.
pub const SIGMA_F_DEFAULT: f64 = 1.64;

/// Fourier-feature Kolmogorov-Arnold layer.
///
/// Forward map for one input row `x`:
///
/// ```text
/// x_hat  = layernorm(x)                  (identity unless use_layernorm)
/// psi_i  = sqrt(1/M) [cos(w_freq[i,m] x_hat_i + theta_m) ; sin(...)]  in R^{2M}
/// phi_i  = V[i,:] . psi_i
/// u_i    = a_i * GELU(x_hat_i) + b_i * phi_i
/// h      = W_out u + c
/// ```
///
/// Frequencies are private per input dimension (row `i` of `w_freq`), phases
/// `theta` are shared across dimensions, and each `psi_i(x)` has unit
/// self-inner-product by construction. All gradients, including those of
/// `w_freq` and `theta`, are analytical.
///
/// Ablation switches: `disable_gelu_path` / `disable_rff_path` zero the
/// corresponding path (at most one may be set); `disable_scales` freezes
/// `a = b = 1` as untrained constants.
#[derive(Debug, Clone)]
pub struct KafLayer {
    pub d_in: usize,
    pub d_out: usize,
    /// Number of frequencies per input dimension (the basis has 2M entries).
    pub m: usize,
    pub sigma_f: f64,
    pub use_layernorm: bool,
    pub disable_gelu_path: bool,
    pub disable_rff_path: bool,
    pub disable_scales: bool,
    /// d_in x M frequency matrix, N(0, sigma_f^2) at init.
    pub w_freq: Matrix,
    /// M shared phases, U[0, 2pi) at init.
    pub theta: Vec<f64>,
    /// d_in x 2M Fourier mixing matrix, N(0, 0.01) at init.
    pub v: Matrix,
    /// GELU-path scales, 1 at init.
    pub a: Vec<f64>,
    /// Fourier-path scales, 1e-2 at init.
    pub b: Vec<f64>,
    /// d_out x d_in output projection, Xavier-uniform at init.
    pub w_out: Matrix,
    /// Output bias, 0 at init.
    pub c: Vec<f64>,
}

/// Intermediates of one forward pass, consumed by [`KafLayer::backward`].
#[derive(Debug, Clone)]
pub struct KafCache {
    dims: (usize, usize, usize),
    n: usize,
    ln: Option<LayerNormCache>,
    /// Post-normalization input (a copy of the input when layernorm is off).
    x_hat: Matrix,
    /// n x (d_in * 2M) basis values, block i = [cos.. ; sin..] * sqrt(1/M).
    basis: Matrix,
    /// n x d_in per-dimension Fourier sums phi.
    phi: Matrix,
    /// n x d_in GELU values (zeros when the path is disabled).
    gelu_vals: Matrix,
    /// n x d_in standard normal CDF of x_hat (for the GELU derivative).
    cdf_vals: Matrix,
    /// n x d_in combined pre-projection activations.
    u: Matrix,
}

/// Parameter gradients, shaped exactly like the corresponding tensors.
#[derive(Debug, Clone)]
pub struct KafGrads {
    pub w_freq: Matrix,
    pub theta: Vec<f64>,
    pub v: Matrix,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub w_out: Matrix,
    pub c: Vec<f64>,
}

impl KafGrads {
    /// Clips the frequency gradient to Frobenius norm `tau` (no-op when the
    /// norm is already within bounds). Applied by the training loop only when
    /// a clip threshold is configured.
    pub fn clip_w_freq(&mut self, tau: f64) {
        let norm = self.w_freq.frobenius_norm();
        if norm > tau && norm > 0.0 {
            let s = tau / norm;
            for v in self.w_freq.as_mut_slice() {
                *v *= s;
            }
        }
    }
}

impl KafLayer {
    /// Samples a fresh layer. Draw order (fixed for reproducibility):
    /// `w_freq` row-major, `theta`, `v` row-major, `w_out` row-major.
    pub fn init(
        d_in: usize,
        d_out: usize,
        m: usize,
        sigma_f: f64,
        rng: &mut RngState,
    ) -> Result<Self> {
        if d_in < 1 || d_out < 1 || m < 1 {
            return Err(Error::Param(format!(
                "layer dims must be >= 1, got d_in={d_in} d_out={d_out} m={m}"
            )));
        }
        if !(sigma_f > 0.0) {
            return Err(Error::Param(format!("sigma_f must be > 0, got {sigma_f}")));
        }
        let w_freq_data = rng.sample_gaussian(0.0, sigma_f, d_in * m)?;
        let theta = rng.sample_uniform(0.0, TAU, m)?;
        let v_data = rng.sample_gaussian(0.0, V_INIT_STD, d_in * 2 * m)?;
        let bound = (6.0 / (d_in + d_out) as f64).sqrt();
        let w_out_data = rng.sample_uniform(-bound, bound, d_out * d_in)?;
        Ok(KafLayer {
            d_in,
            d_out,
            m,
            sigma_f,
            use_layernorm: false,
            disable_gelu_path: false,
            disable_rff_path: false,
            disable_scales: false,
            w_freq: Matrix::from_vec(d_in, m, w_freq_data)?,
            theta,
            v: Matrix::from_vec(d_in, 2 * m, v_data)?,
            a: vec![1.0; d_in],
            b: vec![SCALE_B_INIT; d_in],
            w_out: Matrix::from_vec(d_out, d_in, w_out_data)?,
            c: vec![0.0; d_out],
        })
    }

    pub fn param_count(&self) -> usize {
        self.d_in * self.m
            + self.m
            + self.d_in * 2 * self.m
            + 2 * self.d_in
            + self.d_out * self.d_in
            + self.d_out
    }

    fn validate_flags(&self) -> Result<()> {
        if self.disable_gelu_path && self.disable_rff_path {
            return Err(Error::Param(
                "at most one of disable_gelu_path / disable_rff_path may be set".into(),
            ));
        }
        Ok(())
    }

    /// Per-dimension coefficient applied to the GELU path.
    fn gelu_coeff(&self, i: usize) -> f64 {
        if self.disable_gelu_path {
            0.0
        } else if self.disable_scales {
            1.0
        } else {
            self.a[i]
        }
    }

    /// Per-dimension coefficient applied to the Fourier path.
    fn rff_coeff(&self, i: usize) -> f64 {
        if self.disable_rff_path {
            0.0
        } else if self.disable_scales {
            1.0
        } else {
            self.b[i]
        }
    }

    /// Fourier features for (already normalized) inputs: an
    /// `n x (d_in * 2M)` matrix whose block `i` holds
    /// `sqrt(1/M) * [cos(w_freq[i,m] x_i + theta_m); sin(...)]`.
    pub fn basis(&self, x_hat: &Matrix) -> Result<Matrix> {
        if x_hat.cols() != self.d_in {
            return Err(Error::Shape {
                op: "kaf_basis",
                left_rows: x_hat.rows(),
                left_cols: x_hat.cols(),
                right_rows: x_hat.rows(),
                right_cols: self.d_in,
            });
        }
        let n = x_hat.rows();
        let m = self.m;
        let norm = (1.0 / m as f64).sqrt();
        let mut out = Matrix::zeros(n, self.d_in * 2 * m);
        for r in 0..n {
            let xrow = x_hat.row(r);
            let orow = out.row_mut(r);
            for i in 0..self.d_in
            {
                let xi = xrow[i];
                let wrow = self.w_freq.row(i);
                let block = &mut orow[i * 2 * m..(i + 1) * 2 * m];
                let (cos_half, sin_half) = block.split_at_mut(m);
                for k in 0..m {
                    let (s, c) = (wrow[k] * xi + self.theta[k]).sin_cos();
                    cos_half[k] = norm * c;
                    sin_half[k] = norm * s;
                }
            }
        }
        Ok(out)
    }

    /// Full forward pass; returns outputs and the cache for `backward`.
    pub fn forward(&self, x: &Matrix) -> Result<(Matrix, KafCache)> {
        self.validate_flags()?;
        if x.cols() != self.d_in {
            return Err(Error::Shape {
                op: "kaf_forward",
                left_rows: x.rows(),
                left_cols: x.cols(),
                right_rows: x.rows(),
                right_cols: self.d_in,
            });
        }
        let n = x.rows();
        let (ln, x_hat) = if self.use_layernorm {
            let cache = layernorm_forward(x);
            let xh = cache.x_hat.clone();
            (Some(cache), xh)
        } else {
            (None, x.clone())
        };
        let basis = self.basis(&x_hat)?;
        let two_m = 2 * self.m;

        let mut phi = Matrix::zeros(n, self.d_in);
        let mut gelu_vals = Matrix::zeros(n, self.d_in);
        let mut cdf_vals = Matrix::zeros(n, self.d_in);
        let mut u = Matrix::zeros(n, self.d_in);
        for r in 0..n {
            for i in 0..self.d_in {
                let vrow = self.v.row(i);
                let block = &basis.row(r)[i * two_m..(i + 1) * two_m];
                let p: f64 = vrow.iter().zip(block).map(|(&a, &b)| a * b).sum();
                phi.set(r, i, p);
                let mut ui = self.rff_coeff(i) * p;
                if !self.disable_gelu_path {
                    let xi = x_hat.get(r, i);
                    let cdf = normal_cdf(xi);
                    let g = xi * cdf;
                    cdf_vals.set(r, i, cdf);
                    gelu_vals.set(r, i, g);
                    ui += self.gelu_coeff(i) * g;
                }
                u.set(r, i, ui);
            }
        }
        let mut h = u.matmul_nt(&self.w_out)?;
        h.add_row_broadcast(&self.c)?;
        h.ensure_finite("kaf_forward")?;
        let cache = KafCache {
            dims: (self.d_in, self.d_out, self.m),
            n,
            ln,
            x_hat,
            basis,
            phi,
            gelu_vals,
            cdf_vals,
            u,
        };
        Ok((h, cache))
    }

    fn check_cache(&self, cache: &KafCache, d_h: &Matrix) -> Result<()> {
        if cache.dims != (self.d_in, self.d_out, self.m) {
            return Err(Error::Contract(format!(
                "cache built for layer dims {:?}, replayed against ({}, {}, {})",
                cache.dims, self.d_in, self.d_out, self.m
            )));
        }
        if d_h.rows() != cache.n || d_h.cols() != self.d_out {
            return Err(Error::Contract(format!(
                "output gradient is {}x{}, cache expects {}x{}",
                d_h.rows(),
                d_h.cols(),
                cache.n,
                self.d_out
            )));
        }
        Ok(())
    }

    /// Analytical backward pass. `d_h` is dL/dh for the cached batch; returns
    /// parameter gradients (summed over the batch) and dL/dx.
    ///
    /// The frequency/phase gradients reuse the cached basis values: with
    /// stored `C = sqrt(1/M) cos(wx+t)` and `S = sqrt(1/M) sin(wx+t)`,
    /// `dC/dw = -x S`, `dS/dw = x C`, `dC/dt = -S`, `dS/dt = C`.
    pub fn backward(&self, cache: &KafCache, d_h: &Matrix) -> Result<(KafGrads, Matrix)> {
        self.validate_flags()?;
        self.check_cache(cache, d_h)?;
        let n = cache.n;
        let two_m = 2 * self.m;

        let d_w_out = d_h.matmul_tn(&cache.u)?; // (n x d_out)^T (n x d_in)
        let d_c = d_h.col_sums();
        let du = d_h.matmul(&self.w_out)?; // n x d_in

        let mut d_w_freq = Matrix::zeros(self.d_in, self.m);
        let mut d_theta = vec![0.0; self.m];
        let mut d_v = Matrix::zeros(self.d_in, two_m);
        let mut d_a = vec![0.0; self.d_in];
        let mut d_b = vec![0.0; self.d_in];
        let mut dx_hat = Matrix::zeros(n, self.d_in);

        let train_scales = !self.disable_scales;
        for r in 0..n {
            for i in 0..self.d_in {
                let g_u = du.get(r, i);
                let mut dxi = 0.0;
                if !self.disable_gelu_path {
                    let xi = cache.x_hat.get(r, i);
                    let gv = cache.gelu_vals.get(r, i);
                    if train_scales {
                        d_a[i] += g_u * gv;
                    }
                    // gelu'(x) = Phi(x) + x phi(x), with Phi cached.
                    let gprime = cache.cdf_vals.get(r, i) + xi * normal_pdf(xi);
                    dxi += g_u * self.gelu_coeff(i) * gprime;
                }
                if !self.disable_rff_path {
                    if train_scales {
                        d_b[i] += g_u * cache.phi.get(r, i);
                    }
                    let d_phi = g_u * self.rff_coeff(i);
                    let block = &cache.basis.row(r)[i * two_m..(i + 1) * two_m];
                    let (cos_half, sin_half) = block.split_at(self.m);
                    let vrow = self.v.row(i);
                    let (v_cos, v_sin) = vrow.split_at(self.m);
                    let dv_row = d_v.row_mut(i);
                    let (dv_cos, dv_sin) = dv_row.split_at_mut(self.m);
                    let xi = cache.x_hat.get(r, i);
                    let wrow = self.w_freq.row(i);
                    let dw_row = d_w_freq.row_mut(i);
                    for k in 0..self.m {
                        let c = cos_half[k];
                        let s = sin_half[k];
                        dv_cos[k] += d_phi * c;
                        dv_sin[k] += d_phi * s;
                        let d_cos = d_phi * v_cos[k];
                        let d_sin = d_phi * v_sin[k];
                        // Common factor of d/d(arg): -d_cos*S + d_sin*C.
                        let d_arg = d_sin * c - d_cos * s;
                        d_theta[k] += d_arg;
                        dw_row[k] += d_arg * xi;
                        dxi += d_arg * wrow[k];
                    }
                }
                dx_hat.set(r, i, dxi);
            }
        }

        let dx = match &cache.ln {
            Some(ln) => layernorm_backward(ln, &dx_hat),
            None => dx_hat,
        };
        let grads = KafGrads {
            w_freq: d_w_freq,
            theta: d_theta,
            v: d_v,
            a: d_a,
            b: d_b,
            w_out: d_w_out,
            c: d_c,
        };
        Ok((grads, dx))
    }

    /// Folds the trained layer into two inference matrices:
    /// `W_gelu = W_out diag(a)` applied to `GELU(x_hat)`, and
    /// `W_fourier = W_out diag(b) blockdiag(V rows)` applied to the stacked
    /// basis vector. Ablation switches are folded in via the effective
    /// per-path coefficients.
    pub fn fold_inference(&self) -> (Matrix, Matrix, Vec<f64>) {
        let two_m = 2 * self.m;
        let w_gelu = Matrix::from_fn(self.d_out, self.d_in, |q, i| {
            self.w_out.get(q, i) * self.gelu_coeff(i)
        });
        let w_fourier = Matrix::from_fn(self.d_out, self.d_in * two_m, |q, col| {
            let i = col / two_m;
            let k = col % two_m;
            self.w_out.get(q, i) * self.rff_coeff(i) * self.v.get(i, k)
        });
        (w_gelu, w_fourier, self.c.clone())
    }

    /// Runs the folded inference path (used to verify fold equivalence).
    pub fn folded_forward(&self, x: &Matrix) -> Result<Matrix> {
        let x_hat = if self.use_layernorm {
            layernorm_forward(x).x_hat
        } else {
            x.clone()
        };
        let (w_gelu, w_fourier, c) = self.fold_inference();
        let basis = self.basis(&x_hat)?;
        let g = if self.disable_gelu_path {
            Matrix::zeros(x_hat.rows(), x_hat.cols())
        } else {
            x_hat.map(gelu)?
        };
        let mut h = g.matmul_nt(&w_gelu)?.add(&basis.matmul_nt(&w_fourier)?)?;
        h.add_row_broadcast(&c)?;
        Ok(h)
    }
}
