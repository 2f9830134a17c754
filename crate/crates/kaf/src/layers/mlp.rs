use crate::error::{Error, Result};
use crate::numerics::special::{gelu, gelu_grad};
use crate::numerics::{Matrix, RngState};

/// Activation applied after the affine map of an [`MlpLayer`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MlpActivation {
    /// No activation (typical for output layers).
    Identity,
    Relu,
    Gelu,
}

impl MlpActivation {
    fn apply(self, z: f64) -> f64 {
        match self {
            MlpActivation::Identity => z,
            MlpActivation::Relu => z.max(0.0),
            MlpActivation::Gelu => gelu(z),
        }
    }

    /// Derivative at `z`; ReLU uses the subgradient 0 at the kink.
    fn grad(self, z: f64) -> f64 {
        match self {
            MlpActivation::Identity => 1.0,
            MlpActivation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            MlpActivation::Gelu => gelu_grad(z),
        }
    }
}

/// Dense layer `h = act(W x + bias)` with Xavier-uniform init.
#[derive(Debug, Clone)]
pub struct MlpLayer {
    pub d_in: usize,
    pub d_out: usize,
    pub activation: MlpActivation,
    /// d_out x d_in weights.
    pub w: Matrix,
    pub bias: Vec<f64>,
}

/// Intermediates of one forward pass, consumed by [`MlpLayer::backward`].
#[derive(Debug, Clone)]
pub struct MlpCache {
    dims: (usize, usize),
    n: usize,
    x: Matrix,
    /// Pre-activation values.
    z: Matrix,
}

#[derive(Debug, Clone)]
pub struct MlpGrads {
    pub w: Matrix,
    pub bias: Vec<f64>,
}

impl MlpLayer {
    pub fn init(
        d_in: usize,
        d_out: usize,
        activation: MlpActivation,
        rng: &mut RngState,
    ) -> Result<Self> {
        if d_in < 1 || d_out < 1 {
            return Err(Error::Param(format!(
                "layer dims must be >= 1, got d_in={d_in} d_out={d_out}"
            )));
        }
        let bound = (6.0 / (d_in + d_out) as f64).sqrt();
        let w_data = rng.sample_uniform(-bound, bound, d_out * d_in)?;
        Ok(MlpLayer {
            d_in,
            d_out,
            activation,
            w: Matrix::from_vec(d_out, d_in, w_data)?,
            bias: vec![0.0; d_out],
        })
    }

    pub fn param_count(&self) -> usize {
        self.d_in * self.d_out + self.d_out
    }

    pub fn forward(&self, x: &Matrix) -> Result<(Matrix, MlpCache)> {
        if x.cols() != self.d_in {
            return Err(Error::Shape {
                op: "mlp_forward",
                left_rows: x.rows(),
                left_cols: x.cols(),
                right_rows: x.rows(),
                right_cols: self.d_in,
            });
        }
        let mut z = x.matmul_nt(&self.w)?;
        z.add_row_broadcast(&self.bias)?;
        let h = z.map(|v| self.activation.apply(v))?;
        let cache = MlpCache {
            dims: (self.d_in, self.d_out),
            n: x.rows(),
            x: x.clone(),
            z,
        };
        Ok((h, cache))
    }

    pub fn backward(&self, cache: &MlpCache, d_h: &Matrix) -> Result<(MlpGrads, Matrix)> {
        if cache.dims != (self.d_in, self.d_out) {
            return Err(Error::Contract(format!(
                "cache built for layer dims {:?}, replayed against ({}, {})",
                cache.dims, self.d_in, self.d_out
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
        let dz = Matrix::from_fn(cache.n, self.d_out, |r, q| {
            d_h.get(r, q) * self.activation.grad(cache.z.get(r, q))
        });
        let d_w = dz.matmul_tn(&cache.x)?;
        let d_bias = dz.col_sums();
        let dx = dz.matmul(&self.w)?;
        Ok((MlpGrads { w: d_w, bias: d_bias }, dx))
    }
}
