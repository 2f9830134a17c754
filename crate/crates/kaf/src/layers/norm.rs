use crate::numerics::Matrix;

pub const LAYERNORM_EPS: f64 = 1e-5;

/// Per-row layer normalization without an affine transform:
/// `x_hat = (x - mean) / sqrt(var + 1e-5)` with population variance.
#[derive(Debug, Clone)]
pub struct LayerNormCache {
    /// Normalized values.
    pub x_hat: Matrix,
    /// 1 / sqrt(var + eps) per row.
    pub inv_std: Vec<f64>,
}

pub fn layernorm_forward(x: &Matrix) -> LayerNormCache {
    let (n, d) = x.shape();
    let mut x_hat = Matrix::zeros(n, d);
    let mut inv_std = Vec::with_capacity(n);
    for i in 0..n {
        let row = x.row(i);
        let mean = row.iter().sum::<f64>() / d as f64;
        let var = row.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / d as f64;
        let s = 1.0 / (var + LAYERNORM_EPS).sqrt();
        inv_std.push(s);
        for (o, &v) in x_hat.row_mut(i).iter_mut().zip(row) {
            *o = (v - mean) * s;
        }
    }
    LayerNormCache { x_hat, inv_std }
}

/// Backward pass for the affine-free layer norm:
/// `dx = inv_std * (dxh - mean(dxh) - x_hat * mean(dxh .* x_hat))`.
pub fn layernorm_backward(cache: &LayerNormCache, d_xhat: &Matrix) -> Matrix {
    let (n, d) = d_xhat.shape();
    let mut dx = Matrix::zeros(n, d);
    for i in 0..n {
        let g = d_xhat.row(i);
        let xh = cache.x_hat.row(i);
        let mean_g = g.iter().sum::<f64>() / d as f64;
        let mean_gx = g.iter().zip(xh).map(|(&a, &b)| a * b).sum::<f64>() / d as f64;
        let s = cache.inv_std[i];
        for j in 0..d {
            dx.set(i, j, s * (g[j] - mean_g - xh[j] * mean_gx));
        }
    }
    dx
}
