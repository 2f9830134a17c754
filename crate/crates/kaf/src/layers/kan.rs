use crate::error::{Error, Result};
use crate::layers::bspline::{basis_count, bspline_basis_deriv, open_uniform_knots};
use crate::numerics::special::{silu, silu_grad};
use crate::numerics::{Matrix, RngState};

/// B-spline Kolmogorov-Arnold layer (baseline).
///
/// Each edge (p -> q) carries a learned univariate function
///
/// ```text
/// out_q = sum_p  w_h[q,p] * silu(x_p)  +  w_s[q,p] * sum_i coeffs[p,q,i] B_i(x_p)
/// ```
///
/// where `B_i` are degree-`k` B-splines on an open-uniform knot vector over
/// `grid_range` with `g` grid intervals (so `g + k` basis functions per edge).
/// Inputs outside the grid are clamped, giving constant extrapolation.
#[derive(Debug, Clone)]
pub struct KanLayer {
    pub d_in: usize,
    pub d_out: usize,
    /// Grid intervals per edge.
    pub g: usize,
    /// Spline degree.
    pub k: usize,
    pub grid_range: (f64, f64),
    /// Open-uniform knot vector shared by every edge (derived from g, k,
    /// grid_range; rebuilt on load rather than stored).
    pub knots: Vec<f64>,
    /// (d_in * d_out) x (g + k) spline coefficients; row `p * d_out + q`
    /// holds the coefficients of edge (p -> q). N(0, 0.01) at init.
    pub coeffs: Matrix,
    /// d_out x d_in residual-path weights, Xavier-uniform at init.
    pub w_h: Matrix,
    /// d_out x d_in spline-path weights, 1 at init.
    pub w_s: Matrix,
}

/// Intermediates of one forward pass, consumed by [`KanLayer::backward`].
#[derive(Debug, Clone)]
pub struct KanCache {
    dims: (usize, usize, usize, usize),
    n: usize,
    /// Input as given (pre-clamp); silu and its gradient are taken here.
    x: Matrix,
    /// n x (d_in * B) spline basis values, block p = B_0..B_{B-1}(x_p).
    basis: Matrix,
    /// n x (d_in * B) basis derivatives (zero where the input was clamped).
    basis_deriv: Matrix,
    /// n x (d_in * d_out) per-edge spline values sum_i coeffs B_i, laid out
    /// with column p * d_out + q.
    spline: Matrix,
}

/// Parameter gradients, shaped like the corresponding tensors.
#[derive(Debug, Clone)]
pub struct KanGrads {
    pub coeffs: Matrix,
    pub w_h: Matrix,
    pub w_s: Matrix,
}

impl KanLayer {
    pub const DEFAULT_GRID: usize = 5;
    pub const DEFAULT_DEGREE: usize = 3;
    pub const DEFAULT_RANGE: (f64, f64) = (-1.0, 1.0);

    /// Samples a fresh layer. Draw order: `w_h` row-major, then `coeffs`
    /// row-major (`w_s` starts at 1 and consumes no draws).
    pub fn init(
        d_in: usize,
        d_out: usize,
        g: usize,
        k: usize,
        grid_range: (f64, f64),
        rng: &mut RngState,
    ) -> Result<Self> {
        if d_in < 1 || d_out < 1 {
            return Err(Error::Param(format!(
                "layer dims must be >= 1, got d_in={d_in} d_out={d_out}"
            )));
        }
        let knots = open_uniform_knots(g, k, grid_range)?;
        let b = basis_count(&knots, k);
        let bound = (6.0 / (d_in + d_out) as f64).sqrt();
        let w_h_data = rng.sample_uniform(-bound, bound, d_out * d_in)?;
        let coeff_data = rng.sample_gaussian(0.0, 0.1, d_in * d_out * b)?;
        Ok(KanLayer {
            d_in,
            d_out,
            g,
            k,
            grid_range,
            knots,
            coeffs: Matrix::from_vec(d_in * d_out, b, coeff_data)?,
            w_h: Matrix::from_vec(d_out, d_in, w_h_data)?,
            w_s: Matrix::from_fn(d_out, d_in, |_, _| 1.0),
        })
    }

    /// Basis functions per edge (g + k for an open-uniform vector).
    pub fn basis_size(&self) -> usize {
        basis_count(&self.knots, self.k)
    }

    pub fn param_count(&self) -> usize {
        self.d_in * self.d_out * self.basis_size() + 2 * self.d_in * self.d_out
    }

    pub fn forward(&self, x: &Matrix) -> Result<(Matrix, KanCache)> {
        if x.cols() != self.d_in {
            return Err(Error::Shape {
                op: "kan_forward",
                left_rows: x.rows(),
                left_cols: x.cols(),
                right_rows: x.rows(),
                right_cols: self.d_in,
            });
        }
        let n = x.rows();
        let b = self.basis_size();
        let mut basis = Matrix::zeros(n, self.d_in * b);
        let mut basis_deriv = Matrix::zeros(n, self.d_in * b);
        for r in 0..n {
            for p in 0..self.d_in {
                let (vals, derivs) = bspline_basis_deriv(x.get(r, p), &self.knots, self.k);
                basis.row_mut(r)[p * b..(p + 1) * b].copy_from_slice(&vals);
                basis_deriv.row_mut(r)[p * b..(p + 1) * b].copy_from_slice(&derivs);
            }
        }
        // Per-edge spline values, then the two weighted paths.
        let mut spline = Matrix::zeros(n, self.d_in * self.d_out);
        let mut out = Matrix::zeros(n, self.d_out);
        for r in 0..n {
            for p in 0..self.d_in {
                let block = &basis.row(r)[p * b..(p + 1) * b];
                let x_rp = x.get(r, p);
                let s_hidden = silu(x_rp);
                for q in 0..self.d_out {
                    let edge = p * self.d_out + q;
                    let coeff = self.coeffs.row(edge);
                    let val: f64 = coeff.iter().zip(block).map(|(&c, &bv)| c * bv).sum();
                    spline.set(r, edge, val);
                    let acc = out.get(r, q)
                        + self.w_h.get(q, p) * s_hidden
                        + self.w_s.get(q, p) * val;
                    out.set(r, q, acc);
                }
            }
        }
        out.ensure_finite("kan_forward")?;
        let cache = KanCache {
            dims: (self.d_in, self.d_out, self.g, self.k),
            n,
            x: x.clone(),
            basis,
            basis_deriv,
            spline,
        };
        Ok((out, cache))
    }

    fn check_cache(&self, cache: &KanCache, d_out: &Matrix) -> Result<()> {
        if cache.dims != (self.d_in, self.d_out, self.g, self.k) {
            return Err(Error::Contract(format!(
                "cache built for layer dims {:?}, replayed against ({}, {}, {}, {})",
                cache.dims, self.d_in, self.d_out, self.g, self.k
            )));
        }
        if d_out.rows() != cache.n || d_out.cols() != self.d_out {
            return Err(Error::Contract(format!(
                "output gradient is {}x{}, cache expects {}x{}",
                d_out.rows(),
                d_out.cols(),
                cache.n,
                self.d_out
            )));
        }
        Ok(())
    }

    /// Analytical backward pass; returns parameter gradients (summed over the
    /// batch) and dL/dx.
    ///
    /// The spline-side gradients route through the contraction
    /// `T[edge, i] = sum_r dOut[r, q] * basis[r, p, i]`, which both
    /// `d coeffs` and (paired with `coeffs`) `d w_s` read, so nothing of size
    /// n x d_in x d_out beyond the cached spline values is materialized.
    pub fn backward(&self, cache: &KanCache, d_out: &Matrix) -> Result<(KanGrads, Matrix)> {
        self.check_cache(cache, d_out)?;
        let n = cache.n;
        let b = self.basis_size();

        let mut d_coeffs = Matrix::zeros(self.d_in * self.d_out, b);
        let mut d_w_h = Matrix::zeros(self.d_out, self.d_in);
        let mut d_w_s = Matrix::zeros(self.d_out, self.d_in);
        let mut dx = Matrix::zeros(n, self.d_in);

        // T[edge, i] accumulated per edge, folded immediately into the three
        // consumers to keep one pass over the batch.
        for r in 0..n {
            let g_row = d_out.row(r);
            for p in 0..self.d_in {
                let x_rp = cache.x.get(r, p);
                let sg = silu_grad(x_rp);
                let sh = silu(x_rp);
                let bblock = &cache.basis.row(r)[p * b..(p + 1) * b];
                let dblock = &cache.basis_deriv.row(r)[p * b..(p + 1) * b];
                let mut dxi = 0.0;
                for q in 0..self.d_out {
                    let g = g_row[q];
                    if g == 0.0 {
                        continue;
                    }
                    let edge = p * self.d_out + q;
                    let ws = self.w_s.get(q, p);
                    *d_w_h.get_mut(q, p) += g * sh;
                    *d_w_s.get_mut(q, p) += g * cache.spline.get(r, edge);
                    let coeff = self.coeffs.row(edge);
                    let dc = d_coeffs.row_mut(edge);
                    let gws = g * ws;
                    let mut spline_dx = 0.0;
                    for i in 0..b {
                        dc[i] += gws * bblock[i];
                        spline_dx += coeff[i] * dblock[i];
                    }
                    dxi += g * (self.w_h.get(q, p) * sg + ws * spline_dx);
                }
                dx.set(r, p, dxi);
            }
        }
        Ok((
            KanGrads {
                coeffs: d_coeffs,
                w_h: d_w_h,
                w_s: d_w_s,
            },
            dx,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn test_layer(seed: u64) -> KanLayer {
        let mut rng = RngState::new(seed);
        KanLayer::init(
            2,
            3,
            KanLayer::DEFAULT_GRID,
            KanLayer::DEFAULT_DEGREE,
            KanLayer::DEFAULT_RANGE,
            &mut rng,
        )
        .unwrap()
    }

    fn test_input(seed: u64, n: usize, d: usize, lo: f64, hi: f64) -> Matrix {
        let mut rng = RngState::new(seed ^ 0x5EED);
        Matrix::from_vec(n, d, rng.sample_uniform(lo, hi, n * d).unwrap()).unwrap()
    }

    #[test]
    fn defaults_give_eight_basis_functions() {
        let layer = test_layer(0);
        assert_eq!(layer.basis_size(), 8); // G + K = 5 + 3
        assert_eq!(layer.knots.len(), 12); // G + 2K + 1
        assert_eq!(layer.coeffs.rows(), 6);
        assert_eq!(layer.param_count(), 2 * 3 * 8 + 2 * 2 * 3);
    }

    #[test]
    fn init_statistics_match_design() {
        let mut rng = RngState::new(11);
        let layer = KanLayer::init(40, 40, 5, 3, (-1.0, 1.0), &mut rng).unwrap();
        assert!(layer.w_s.as_slice().iter().all(|&v| v == 1.0));
        let bound = (6.0f64 / 80.0).sqrt();
        assert!(layer.w_h.as_slice().iter().all(|&v| v.abs() <= bound));
        let c = layer.coeffs.as_slice();
        let mean = c.iter().sum::<f64>() / c.len() as f64;
        let std = (c.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / c.len() as f64).sqrt();
        assert!((std - 0.1).abs() < 0.005, "coeff std = {std}");
    }

    /// With w_h = 0 and w_s = 1, a single edge reproduces its spline; fitting
    /// the identity on the grid by least squares must then match f(x) = x to
    /// interpolation accuracy inside the grid.
    #[test]
    fn spline_edge_reproduces_least_squares_interpolant() {
        let mut rng = RngState::new(5);
        let mut layer = KanLayer::init(1, 1, 5, 3, (-1.0, 1.0), &mut rng).unwrap();
        for v in layer.w_h.as_mut_slice() {
            *v = 0.0;
        }
        let b = layer.basis_size();
        // Normal equations for coeffs: min || A c - y ||, A[j,i] = B_i(x_j).
        let m = 41;
        let xs: Vec<f64> = (0..m).map(|j| -1.0 + 2.0 * j as f64 / (m - 1) as f64).collect();
        let mut a = Matrix::zeros(m, b);
        let mut y = Matrix::zeros(m, 1);
        for (j, &xj) in xs.iter().enumerate() {
            let (vals, _) = bspline_basis_deriv(xj, &layer.knots, layer.k);
            a.row_mut(j).copy_from_slice(&vals);
            y.set(j, 0, xj);
        }
        let ata = a.matmul_tn(&a).unwrap();
        let aty = a.matmul_tn(&y).unwrap();
        let c = solve_spd(&ata, &aty);
        layer.coeffs.row_mut(0).copy_from_slice(&c);

        // Degree-3 splines represent x exactly, so the LS fit is exact.
        let x = test_input(5, 200, 1, -1.0, 1.0);
        let (out, _) = layer.forward(&x).unwrap();
        for r in 0..200 {
            assert!(
                (out.get(r, 0) - x.get(r, 0)).abs() <= 1e-6,
                "x = {}, got {}",
                x.get(r, 0),
                out.get(r, 0)
            );
        }
    }

    /// Dense Cholesky solve for the small SPD systems in tests.
    fn solve_spd(a: &Matrix, b: &Matrix) -> Vec<f64> {
        let n = a.rows();
        let mut l = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let mut s = a.get(i, j);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                if i == j {
                    l[i * n + i] = s.sqrt();
                } else {
                    l[i * n + j] = s / l[j * n + j];
                }
            }
        }
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut s = b.get(i, 0);
            for k in 0..i {
                s -= l[i * n + k] * y[k];
            }
            y[i] = s / l[i * n + i];
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..n {
                s -= l[k * n + i] * x[k];
            }
            x[i] = s / l[i * n + i];
        }
        x
    }

    /// Independent scalar oracle for the forward map.
    fn forward_oracle(layer: &KanLayer, x: &Matrix) -> Matrix {
        let b = layer.basis_size();
        Matrix::from_fn(x.rows(), layer.d_out, |r, q| {
            let mut acc = 0.0;
            for p in 0..layer.d_in {
                let xp = x.get(r, p);
                let (vals, _) = bspline_basis_deriv(xp, &layer.knots, layer.k);
                let mut spline = 0.0;
                for i in 0..b {
                    spline += layer.coeffs.get(p * layer.d_out + q, i) * vals[i];
                }
                acc += layer.w_h.get(q, p) * silu(xp) + layer.w_s.get(q, p) * spline;
            }
            acc
        })
    }

    #[test]
    fn forward_matches_scalar_oracle() {
        for seed in 0..4u64 {
            let layer = test_layer(seed);
            let x = test_input(seed, 11, 2, -1.3, 1.3); // includes out-of-grid points
            let (out, _) = layer.forward(&x).unwrap();
            assert!(out.max_abs_diff(&forward_oracle(&layer, &x)) < 1e-12, "seed {seed}");
        }
    }

    #[test]
    fn out_of_grid_inputs_extrapolate_constantly_on_spline_path() {
        let mut layer = test_layer(3);
        for v in layer.w_h.as_mut_slice() {
            *v = 0.0; // isolate the spline path
        }
        let edge_hi = Matrix::from_vec(1, 2, vec![1.0, 1.0]).unwrap();
        let beyond_hi = Matrix::from_vec(1, 2, vec![2.5, 7.0]).unwrap();
        let (a, _) = layer.forward(&edge_hi).unwrap();
        let (b, _) = layer.forward(&beyond_hi).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-12);
        // And the spline contributes zero input-gradient out there.
        let (_, cache) = layer.forward(&beyond_hi).unwrap();
        let probe = Matrix::from_fn(1, 3, |_, q| 1.0 + q as f64);
        let (_, dx) = layer.backward(&cache, &probe).unwrap();
        assert!(dx.as_slice().iter().all(|&v| v.abs() < 1e-12));
    }

    #[test]
    fn stale_cache_is_rejected() {
        let layer = test_layer(0);
        let other = {
            let mut rng = RngState::new(1);
            KanLayer::init(2, 3, 4, 3, (-1.0, 1.0), &mut rng).unwrap()
        };
        let x = test_input(0, 5, 2, -1.0, 1.0);
        let (_, cache) = layer.forward(&x).unwrap();
        assert!(matches!(
            other.backward(&cache, &Matrix::zeros(5, 3)),
            Err(Error::Contract(_))
        ));
        assert!(matches!(
            layer.backward(&cache, &Matrix::zeros(6, 3)),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn backward_matches_finite_difference() {
        for seed in 0..4u64 {
            let layer = test_layer(seed);
            // Keep FD points strictly inside the grid: the clamp kink at the
            // boundary breaks differentiability there by design.
            let x = test_input(seed, 5, 2, -0.95, 0.95);
            let mut rng = RngState::new(seed + 900);
            let probe =
                Matrix::from_vec(5, 3, rng.sample_uniform(-1.0, 1.0, 15).unwrap()).unwrap();
            let loss = |layer: &KanLayer, x: &Matrix| -> f64 {
                let (out, _) = layer.forward(x).unwrap();
                out.as_slice().iter().zip(probe.as_slice()).map(|(&a, &b)| a * b).sum()
            };
            let (_, cache) = layer.forward(&x).unwrap();
            let (grads, dx) = layer.backward(&cache, &probe).unwrap();

            let h = 1e-5;
            let rel = |a: f64, f: f64| (a - f).abs() / a.abs().max(f.abs()).max(1e-4);

            for (tensor, grad) in [
                (0usize, &grads.coeffs),
                (1, &grads.w_h),
                (2, &grads.w_s),
            ] {
                for idx in 0..grad.rows() * grad.cols() {
                    let bump = |layer: &KanLayer, delta: f64| -> KanLayer {
                        let mut l = layer.clone();
                        match tensor {
                            0 => l.coeffs.as_mut_slice()[idx] += delta,
                            1 => l.w_h.as_mut_slice()[idx] += delta,
                            _ => l.w_s.as_mut_slice()[idx] += delta,
                        }
                        l
                    };
                    let fd = (loss(&bump(&layer, h), &x) - loss(&bump(&layer, -h), &x)) / (2.0 * h);
                    let analytic = grad.as_slice()[idx];
                    assert!(
                        rel(analytic, fd) < 1e-4,
                        "seed {seed} tensor {tensor} idx {idx}: {analytic} vs {fd}"
                    );
                }
            }
            for r in 0..x.rows() {
                for p in 0..x.cols() {
                    let mut plus = x.clone();
                    plus.set(r, p, x.get(r, p) + h);
                    let mut minus = x.clone();
                    minus.set(r, p, x.get(r, p) - h);
                    let fd = (loss(&layer, &plus) - loss(&layer, &minus)) / (2.0 * h);
                    assert!(
                        rel(dx.get(r, p), fd) < 1e-4,
                        "seed {seed} input ({r},{p}): {} vs {fd}",
                        dx.get(r, p)
                    );
                }
            }
        }
    }
}
