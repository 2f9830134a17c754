//! Deterministic numeric foundations: dense matrices, a counter-based PRNG,
//! special functions, and a naive DFT. Everything is `f64` and produces
//! bit-identical results for identical seeds and call order.

pub mod dft;
pub mod matrix;
pub mod rng;
pub mod special;

pub use dft::{dft_magnitude, Spectrum};
pub use matrix::Matrix;
pub use rng::RngState;
pub use special::{
    bessel_j0, erf_approx, gauss_legendre, gelu, gelu_grad, normal_cdf, normal_pdf, sigmoid,
    silu, silu_grad,
};
