//! Verification toolbox: parameter/FLOP accounting, empirical kernel checks,
//! spectral derivation of the frequency-initialization scale, and DFT
//! comparison of model output against targets.

mod counts;
mod kernel;
mod sigma;
mod spectrum;

pub use counts::{count_flops, count_params, params_actual, params_formula, CountReport, LayerDims, ModelFamily};
pub use kernel::{kernel_approx_check, KernelCheckReport};
pub use sigma::{
    derive_sigma_opt, derive_sigma_opt_windowed, gelu_spectral_density, SigmaOptReport,
    SIGMA_WINDOW_STD, SPECTRUM_HALF_WIDTH,
};
pub use spectrum::{spectrum_compare, SpectrumCompare};
