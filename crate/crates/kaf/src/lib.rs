//! Kolmogorov-Arnold networks with trainable random Fourier features.
//!
//! The layer at the center of this crate combines a GELU path with a
//! per-dimension Fourier-feature path, both gated by learned scales, followed
//! by a linear projection. Gradients for every parameter (including the
//! Fourier frequencies and phases) are analytical. B-spline
//! Kolmogorov-Arnold layers and plain MLPs are included as baselines, along
//! with a small training loop, benchmark tasks, and analysis tools for
//! kernel quality, parameter/FLOP accounting, spectral comparison, and the
//! frequency-initialization derivation.
//!
//! The primary interface is the runnable examples:
//!
//! ```text
//! cargo run --release -p kaf --example fit_sincos          # Fourier net vs MLPs on sin/cos
//! cargo run --release -p kaf --example kernel_check        # RFF kernel approximation error
//! cargo run --release -p kaf --example sigma_opt           # spectral derivation of sigma ~ 1.64
//! cargo run --release -p kaf --example param_counts        # parameter/FLOP accounting
//! cargo run --release -p kaf --example spectrum_analysis   # predicted vs true spectra
//! cargo run --release -p kaf --example function_benchmark  # function-approximation suite
//! cargo run --release -p kaf --example ablation            # path/scale/sigma ablations
//! cargo run --release -p kaf --example poisson_pde         # collocation Poisson solve
//! cargo run --release -p kaf --example gradient_check      # analytic vs finite-difference grads
//! ```
//!
//! The same capabilities are exposed by the thin `kaf` binary
//! (`fit`, `kernel-check`, `sigma-opt`, `params`, `spectrum`, `ablate`).
//!
//! # Library quick start
//!
//! ```
//! use kaf::prelude::*;
//!
//! let mut rng = RngState::new(7);
//! let layer = KafLayer::init(2, 4, 8, 1.64, &mut rng).unwrap();
//! let x = Matrix::from_vec(3, 2, vec![0.1, -0.4, 0.0, 0.9, -1.2, 0.3]).unwrap();
//! let (y, _cache) = layer.forward(&x).unwrap();
//! assert_eq!(y.shape(), (3, 4));
//! ```

pub mod analysis;
pub mod benchdata;
pub mod cli;
pub mod error;
pub mod layers;
pub mod numerics;
pub mod training;

pub use error::{Error, Result};

/// Common imports for working with the crate.
pub mod prelude {
    pub use crate::analysis::{
        count_flops, count_params, derive_sigma_opt, kernel_approx_check, spectrum_compare,
        CountReport, KernelCheckReport, LayerDims, ModelFamily, SigmaOptReport, SpectrumCompare,
    };
    pub use crate::benchdata::{
        make_function_dataset, make_sincos_dataset, BenchmarkFn, Dataset, PdeTask, Split,
        TaskKind,
    };
    pub use crate::cli::{load_checkpoint, save_checkpoint, Checkpoint, ModelKind, RunConfig};
    pub use crate::error::{Error, Result};
    pub use crate::layers::{KafLayer, KanLayer, Layer, MlpActivation, MlpLayer, Network};
    pub use crate::numerics::{dft_magnitude, Matrix, RngState, Spectrum};
    pub use crate::training::{evaluate, fit, AdamState, Loss, Metric, RunReport, TrainConfig};
}
