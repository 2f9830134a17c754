//! Layer implementations and network plumbing.
//!
//! Three interchangeable layer families — the Fourier-feature
//! Kolmogorov-Arnold layer ([`KafLayer`]), a B-spline Kolmogorov-Arnold
//! baseline ([`KanLayer`]), and a dense baseline ([`MlpLayer`]) — compose
//! into a [`Network`] that exposes forward/backward passes and a canonical
//! parameter/gradient slice order for the optimizer.

pub mod bspline;
pub mod kaf;
pub mod kan;
pub mod mlp;
pub mod network;
pub mod norm;

pub use kaf::{KafCache, KafGrads, KafLayer, SIGMA_F_DEFAULT};
pub use kan::{KanCache, KanGrads, KanLayer};
pub use mlp::{MlpActivation, MlpCache, MlpGrads, MlpLayer};
pub use network::{finite_difference_max_rel_error, Layer, LayerCache, LayerGrads, Network};
