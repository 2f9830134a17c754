//! Optimization: losses, metrics, Adam, and the training loop.

pub mod adam;
pub mod fit;
pub mod loss;

pub use adam::AdamState;
pub use fit::{evaluate, fit, EpochRecord, RunReport, TrainConfig};
pub use loss::{cross_entropy_loss, mse_loss, Loss, Metric};
