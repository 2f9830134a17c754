use crate::error::{Error, Result};
use crate::layers::Network;
use crate::numerics::{Matrix, RngState};
use crate::training::adam::AdamState;
use crate::training::loss::{Loss, Metric};
use std::time::Instant;

/// Knobs of one training run.
#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub epochs: usize,
    /// Rows per minibatch; 0 trains full-batch.
    pub batch_size: usize,
    pub lr: f64,
    /// Seeds the epoch shuffles (model init is seeded separately).
    pub seed: u64,
    pub loss: Loss,
    pub metric: Metric,
    /// Frobenius-norm clip for KAF frequency gradients, if set.
    pub clip_tau: Option<f64>,
    pub shuffle: bool,
    /// Evaluate every k-th epoch (the final epoch is always evaluated).
    pub eval_every: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 100,
            batch_size: 0,
            lr: 1e-3,
            seed: 0,
            loss: Loss::Mse,
            metric: Metric::Rmse,
            clip_tau: None,
            shuffle: true,
            eval_every: 1,
        }
    }
}

/// One row of the per-epoch log.
#[derive(Debug, Clone)]
pub struct EpochRecord {
    pub epoch: usize,
    /// Row-weighted mean of the minibatch losses.
    pub train_loss: f64,
    /// Test metric; absent on epochs skipped by `eval_every`.
    pub eval_metric: Option<f64>,
    /// Mean |a| over KAF layers; absent for networks without any.
    pub mean_abs_a: Option<f64>,
    pub mean_abs_b: Option<f64>,
    /// Wall-clock seconds since the start of the run.
    pub seconds: f64,
}

/// Outcome of [`fit`].
#[derive(Debug, Clone)]
pub struct RunReport {
    pub records: Vec<EpochRecord>,
    pub final_metric: f64,
    pub best_metric: f64,
    pub best_epoch: usize,
    pub wall_seconds: f64,
}

fn check_pair(name: &'static str, x: &Matrix, y: &Matrix) -> Result<()> {
    if x.rows() != y.rows() || x.rows() == 0 {
        return Err(Error::Data(format!(
            "{name}: {} input rows vs {} target rows",
            x.rows(),
            y.rows()
        )));
    }
    Ok(())
}

/// Evaluates `metric` on a full forward pass.
pub fn evaluate(net: &Network, x: &Matrix, y: &Matrix, metric: Metric) -> Result<f64> {
    check_pair("evaluate", x, y)?;
    let pred = net.predict(x)?;
    metric.eval(&pred, y)
}

/// Trains `net` in place with Adam. Returns the per-epoch log; a non-finite
/// loss or activation aborts with [`Error::Divergence`] naming the epoch.
///
/// Determinism: identical inputs, config, and initial network state produce
/// bit-identical parameters and records.
pub fn fit(
    net: &mut Network,
    x_train: &Matrix,
    y_train: &Matrix,
    x_test: &Matrix,
    y_test: &Matrix,
    cfg: &TrainConfig,
) -> Result<RunReport> {
    if cfg.epochs == 0 {
        return Err(Error::Param("epochs must be >= 1".into()));
    }
    if !cfg.lr.is_finite() || cfg.lr < 0.0 {
        return Err(Error::Param(format!("lr must be finite and >= 0, got {}", cfg.lr)));
    }
    if let Some(tau) = cfg.clip_tau {
        if !(tau > 0.0) {
            return Err(Error::Param(format!("clip_tau must be > 0, got {tau}")));
        }
    }
    if cfg.eval_every == 0 {
        return Err(Error::Param("eval_every must be >= 1".into()));
    }
    check_pair("fit/train", x_train, y_train)?;
    check_pair("fit/test", x_test, y_test)?;

    let n = x_train.rows();
    let batch = if cfg.batch_size == 0 { n } else { cfg.batch_size.min(n) };
    let mut rng = RngState::new(cfg.seed);
    let mut adam = AdamState::new();
    let mut order: Vec<usize> = (0..n).collect();
    let start = Instant::now();
    let mut records = Vec::with_capacity(cfg.epochs);
    let mut best_metric = cfg.metric.worst();
    let mut best_epoch = 0usize;

    for epoch in 0..cfg.epochs {
        if cfg.shuffle {
            rng.shuffle(&mut order);
        }
        let mut loss_sum = 0.0;
        for chunk in order.chunks(batch) {
            let xb = x_train.gather_rows(chunk)?;
            let yb = y_train.gather_rows(chunk)?;
            let step = (|| -> Result<f64> {
                let (pred, caches) = net.forward(&xb)?;
                let (loss, d_pred) = cfg.loss.compute(&pred, &yb)?;
                if !loss.is_finite() {
                    return Err(Error::NonFinite { op: "loss" });
                }
                let (mut grads, _) = net.backward(&caches, &d_pred)?;
                if let Some(tau) = cfg.clip_tau {
                    net.clip_freq_grads(&mut grads, tau);
                }
                let grad_refs = net.grad_slices(&grads)?;
                // grad_slices borrows `grads`; copy the views so the network
                // can be borrowed mutably for the parameter update.
                let grad_owned: Vec<Vec<f64>> =
                    grad_refs.into_iter().map(|s| s.to_vec()).collect();
                let grad_views: Vec<&[f64]> = grad_owned.iter().map(|v| v.as_slice()).collect();
                let mut params = net.param_slices_mut();
                adam.step(&mut params, &grad_views, cfg.lr)?;
                Ok(loss)
            })();
            match step {
                Ok(loss) => loss_sum += loss * chunk.len() as f64,
                Err(Error::NonFinite { .. }) => return Err(Error::Divergence { epoch }),
                Err(e) => return Err(e),
            }
        }
        let train_loss = loss_sum / n as f64;
        let do_eval = (epoch + 1) % cfg.eval_every == 0 || epoch + 1 == cfg.epochs;
        let eval_metric = if do_eval {
            // Exploded parameters can first surface here rather than in the
            // next training step; that is still divergence.
            let m = match evaluate(net, x_test, y_test, cfg.metric) {
                Ok(m) => m,
                Err(Error::NonFinite { .. }) => return Err(Error::Divergence { epoch }),
                Err(e) => return Err(e),
            };
            if !m.is_finite() {
                return Err(Error::Divergence { epoch });
            }
            if cfg.metric.improves(m, best_metric) {
                best_metric = m;
                best_epoch = epoch;
            }
            Some(m)
        } else {
            None
        };
        let (mean_abs_a, mean_abs_b) = match net.kaf_scale_means() {
            Some((a, b)) => (Some(a), Some(b)),
            None => (None, None),
        };
        records.push(EpochRecord {
            epoch,
            train_loss,
            eval_metric,
            mean_abs_a,
            mean_abs_b,
            seconds: start.elapsed().as_secs_f64(),
        });
    }
    // The last epoch always evaluates, so this is always present.
    let final_metric = records
        .iter()
        .rev()
        .find_map(|r| r.eval_metric)
        .unwrap_or(f64::NAN);
    Ok(RunReport {
        records,
        final_metric,
        best_metric,
        best_epoch,
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}
