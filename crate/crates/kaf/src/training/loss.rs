use crate::error::{Error, Result};
use crate::numerics::Matrix;

/// Training objective. Both variants return the scalar loss and dL/dlogits
/// in one pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Loss {
    /// Mean over all n*k entries of the squared error.
    Mse,
    /// Multi-class cross entropy; targets hold one class index per row.
    CrossEntropy,
}

impl Loss {
    pub fn compute(self, pred: &Matrix, target: &Matrix) -> Result<(f64, Matrix)> {
        match self {
            Loss::Mse => mse_loss(pred, target),
            Loss::CrossEntropy => cross_entropy_loss(pred, target),
        }
    }
}

/// `L = (1/nk) sum (pred - target)^2`, gradient `2 (pred - target) / (nk)`.
pub fn mse_loss(pred: &Matrix, target: &Matrix) -> Result<(f64, Matrix)> {
    if pred.shape() != target.shape() {
        return Err(Error::Shape {
            op: "mse_loss",
            left_rows: pred.rows(),
            left_cols: pred.cols(),
            right_rows: target.rows(),
            right_cols: target.cols(),
        });
    }
    let count = (pred.rows() * pred.cols()) as f64;
    let mut loss = 0.0;
    let grad = Matrix::from_fn(pred.rows(), pred.cols(), |r, c| {
        let d = pred.get(r, c) - target.get(r, c);
        loss += d * d;
        2.0 * d / count
    });
    Ok((loss / count, grad))
}

/// Cross entropy over logits with integer class targets (one column).
///
/// `L = (1/n) sum_r [logsumexp(logits_r) - logits_r[y_r]]`, stabilized by
/// subtracting the row max; gradient `(softmax - onehot) / n`.
pub fn cross_entropy_loss(logits: &Matrix, target: &Matrix) -> Result<(f64, Matrix)> {
    if target.cols() != 1 || target.rows() != logits.rows() {
        return Err(Error::Shape {
            op: "cross_entropy_loss",
            left_rows: logits.rows(),
            left_cols: logits.cols(),
            right_rows: target.rows(),
            right_cols: target.cols(),
        });
    }
    let n = logits.rows();
    let k = logits.cols();
    let nf = n as f64;
    let mut loss = 0.0;
    let mut grad = Matrix::zeros(n, k);
    for r in 0..n {
        let y = target.get(r, 0);
        if y.fract() != 0.0 || y < 0.0 || y >= k as f64 {
            return Err(Error::Data(format!(
                "row {r}: class target {y} is not an integer in [0, {k})"
            )));
        }
        let y = y as usize;
        let row = logits.row(r);
        let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let sum_exp: f64 = row.iter().map(|&v| (v - max).exp()).sum();
        loss += max + sum_exp.ln() - row[y];
        for c in 0..k {
            let softmax = (row[c] - max).exp() / sum_exp;
            let onehot = if c == y { 1.0 } else { 0.0 };
            grad.set(r, c, (softmax - onehot) / nf);
        }
    }
    Ok((loss / nf, grad))
}

/// Evaluation metric reported per epoch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    /// Root mean squared error over all entries (lower is better).
    Rmse,
    /// Fraction of rows whose argmax logit matches the class target
    /// (higher is better). Ties pick the lowest index.
    Accuracy,
}

impl Metric {
    pub fn eval(self, pred: &Matrix, target: &Matrix) -> Result<f64> {
        match self {
            Metric::Rmse => {
                let (mse, _) = mse_loss(pred, target)?;
                Ok(mse.sqrt())
            }
            Metric::Accuracy => {
                if target.cols() != 1 || target.rows() != pred.rows() {
                    return Err(Error::Shape {
                        op: "accuracy",
                        left_rows: pred.rows(),
                        left_cols: pred.cols(),
                        right_rows: target.rows(),
                        right_cols: target.cols(),
                    });
                }
                let mut hits = 0usize;
                for r in 0..pred.rows() {
                    let row = pred.row(r);
                    let mut best = 0usize;
                    for (c, &v) in row.iter().enumerate() {
                        if v > row[best] {
                            best = c;
                        }
                    }
                    if best as f64 == target.get(r, 0) {
                        hits += 1;
                    }
                }
                Ok(hits as f64 / pred.rows() as f64)
            }
        }
    }

    /// True when `candidate` beats `incumbent` under this metric's direction.
    pub fn improves(self, candidate: f64, incumbent: f64) -> bool {
        match self {
            Metric::Rmse => candidate < incumbent,
            Metric::Accuracy => candidate > incumbent,
        }
    }

    /// Worst possible starting value for best-so-far tracking.
    pub fn worst(self) -> f64 {
        match self {
            Metric::Rmse => f64::INFINITY,
            Metric::Accuracy => f64::NEG_INFINITY,
        }
    }
}
