use crate::error::{Error, Result};
use crate::layers::Network;
use crate::numerics::Matrix;
use crate::training::AdamState;
use std::f64::consts::PI;

/// A 1-d Poisson boundary-value problem `-u''(x) = f(x)` on `domain` with
/// Dirichlet values `bc`, solved by penalized collocation: the network is
/// the trial solution, its second derivative is taken by central finite
/// differences of width `fd_step`, and the boundary conditions enter as a
/// quadratic penalty weighted by `lambda_bc`.
#[derive(Debug, Clone)]
pub struct PdeTask {
    pub domain: (f64, f64),
    /// Dirichlet values (u(lo), u(hi)).
    pub bc: (f64, f64),
    /// Right-hand side f in -u'' = f.
    pub source: fn(f64) -> f64,
    pub n_collocation: usize,
    pub fd_step: f64,
    pub lambda_bc: f64,
}

/// The standard test problem: `-u'' = pi^2 sin(pi x)` on (0, 1) with zero
/// boundary values, whose exact solution is `sin(pi x)`.
pub fn poisson_sine() -> PdeTask {
    PdeTask {
        domain: (0.0, 1.0),
        bc: (0.0, 0.0),
        source: |x| PI * PI * (PI * x).sin(),
        n_collocation: 64,
        fd_step: 1e-3,
        lambda_bc: 100.0,
    }
}

impl PdeTask {
    fn validate(&self) -> Result<()> {
        let (lo, hi) = self.domain;
        let h = self.fd_step;
        if !(lo < hi) {
            return Err(Error::Param(format!("domain lo {lo} must be below hi {hi}")));
        }
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::Param(format!("fd_step must be positive, got {h}")));
        }
        if self.n_collocation < 2 {
            return Err(Error::Param("need at least 2 collocation points".into()));
        }
        if lo + 2.0 * h >= hi - 2.0 * h {
            return Err(Error::Param(format!(
                "fd_step {h} leaves no room for collocation inside ({lo}, {hi})"
            )));
        }
        if self.lambda_bc < 0.0 {
            return Err(Error::Param("lambda_bc must be >= 0".into()));
        }
        Ok(())
    }

    /// Equispaced collocation points, inset two stencil widths from the
    /// boundary so every stencil stays inside the domain.
    pub fn collocation_points(&self) -> Result<Vec<f64>> {
        self.validate()?;
        let (lo, hi) = self.domain;
        let h = self.fd_step;
        let a = lo + 2.0 * h;
        let b = hi - 2.0 * h;
        let n = self.n_collocation;
        Ok((0..n)
            .map(|j| a + (b - a) * j as f64 / (n - 1) as f64)
            .collect())
    }

    /// Input batch covering the whole residual in one forward pass:
    /// `[x - h; x; x + h; lo; hi]`, shape (3n + 2) x 1.
    pub fn augmented_batch(&self) -> Result<Matrix> {
        let xs = self.collocation_points()?;
        let h = self.fd_step;
        let n = xs.len();
        let mut batch = Matrix::zeros(3 * n + 2, 1);
        for (j, &x) in xs.iter().enumerate() {
            batch.set(j, 0, x - h);
            batch.set(n + j, 0, x);
            batch.set(2 * n + j, 0, x + h);
        }
        batch.set(3 * n, 0, self.domain.0);
        batch.set(3 * n + 1, 0, self.domain.1);
        Ok(batch)
    }

    /// Residual loss and dL/du for trial values `u` evaluated on the
    /// [`PdeTask::augmented_batch`] layout:
    ///
    /// `L = mean_j (u''_fd(x_j) + f(x_j))^2
    ///    + lambda (u(lo) - g_lo)^2 + lambda (u(hi) - g_hi)^2`.
    pub fn residual_loss(&self, u: &Matrix) -> Result<(f64, Matrix)> {
        let xs = self.collocation_points()?;
        let n = xs.len();
        if u.rows() != 3 * n + 2 || u.cols() != 1 {
            return Err(Error::Shape {
                op: "poisson_residual",
                left_rows: u.rows(),
                left_cols: u.cols(),
                right_rows: 3 * n + 2,
                right_cols: 1,
            });
        }
        let h2 = self.fd_step * self.fd_step;
        let nf = n as f64;
        let mut loss = 0.0;
        let mut grad = Matrix::zeros(3 * n + 2, 1);
        for (j, &x) in xs.iter().enumerate() {
            let (um, uc, up) = (u.get(j, 0), u.get(n + j, 0), u.get(2 * n + j, 0));
            let r = (um - 2.0 * uc + up) / h2 + (self.source)(x);
            loss += r * r / nf;
            let g = 2.0 * r / (nf * h2);
            grad.set(j, 0, g);
            grad.set(n + j, 0, -2.0 * g);
            grad.set(2 * n + j, 0, g);
        }
        let (g_lo, g_hi) = self.bc;
        let (ua, ub) = (u.get(3 * n, 0), u.get(3 * n + 1, 0));
        loss += self.lambda_bc * ((ua - g_lo) * (ua - g_lo) + (ub - g_hi) * (ub - g_hi));
        grad.set(3 * n, 0, 2.0 * self.lambda_bc * (ua - g_lo));
        grad.set(3 * n + 1, 0, 2.0 * self.lambda_bc * (ub - g_hi));
        Ok((loss, grad))
    }
}

/// One loss/gradient evaluation of the collocation objective for `net`.
pub fn poisson_loss_and_grad(
    net: &Network,
    task: &PdeTask,
) -> Result<(f64, Vec<crate::layers::LayerGrads>)> {
    let batch = task.augmented_batch()?;
    let (u, caches) = net.forward(&batch)?;
    let (loss, d_u) = task.residual_loss(&u)?;
    if !loss.is_finite() {
        return Err(Error::NonFinite { op: "poisson_loss" });
    }
    let (grads, _) = net.backward(&caches, &d_u)?;
    Ok((loss, grads))
}

/// Full-batch Adam on the collocation objective; returns the loss history.
/// A non-finite loss aborts with [`Error::Divergence`].
pub fn fit_poisson(
    net: &mut Network,
    task: &PdeTask,
    epochs: usize,
    lr: f64,
) -> Result<Vec<f64>> {
    if epochs == 0 {
        return Err(Error::Param("epochs must be >= 1".into()));
    }
    if !lr.is_finite() || lr < 0.0 {
        return Err(Error::Param(format!("lr must be finite and >= 0, got {lr}")));
    }
    task.validate()?;
    let mut adam = AdamState::new();
    let mut history = Vec::with_capacity(epochs);
    for epoch in 0..epochs {
        let step = (|| -> Result<f64> {
            let (loss, grads) = poisson_loss_and_grad(net, task)?;
            let grad_refs = net.grad_slices(&grads)?;
            let grad_owned: Vec<Vec<f64>> = grad_refs.into_iter().map(|s| s.to_vec()).collect();
            let grad_views: Vec<&[f64]> = grad_owned.iter().map(|v| v.as_slice()).collect();
            let mut params = net.param_slices_mut();
            adam.step(&mut params, &grad_views, lr)?;
            Ok(loss)
        })();
        match step {
            Ok(loss) => history.push(loss),
            Err(Error::NonFinite { .. }) => return Err(Error::Divergence { epoch }),
            Err(e) => return Err(e),
        }
    }
    Ok(history)
}

/// RMSE between the network and a reference solution on an equispaced grid
/// over the task domain (boundaries included).
pub fn solution_rmse(
    net: &Network,
    task: &PdeTask,
    reference: impl Fn(f64) -> f64,
    n_grid: usize,
) -> Result<f64> {
    if n_grid < 2 {
        return Err(Error::Param("need at least 2 grid points".into()));
    }
    let (lo, hi) = task.domain;
    let x = Matrix::from_fn(n_grid, 1, |r, _| {
        lo + (hi - lo) * r as f64 / (n_grid - 1) as f64
    });
    let u = net.predict(&x)?;
    let mut sq = 0.0;
    for r in 0..n_grid {
        let d = u.get(r, 0) - reference(x.get(r, 0));
        sq += d * d;
    }
    Ok((sq / n_grid as f64).sqrt())
}
