use crate::error::{Error, Result};
use crate::numerics::special::bessel_j0;
use crate::numerics::{Matrix, RngState};
use std::f64::consts::PI;

/// What the targets of a [`Dataset`] mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaskKind {
    /// Targets are real values; evaluate with RMSE.
    Regression,
    /// Targets are class indices in one column; evaluate with accuracy.
    Classification,
}

/// A design matrix with aligned targets.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub x: Matrix,
    pub y: Matrix,
    pub task: TaskKind,
}

impl Dataset {
    pub fn n(&self) -> usize {
        self.x.rows()
    }
}

/// Train/test pair drawn from one source.
#[derive(Debug, Clone)]
pub struct Split {
    pub train: Dataset,
    pub test: Dataset,
}

/// Closed-form target functions for the approximation benchmarks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchmarkFn {
    /// J0(20x), heavily oscillatory near the origin.
    BesselJ0,
    /// exp(sin(pi x) + y^2).
    Chaotic,
    /// x * y.
    SimpleProduct,
    /// sum_{k=1}^{100} sin(k x / 100).
    HighFreqSum,
    /// exp(sin(x1^2 + x2^2) + sin(x3^2 + x4^2)).
    HighlyNonlinear,
    /// Piecewise: -1, then x^2, then sin(4 pi x), then 1, with breaks at
    /// -0.5, 0, 0.5.
    Discontinuous,
    /// exp(-x^2) sin(10 pi x).
    OscillatingDecay,
    /// (x1^2 + x2^2) / (1 + x1^2 + x2^2).
    Rational,
    /// tanh(x1 x2 x3) + sin(pi x1) cos(pi x2) exp(-x3^2).
    MultiScale,
    /// sin(50 x1) cos(50 x2) + exp(-((x1-0.5)^2 + (x2-0.5)^2) / 0.1).
    ExpSine,
    /// sin(x) over many periods.
    Sin,
    /// cos(x) over many periods.
    Cos,
}

impl BenchmarkFn {
    pub fn all() -> [BenchmarkFn; 12] {
        [
            BenchmarkFn::BesselJ0,
            BenchmarkFn::Chaotic,
            BenchmarkFn::SimpleProduct,
            BenchmarkFn::HighFreqSum,
            BenchmarkFn::HighlyNonlinear,
            BenchmarkFn::Discontinuous,
            BenchmarkFn::OscillatingDecay,
            BenchmarkFn::Rational,
            BenchmarkFn::MultiScale,
            BenchmarkFn::ExpSine,
            BenchmarkFn::Sin,
            BenchmarkFn::Cos,
        ]
    }

    pub fn name(&self) -> &'static str {
        match self {
            BenchmarkFn::BesselJ0 => "bessel-j0",
            BenchmarkFn::Chaotic => "chaotic",
            BenchmarkFn::SimpleProduct => "simple-product",
            BenchmarkFn::HighFreqSum => "high-freq-sum",
            BenchmarkFn::HighlyNonlinear => "highly-nonlinear",
            BenchmarkFn::Discontinuous => "discontinuous",
            BenchmarkFn::OscillatingDecay => "oscillating-decay",
            BenchmarkFn::Rational => "rational",
            BenchmarkFn::MultiScale => "multi-scale",
            BenchmarkFn::ExpSine => "exp-sine",
            BenchmarkFn::Sin => "sin",
            BenchmarkFn::Cos => "cos",
        }
    }

    pub fn from_name(name: &str) -> Result<BenchmarkFn> {
        BenchmarkFn::all()
            .into_iter()
            .find(|f| f.name() == name)
            .ok_or_else(|| {
                Error::Param(format!(
                    "unknown benchmark function '{name}' (expected one of: {})",
                    BenchmarkFn::all().map(|f| f.name()).join(", ")
                ))
            })
    }

    /// Input dimension.
    pub fn arity(&self) -> usize {
        match self {
            BenchmarkFn::BesselJ0
            | BenchmarkFn::HighFreqSum
            | BenchmarkFn::Discontinuous
            | BenchmarkFn::OscillatingDecay
            | BenchmarkFn::Sin
            | BenchmarkFn::Cos => 1,
            BenchmarkFn::Chaotic
            | BenchmarkFn::SimpleProduct
            | BenchmarkFn::Rational
            | BenchmarkFn::ExpSine => 2,
            BenchmarkFn::MultiScale => 3,
            BenchmarkFn::HighlyNonlinear => 4,
        }
    }

    /// Sampling interval per coordinate. `sin`/`cos` span many periods;
    /// everything else lives on [-1, 1].
    pub fn default_domain(&self) -> (f64, f64) {
        match self {
            BenchmarkFn::Sin | BenchmarkFn::Cos => (-20.0, 20.0),
            _ => (-1.0, 1.0),
        }
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.arity() {
            return Err(Error::Param(format!(
                "{} takes {} inputs, got {}",
                self.name(),
                self.arity(),
                x.len()
            )));
        }
        Ok(match self {
            BenchmarkFn::BesselJ0 => bessel_j0(20.0 * x[0]),
            BenchmarkFn::Chaotic => ((PI * x[0]).sin() + x[1] * x[1]).exp(),
            BenchmarkFn::SimpleProduct => x[0] * x[1],
            BenchmarkFn::HighFreqSum => {
                (1..=100).map(|k| (k as f64 * x[0] / 100.0).sin()).sum()
            }
            BenchmarkFn::HighlyNonlinear => {
                let r1 = x[0] * x[0] + x[1] * x[1];
                let r2 = x[2] * x[2] + x[3] * x[3];
                (r1.sin() + r2.sin()).exp()
            }
            BenchmarkFn::Discontinuous => {
                let t = x[0];
                if t < -0.5 {
                    -1.0
                } else if t < 0.0 {
                    t * t
                } else if t < 0.5 {
                    (4.0 * PI * t).sin()
                } else {
                    1.0
                }
            }
            BenchmarkFn::OscillatingDecay => (-x[0] * x[0]).exp() * (10.0 * PI * x[0]).sin(),
            BenchmarkFn::Rational => {
                let r = x[0] * x[0] + x[1] * x[1];
                r / (1.0 + r)
            }
            BenchmarkFn::MultiScale => {
                (x[0] * x[1] * x[2]).tanh()
                    + (PI * x[0]).sin() * (PI * x[1]).cos() * (-x[2] * x[2]).exp()
            }
            BenchmarkFn::ExpSine => {
                let bump = -((x[0] - 0.5).powi(2) + (x[1] - 0.5).powi(2)) / 0.1;
                (50.0 * x[0]).sin() * (50.0 * x[1]).cos() + bump.exp()
            }
            BenchmarkFn::Sin => x[0].sin(),
            BenchmarkFn::Cos => x[0].cos(),
        })
    }
}

/// Samples i.i.d. uniform train/test sets for `f` (targets in one column).
/// `domain` overrides the per-coordinate sampling interval.
pub fn make_function_dataset(
    f: BenchmarkFn,
    n_train: usize,
    n_test: usize,
    seed: u64,
    domain: Option<(f64, f64)>,
) -> Result<Split> {
    if n_train == 0 || n_test == 0 {
        return Err(Error::Param(format!(
            "need nonempty splits, got n_train={n_train} n_test={n_test}"
        )));
    }
    let (lo, hi) = domain.unwrap_or_else(|| f.default_domain());
    if !(lo < hi) {
        return Err(Error::Param(format!("domain lo {lo} must be below hi {hi}")));
    }
    let d = f.arity();
    let mut rng = RngState::new(seed);
    let mut sample = |n: usize| -> Result<Dataset> {
        let x = Matrix::from_vec(n, d, rng.sample_uniform(lo, hi, n * d)?)?;
        let mut y = Matrix::zeros(n, 1);
        for r in 0..n {
            y.set(r, 0, f.eval(x.row(r))?);
        }
        Ok(Dataset { x, y, task: TaskKind::Regression })
    };
    let train = sample(n_train)?;
    let test = sample(n_test)?;
    Ok(Split { train, test })
}

/// Number of equispaced training points in [`make_sincos_dataset`].
pub const SINCOS_TRAIN_POINTS: usize = 1000;

/// The periodic-extrapolation protocol: 1000 equispaced training points over
/// [-20, 20] and the 999 interval midpoints as the test set, so test points
/// sit maximally far from the training grid.
pub fn make_sincos_dataset(f: BenchmarkFn) -> Result<Split> {
    if !matches!(f, BenchmarkFn::Sin | BenchmarkFn::Cos) {
        return Err(Error::Param(format!(
            "the equispaced-grid protocol is defined for sin/cos, not {}",
            f.name()
        )));
    }
    let (lo, hi) = f.default_domain();
    let n = SINCOS_TRAIN_POINTS;
    let step = (hi - lo) / (n - 1) as f64;
    let build = |offset: f64, count: usize| -> Result<Dataset> {
        let x = Matrix::from_fn(count, 1, |r, _| lo + (r as f64 + offset) * step);
        let mut y = Matrix::zeros(count, 1);
        for r in 0..count {
            y.set(r, 0, f.eval(x.row(r))?);
        }
        Ok(Dataset { x, y, task: TaskKind::Regression })
    };
    Ok(Split {
        train: build(0.0, n)?,
        test: build(0.5, n - 1)?,
    })
}
