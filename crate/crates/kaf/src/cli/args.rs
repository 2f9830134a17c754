use crate::cli::config::{ModelKind, RunConfig, ENV_SEED};
use crate::error::Result;
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(
    name = "kaf",
    version,
    about = "Fourier-feature Kolmogorov-Arnold networks: training and analysis"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a model on a task; writes metrics.csv, a checkpoint, and the
    /// resolved config
    Fit(FitArgs),
    /// Measure random-feature kernel approximation error
    KernelCheck(KernelCheckArgs),
    /// Derive the bandwidth-optimal frequency initialization scale
    SigmaOpt(SigmaOptArgs),
    /// Report parameter and FLOP counts (formula vs enumerated)
    Params(ParamsArgs),
    /// Compare the spectrum of model predictions against the targets
    Spectrum(SpectrumArgs),
    /// Run the ablation grid on one task
    Ablate(AblateArgs),
}

/// Flags shared by every subcommand.
#[derive(Debug, Args)]
pub struct CommonOpts {
    /// key=value config file; flags override file values
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Directory for output artifacts
    #[arg(long)]
    pub out_dir: Option<String>,
    /// RNG seed (the KAF_SEED environment variable overrides this)
    #[arg(long)]
    pub seed: Option<u64>,
}

impl CommonOpts {
    /// Builds the base config: defaults, then file, then the shared flags.
    /// Per-command flags are applied on top by the caller, then the seed env
    /// override is applied last.
    fn base(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            cfg.merge_file(path)?;
        }
        if let Some(v) = &self.out_dir {
            cfg.out_dir = v.clone();
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        Ok(cfg)
    }

    fn finish(&self, mut cfg: RunConfig) -> Result<RunConfig> {
        let env = std::env::var(ENV_SEED).ok();
        cfg.apply_env_seed(env.as_deref())?;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub common: CommonOpts,
    /// Task: a benchmark function name, mnist, cifar10, or poisson
    #[arg(long)]
    pub task: Option<String>,
    /// Model family: kaf, kan, mlp-gelu, or mlp-relu
    #[arg(long)]
    pub model: Option<String>,
    /// Hidden layer width
    #[arg(long)]
    pub hidden: Option<usize>,
    /// Fourier frequencies per dim (KAF) / spline grid count (KAN)
    #[arg(long)]
    pub grids: Option<usize>,
    /// Spline degree (KAN)
    #[arg(long)]
    pub degree: Option<usize>,
    /// Frequency init standard deviation (KAF)
    #[arg(long)]
    pub sigma_f: Option<f64>,
    /// Normalize layer inputs before the activation paths (KAF)
    #[arg(long)]
    pub layernorm: bool,
    /// Ablation: zero the GELU path
    #[arg(long)]
    pub disable_gelu: bool,
    /// Ablation: zero the Fourier path
    #[arg(long)]
    pub disable_rff: bool,
    /// Ablation: freeze both path scales at 1
    #[arg(long)]
    pub disable_scales: bool,
    /// Ablation: Xavier-uniform frequency init instead of the spectral scale
    #[arg(long)]
    pub random_rff_init: bool,
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Minibatch rows; 0 trains full-batch
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub lr: Option<f64>,
    /// Frobenius-norm clip for frequency gradients
    #[arg(long)]
    pub clip_tau: Option<f64>,
    /// Evaluate every k-th epoch
    #[arg(long)]
    pub eval_every: Option<usize>,
    #[arg(long)]
    pub train_points: Option<usize>,
    #[arg(long)]
    pub test_points: Option<usize>,
    /// Override the task's sampling domain (requires --domain-hi)
    #[arg(long)]
    pub domain_lo: Option<f64>,
    #[arg(long)]
    pub domain_hi: Option<f64>,
    /// Directory holding mnist / cifar10 binary files
    #[arg(long)]
    pub data_dir: Option<String>,
}

impl FitArgs {
    pub fn into_config(&self) -> Result<RunConfig> {
        let mut cfg = self.common.base()?;
        if let Some(v) = &self.task {
            cfg.task = v.clone();
        }
        if let Some(v) = &self.model {
            cfg.model = ModelKind::parse(v)?;
        }
        if let Some(v) = self.hidden {
            cfg.hidden = v;
        }
        if let Some(v) = self.grids {
            cfg.grids = v;
        }
        if let Some(v) = self.degree {
            cfg.degree = v;
        }
        if let Some(v) = self.sigma_f {
            cfg.sigma_f = v;
        }
        if self.layernorm {
            cfg.layernorm = true;
        }
        if self.disable_gelu {
            cfg.disable_gelu = true;
        }
        if self.disable_rff {
            cfg.disable_rff = true;
        }
        if self.disable_scales {
            cfg.disable_scales = true;
        }
        if self.random_rff_init {
            cfg.random_rff_init = true;
        }
        if let Some(v) = self.epochs {
            cfg.epochs = v;
        }
        if let Some(v) = self.batch_size {
            cfg.batch_size = v;
        }
        if let Some(v) = self.lr {
            cfg.lr = v;
        }
        if let Some(v) = self.clip_tau {
            cfg.clip_tau = Some(v);
        }
        if let Some(v) = self.eval_every {
            cfg.eval_every = v;
        }
        if let Some(v) = self.train_points {
            cfg.train_points = v;
        }
        if let Some(v) = self.test_points {
            cfg.test_points = v;
        }
        if let Some(v) = self.domain_lo {
            cfg.domain_lo = Some(v);
        }
        if let Some(v) = self.domain_hi {
            cfg.domain_hi = Some(v);
        }
        if let Some(v) = &self.data_dir {
            cfg.data_dir = Some(v.clone());
        }
        self.common.finish(cfg)
    }
}

#[derive(Debug, Args)]
pub struct KernelCheckArgs {
    #[command(flatten)]
    pub common: CommonOpts,
    /// Number of random features
    #[arg(long)]
    pub m: Option<usize>,
    /// Gaussian kernel bandwidth
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Input dimension
    #[arg(long)]
    pub d: Option<usize>,
    /// Number of sampled point pairs
    #[arg(long)]
    pub pairs: Option<usize>,
}

impl KernelCheckArgs {
    pub fn into_config(&self) -> Result<RunConfig> {
        let mut cfg = self.common.base()?;
        if let Some(v) = self.m {
            cfg.kernel_m = v;
        }
        if let Some(v) = self.sigma {
            cfg.kernel_sigma = v;
        }
        if let Some(v) = self.d {
            cfg.kernel_d = v;
        }
        if let Some(v) = self.pairs {
            cfg.kernel_pairs = v;
        }
        self.common.finish(cfg)
    }
}

#[derive(Debug, Args)]
pub struct SigmaOptArgs {
    #[command(flatten)]
    pub common: CommonOpts,
    /// Quadrature subintervals for the transform
    #[arg(long)]
    pub n_mc: Option<usize>,
    /// Frequency grid spacing (must be <= 0.05)
    #[arg(long)]
    pub grid_spacing: Option<f64>,
    /// Frequency grid covers |omega| <= this limit (must be >= 20)
    #[arg(long)]
    pub grid_limit: Option<f64>,
}

impl SigmaOptArgs {
    pub fn into_config(&self) -> Result<RunConfig> {
        let mut cfg = self.common.base()?;
        if let Some(v) = self.n_mc {
            cfg.sigma_n_mc = v;
        }
        if let Some(v) = self.grid_spacing {
            cfg.sigma_grid_spacing = v;
        }
        if let Some(v) = self.grid_limit {
            cfg.sigma_grid_limit = v;
        }
        self.common.finish(cfg)
    }
}

#[derive(Debug, Args)]
pub struct ParamsArgs {
    #[command(flatten)]
    pub common: CommonOpts,
    /// Model family: kaf, kan, mlp-gelu, or mlp-relu
    #[arg(long)]
    pub model: Option<String>,
    /// Layer input dimension
    #[arg(long)]
    pub din: Option<usize>,
    /// Layer output dimension
    #[arg(long)]
    pub dout: Option<usize>,
    /// Fourier frequencies per dim (KAF) / spline grid count (KAN)
    #[arg(long)]
    pub grids: Option<usize>,
    /// Spline degree (KAN)
    #[arg(long)]
    pub degree: Option<usize>,
}

impl ParamsArgs {
    pub fn into_config(&self) -> Result<RunConfig> {
        let mut cfg = self.common.base()?;
        if let Some(v) = &self.model {
            cfg.model = ModelKind::parse(v)?;
        }
        if let Some(v) = self.din {
            cfg.din = v;
        }
        if let Some(v) = self.dout {
            cfg.dout = v;
        }
        if let Some(v) = self.grids {
            cfg.grids = v;
        }
        if let Some(v) = self.degree {
            cfg.degree = v;
        }
        self.common.finish(cfg)
    }
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub common: CommonOpts,
    /// Scalar task to sample on a uniform grid
    #[arg(long)]
    pub task: Option<String>,
    /// Model family: kaf, kan, mlp-gelu, or mlp-relu
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub hidden: Option<usize>,
    #[arg(long)]
    pub grids: Option<usize>,
    #[arg(long)]
    pub degree: Option<usize>,
    #[arg(long)]
    pub sigma_f: Option<f64>,
    #[arg(long)]
    pub layernorm: bool,
    /// Checkpoint to load into the model before prediction
    #[arg(long)]
    pub checkpoint: Option<String>,
    /// Grid size for the comparison
    #[arg(long)]
    pub train_points: Option<usize>,
    #[arg(long)]
    pub domain_lo: Option<f64>,
    #[arg(long)]
    pub domain_hi: Option<f64>,
}

impl SpectrumArgs {
    pub fn into_config(&self) -> Result<RunConfig> {
        let mut cfg = self.common.base()?;
        if let Some(v) = &self.task {
            cfg.task = v.clone();
        }
        if let Some(v) = &self.model {
            cfg.model = ModelKind::parse(v)?;
        }
        if let Some(v) = self.hidden {
            cfg.hidden = v;
        }
        if let Some(v) = self.grids {
            cfg.grids = v;
        }
        if let Some(v) = self.degree {
            cfg.degree = v;
        }
        if let Some(v) = self.sigma_f {
            cfg.sigma_f = v;
        }
        if self.layernorm {
            cfg.layernorm = true;
        }
        if let Some(v) = &self.checkpoint {
            cfg.checkpoint = Some(v.clone());
        }
        if let Some(v) = self.train_points {
            cfg.train_points = v;
        }
        if let Some(v) = self.domain_lo {
            cfg.domain_lo = Some(v);
        }
        if let Some(v) = self.domain_hi {
            cfg.domain_hi = Some(v);
        }
        self.common.finish(cfg)
    }
}

#[derive(Debug, Args)]
pub struct AblateArgs {
    #[command(flatten)]
    pub common: CommonOpts,
    /// Regression task for the grid
    #[arg(long)]
    pub task: Option<String>,
    #[arg(long)]
    pub hidden: Option<usize>,
    #[arg(long)]
    pub grids: Option<usize>,
    #[arg(long)]
    pub sigma_f: Option<f64>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub train_points: Option<usize>,
    #[arg(long)]
    pub test_points: Option<usize>,
    #[arg(long)]
    pub domain_lo: Option<f64>,
    #[arg(long)]
    pub domain_hi: Option<f64>,
    /// Comma-separated sigma values for the sweep rows
    #[arg(long)]
    pub sigma_sweep: Option<String>,
    /// Comma-separated frequency counts for the sweep rows
    #[arg(long)]
    pub m_sweep: Option<String>,
    /// Run grid entries on worker threads (independent rows, same outputs)
    #[arg(long)]
    pub parallel: bool,
}

impl AblateArgs {
    pub fn into_config(&self) -> Result<RunConfig> {
        let mut cfg = self.common.base()?;
        if let Some(v) = &self.task {
            cfg.task = v.clone();
        }
        if let Some(v) = self.hidden {
            cfg.hidden = v;
        }
        if let Some(v) = self.grids {
            cfg.grids = v;
        }
        if let Some(v) = self.sigma_f {
            cfg.sigma_f = v;
        }
        if let Some(v) = self.epochs {
            cfg.epochs = v;
        }
        if let Some(v) = self.batch_size {
            cfg.batch_size = v;
        }
        if let Some(v) = self.lr {
            cfg.lr = v;
        }
        if let Some(v) = self.train_points {
            cfg.train_points = v;
        }
        if let Some(v) = self.test_points {
            cfg.test_points = v;
        }
        if let Some(v) = self.domain_lo {
            cfg.domain_lo = Some(v);
        }
        if let Some(v) = self.domain_hi {
            cfg.domain_hi = Some(v);
        }
        if let Some(v) = &self.sigma_sweep {
            cfg.apply_kv("sigma_sweep", v)?;
        }
        if let Some(v) = &self.m_sweep {
            cfg.apply_kv("m_sweep", v)?;
        }
        if self.parallel {
            cfg.parallel = true;
        }
        self.common.finish(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file_values() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.cfg");
        std::fs::write(&path, "lr=0.9\nepochs=5\ntask=cos\n").unwrap();
        let args = Cli::parse_from([
            "kaf", "fit", "--config",
            path.to_str().unwrap(),
            "--lr", "0.125",
        ]);
        let cfg = match args.command {
            Command::Fit(f) => f.into_config().unwrap(),
            _ => unreachable!(),
        };
        assert_eq!(cfg.lr, 0.125); // flag wins
        assert_eq!(cfg.epochs, 5); // file wins over default
        assert_eq!(cfg.task, "cos");
    }

    #[test]
    fn params_example_flags_parse() {
        let args = Cli::parse_from([
            "kaf", "params", "--model", "kaf", "--din", "4", "--dout", "4", "--grids", "9",
        ]);
        let cfg = match args.command {
            Command::Params(p) => p.into_config().unwrap(),
            _ => unreachable!(),
        };
        assert_eq!((cfg.din, cfg.dout, cfg.grids), (4, 4, 9));
    }

    #[test]
    fn sweep_flags_parse_lists() {
        let args = Cli::parse_from([
            "kaf",
            "ablate",
            "--task",
            "high-freq-sum",
            "--sigma-sweep",
            "0.1,0.5,1,1.64,2,3",
        ]);
        let cfg = match args.command {
            Command::Ablate(a) => a.into_config().unwrap(),
            _ => unreachable!(),
        };
        assert_eq!(cfg.sigma_sweep.len(), 6);
        assert_eq!(cfg.task, "high-freq-sum");
    }
}
