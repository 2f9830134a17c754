use crate::error::{Error, Result};
use std::fmt;
use std::path::Path;

/// Environment variable that overrides the configured RNG seed.
pub const ENV_SEED: &str = "KAF_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Kaf,
    Kan,
    MlpGelu,
    MlpRelu,
}

impl ModelKind {
    pub fn parse(s: &str) -> Result<ModelKind> {
        match s {
            "kaf" => Ok(ModelKind::Kaf),
            "kan" => Ok(ModelKind::Kan),
            // Bare `mlp` means the GELU baseline.
            "mlp-gelu" | "mlp" => Ok(ModelKind::MlpGelu),
            "mlp-relu" => Ok(ModelKind::MlpRelu),
            other => Err(Error::Config(format!(
                "unknown model `{other}` (expected kaf, kan, mlp-gelu, or mlp-relu)"
            ))),
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Kaf => "kaf",
            ModelKind::Kan => "kan",
            ModelKind::MlpGelu => "mlp-gelu",
            ModelKind::MlpRelu => "mlp-relu",
        })
    }
}

/// Flat key=value run configuration shared by every subcommand.
///
/// Sources merge with rising precedence: built-in defaults, then a config
/// file, then command-line flags, then the [`ENV_SEED`] environment variable
/// (seed only). Every run writes the fully resolved configuration next to
/// its other outputs, and re-parsing that file reproduces the run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    // model
    pub model: ModelKind,
    pub hidden: usize,
    /// Fourier frequencies per input dim (KAF) or spline grid count (KAN).
    pub grids: usize,
    /// Spline degree (KAN only).
    pub degree: usize,
    pub sigma_f: f64,
    pub layernorm: bool,
    pub disable_gelu: bool,
    pub disable_rff: bool,
    pub disable_scales: bool,
    /// Replace the spectral frequency init with a plain Xavier-uniform draw.
    pub random_rff_init: bool,
    // task
    pub task: String,
    pub train_points: usize,
    pub test_points: usize,
    pub domain_lo: Option<f64>,
    pub domain_hi: Option<f64>,
    pub data_dir: Option<String>,
    // training
    pub epochs: usize,
    pub batch_size: usize,
    pub lr: f64,
    pub seed: u64,
    pub eval_every: usize,
    pub clip_tau: Option<f64>,
    // analysis knobs
    pub kernel_m: usize,
    pub kernel_sigma: f64,
    pub kernel_d: usize,
    pub kernel_pairs: usize,
    pub sigma_n_mc: usize,
    pub sigma_grid_spacing: f64,
    pub sigma_grid_limit: f64,
    pub din: usize,
    pub dout: usize,
    pub sigma_sweep: Vec<f64>,
    pub m_sweep: Vec<usize>,
    pub checkpoint: Option<String>,
    pub parallel: bool,
    // artifacts
    pub out_dir: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            model: ModelKind::Kaf,
            hidden: 64,
            grids: 8,
            degree: 3,
            sigma_f: 1.64,
            layernorm: false,
            disable_gelu: false,
            disable_rff: false,
            disable_scales: false,
            random_rff_init: false,
            task: "sin".into(),
            train_points: 1000,
            test_points: 1000,
            domain_lo: None,
            domain_hi: None,
            data_dir: None,
            epochs: 1000,
            batch_size: 0,
            lr: 1e-3,
            seed: 0,
            eval_every: 1,
            clip_tau: None,
            kernel_m: 4096,
            kernel_sigma: 1.0,
            kernel_d: 4,
            kernel_pairs: 200,
            sigma_n_mc: 20_000,
            sigma_grid_spacing: 0.02,
            sigma_grid_limit: 20.0,
            din: 4,
            dout: 4,
            sigma_sweep: vec![0.1, 1.64, 3.0],
            m_sweep: vec![2, 4, 8, 16],
            checkpoint: None,
            parallel: false,
            out_dir: "runs/out".into(),
        }
    }
}

fn bad(key: &str, value: &str, want: &str) -> Error {
    Error::Config(format!("key `{key}`: cannot parse `{value}` as {want}"))
}

fn p_usize(key: &str, v: &str) -> Result<usize> {
    v.parse().map_err(|_| bad(key, v, "an unsigned integer"))
}

fn p_u64(key: &str, v: &str) -> Result<u64> {
    v.parse().map_err(|_| bad(key, v, "an unsigned integer"))
}

fn p_f64(key: &str, v: &str) -> Result<f64> {
    let x: f64 = v.parse().map_err(|_| bad(key, v, "a number"))?;
    if !x.is_finite() {
        return Err(bad(key, v, "a finite number"));
    }
    Ok(x)
}

fn p_bool(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(bad(key, v, "true or false")),
    }
}

fn p_opt_f64(key: &str, v: &str) -> Result<Option<f64>> {
    if v == "none" {
        Ok(None)
    } else {
        p_f64(key, v).map(Some)
    }
}

fn p_opt_string(v: &str) -> Option<String> {
    if v == "none" {
        None
    } else {
        Some(v.to_string())
    }
}

fn p_f64_list(key: &str, v: &str) -> Result<Vec<f64>> {
    v.split(',')
        .map(|t| p_f64(key, t.trim()))
        .collect()
}

fn p_usize_list(key: &str, v: &str) -> Result<Vec<usize>> {
    v.split(',')
        .map(|t| p_usize(key, t.trim()))
        .collect()
}

fn fmt_opt_f64(v: Option<f64>) -> String {
    v.map_or_else(|| "none".into(), |x| x.to_string())
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl RunConfig {
    /// Applies one `key=value` pair. Unknown keys are rejected so that typos
    /// in config files fail loudly instead of silently using a default.
    pub fn apply_kv(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "model" => self.model = ModelKind::parse(value)?,
            "hidden" => self.hidden = p_usize(key, value)?,
            "grids" => self.grids = p_usize(key, value)?,
            "degree" => self.degree = p_usize(key, value)?,
            "sigma_f" => self.sigma_f = p_f64(key, value)?,
            "layernorm" => self.layernorm = p_bool(key, value)?,
            "disable_gelu" => self.disable_gelu = p_bool(key, value)?,
            "disable_rff" => self.disable_rff = p_bool(key, value)?,
            "disable_scales" => self.disable_scales = p_bool(key, value)?,
            "random_rff_init" => self.random_rff_init = p_bool(key, value)?,
            "task" => self.task = value.to_string(),
            "train_points" => self.train_points = p_usize(key, value)?,
            "test_points" => self.test_points = p_usize(key, value)?,
            "domain_lo" => self.domain_lo = p_opt_f64(key, value)?,
            "domain_hi" => self.domain_hi = p_opt_f64(key, value)?,
            "data_dir" => self.data_dir = p_opt_string(value),
            "epochs" => self.epochs = p_usize(key, value)?,
            "batch_size" => self.batch_size = p_usize(key, value)?,
            "lr" => self.lr = p_f64(key, value)?,
            "seed" => self.seed = p_u64(key, value)?,
            "eval_every" => self.eval_every = p_usize(key, value)?,
            "clip_tau" => self.clip_tau = p_opt_f64(key, value)?,
            "kernel_m" => self.kernel_m = p_usize(key, value)?,
            "kernel_sigma" => self.kernel_sigma = p_f64(key, value)?,
            "kernel_d" => self.kernel_d = p_usize(key, value)?,
            "kernel_pairs" => self.kernel_pairs = p_usize(key, value)?,
            "sigma_n_mc" => self.sigma_n_mc = p_usize(key, value)?,
            "sigma_grid_spacing" => self.sigma_grid_spacing = p_f64(key, value)?,
            "sigma_grid_limit" => self.sigma_grid_limit = p_f64(key, value)?,
            "din" => self.din = p_usize(key, value)?,
            "dout" => self.dout = p_usize(key, value)?,
            "sigma_sweep" => self.sigma_sweep = p_f64_list(key, value)?,
            "m_sweep" => self.m_sweep = p_usize_list(key, value)?,
            "checkpoint" => self.checkpoint = p_opt_string(value),
            "parallel" => self.parallel = p_bool(key, value)?,
            "out_dir" => self.out_dir = value.to_string(),
            _ => return Err(Error::Config(format!("unknown config key `{key}`"))),
        }
        Ok(())
    }

    /// Merges a `key = value` file (one pair per line, `#` starts a comment).
    pub fn merge_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)?;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!(
                    "{}:{}: expected key=value, got `{line}`",
                    path.display(),
                    idx + 1
                ))
            })?;
            self.apply_kv(key.trim(), value.trim())?;
        }
        Ok(())
    }

    /// Applies the [`ENV_SEED`] override, if present. The environment wins
    /// over every other source so sweeps can re-seed runs without editing
    /// configs.
    pub fn apply_env_seed(&mut self, value: Option<&str>) -> Result<()> {
        if let Some(v) = value {
            self.seed = p_u64(ENV_SEED, v)?;
        }
        Ok(())
    }

    /// The fully resolved configuration as sorted `key=value` lines.
    /// Re-parsing this text reproduces the configuration exactly.
    pub fn resolved_text(&self) -> String {
        let mut pairs = vec![
            ("batch_size", self.batch_size.to_string()),
            ("checkpoint", self.checkpoint.clone().unwrap_or_else(|| "none".into())),
            ("clip_tau", fmt_opt_f64(self.clip_tau)),
            ("data_dir", self.data_dir.clone().unwrap_or_else(|| "none".into())),
            ("degree", self.degree.to_string()),
            ("din", self.din.to_string()),
            ("disable_gelu", self.disable_gelu.to_string()),
            ("disable_rff", self.disable_rff.to_string()),
            ("disable_scales", self.disable_scales.to_string()),
            ("domain_hi", fmt_opt_f64(self.domain_hi)),
            ("domain_lo", fmt_opt_f64(self.domain_lo)),
            ("dout", self.dout.to_string()),
            ("epochs", self.epochs.to_string()),
            ("eval_every", self.eval_every.to_string()),
            ("grids", self.grids.to_string()),
            ("hidden", self.hidden.to_string()),
            ("kernel_d", self.kernel_d.to_string()),
            ("kernel_m", self.kernel_m.to_string()),
            ("kernel_pairs", self.kernel_pairs.to_string()),
            ("kernel_sigma", self.kernel_sigma.to_string()),
            ("layernorm", self.layernorm.to_string()),
            ("lr", self.lr.to_string()),
            ("m_sweep", join(&self.m_sweep)),
            ("model", self.model.to_string()),
            ("out_dir", self.out_dir.clone()),
            ("parallel", self.parallel.to_string()),
            ("random_rff_init", self.random_rff_init.to_string()),
            ("seed", self.seed.to_string()),
            ("sigma_f", self.sigma_f.to_string()),
            ("sigma_grid_limit", self.sigma_grid_limit.to_string()),
            ("sigma_grid_spacing", self.sigma_grid_spacing.to_string()),
            ("sigma_n_mc", self.sigma_n_mc.to_string()),
            ("sigma_sweep", join(&self.sigma_sweep)),
            ("task", self.task.clone()),
            ("test_points", self.test_points.to_string()),
            ("train_points", self.train_points.to_string()),
        ];
        pairs.sort_by(|a, b| a.0.cmp(b.0));
        let mut out = String::new();
        for (k, v) in pairs {
            out.push_str(k);
            out.push('=');
            out.push_str(&v);
            out.push('\n');
        }
        out
    }

    /// Writes the resolved config into `dir` and returns its path.
    pub fn write_resolved(&self, dir: &Path) -> Result<std::path::PathBuf> {
        let path = dir.join("config.resolved");
        std::fs::write(&path, self.resolved_text())?;
        Ok(path)
    }

    /// Cross-field checks shared by all subcommands.
    pub fn validate(&self) -> Result<()> {
        if self.hidden < 1 || self.grids < 1 || self.degree < 1 {
            return Err(Error::Config(
                "hidden, grids, and degree must be >= 1".into(),
            ));
        }
        if self.epochs < 1 || self.eval_every < 1 {
            return Err(Error::Config("epochs and eval_every must be >= 1".into()));
        }
        if !(self.sigma_f > 0.0) {
            return Err(Error::Config(format!(
                "sigma_f must be > 0, got {}",
                self.sigma_f
            )));
        }
        if self.lr < 0.0 {
            return Err(Error::Config(format!("lr must be >= 0, got {}", self.lr)));
        }
        if let Some(tau) = self.clip_tau {
            if !(tau > 0.0) {
                return Err(Error::Config(format!("clip_tau must be > 0, got {tau}")));
            }
        }
        if self.disable_gelu && self.disable_rff {
            return Err(Error::Config(
                "disable_gelu and disable_rff cannot both be set".into(),
            ));
        }
        if self.train_points < 1 || self.test_points < 1 {
            return Err(Error::Config(
                "train_points and test_points must be >= 1".into(),
            ));
        }
        match (self.domain_lo, self.domain_hi) {
            (None, None) => {}
            (Some(lo), Some(hi)) if lo < hi => {}
            (Some(lo), Some(hi)) => {
                return Err(Error::Config(format!(
                    "domain_lo must be < domain_hi, got [{lo}, {hi}]"
                )));
            }
            _ => {
                return Err(Error::Config(
                    "domain_lo and domain_hi must be set together".into(),
                ));
            }
        }
        Ok(())
    }
}
