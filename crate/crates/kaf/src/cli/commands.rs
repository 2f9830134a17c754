use crate::analysis::{
    count_params, derive_sigma_opt, kernel_approx_check, spectrum_compare, LayerDims, ModelFamily,
};
use crate::benchdata::{
    fit_poisson, load_cifar10_batch, load_mnist_pair, make_function_dataset, make_sincos_dataset,
    poisson_sine, solution_rmse, BenchmarkFn, Dataset, PdeTask, Split, TaskKind,
};
use crate::cli::checkpoint::{load_checkpoint, save_checkpoint};
use crate::cli::config::{ModelKind, RunConfig};
use crate::error::{Error, Result};
use crate::layers::{Layer, MlpActivation, Network};
use crate::numerics::{Matrix, RngState, Spectrum};
use crate::training::{fit, EpochRecord, Loss, Metric, TrainConfig};
use std::path::{Path, PathBuf};
use std::time::Instant;

/// A prepared supervised task: data plus the objective and architecture
/// endpoints it implies.
struct Prepared {
    split: Split,
    loss: Loss,
    metric: Metric,
    d_in: usize,
    d_out: usize,
    /// Input interval, used as the spline grid range for KAN models.
    input_range: (f64, f64),
}

enum TaskData {
    Supervised(Prepared),
    Pde(PdeTask),
}

fn domain_override(cfg: &RunConfig) -> Option<(f64, f64)> {
    match (cfg.domain_lo, cfg.domain_hi) {
        (Some(lo), Some(hi)) => Some((lo, hi)),
        _ => None,
    }
}

/// Resolves a benchmark-function task name, accepting `bessel` as shorthand.
fn lookup_task_fn(name: &str) -> Result<BenchmarkFn> {
    let canonical = if name == "bessel" { "bessel-j0" } else { name };
    BenchmarkFn::from_name(canonical)
}

fn require_data_dir(cfg: &RunConfig) -> Result<PathBuf> {
    match &cfg.data_dir {
        Some(d) => Ok(PathBuf::from(d)),
        None => Err(Error::Config(format!(
            "task `{}` needs the data_dir key (directory with the binary dataset files)",
            cfg.task
        ))),
    }
}

fn build_data(cfg: &RunConfig) -> Result<TaskData> {
    match cfg.task.as_str() {
        "poisson" => Ok(TaskData::Pde(poisson_sine())),
        "mnist" => {
            let dir = require_data_dir(cfg)?;
            let train = load_mnist_pair(
                dir.join("train-images-idx3-ubyte"),
                dir.join("train-labels-idx1-ubyte"),
            )?;
            let test = load_mnist_pair(
                dir.join("t10k-images-idx3-ubyte"),
                dir.join("t10k-labels-idx1-ubyte"),
            )?;
            let d_in = train.x.cols();
            Ok(TaskData::Supervised(Prepared {
                split: Split { train, test },
                loss: Loss::CrossEntropy,
                metric: Metric::Accuracy,
                d_in,
                d_out: 10,
                input_range: (0.0, 1.0),
            }))
        }
        "cifar10" => {
            let dir = require_data_dir(cfg)?;
            let train = load_cifar10_batch(dir.join("data_batch_1.bin"), None)?;
            let test = load_cifar10_batch(dir.join("test_batch.bin"), None)?;
            let d_in = train.x.cols();
            Ok(TaskData::Supervised(Prepared {
                split: Split { train, test },
                loss: Loss::CrossEntropy,
                metric: Metric::Accuracy,
                d_in,
                d_out: 10,
                input_range: (0.0, 1.0),
            }))
        }
        name => {
            let f = lookup_task_fn(name).map_err(|e| {
                Error::Config(format!("{e}; also valid: mnist, cifar10, poisson"))
            })?;
            let sincos = matches!(f, BenchmarkFn::Sin | BenchmarkFn::Cos);
            if sincos && domain_override(cfg).is_some() {
                return Err(Error::Config(
                    "sin/cos use the fixed equispaced-grid protocol; domain_lo/domain_hi \
                     do not apply"
                        .into(),
                ));
            }
            let range = domain_override(cfg).unwrap_or_else(|| f.default_domain());
            let split = if sincos {
                make_sincos_dataset(f)?
            } else {
                make_function_dataset(
                    f,
                    cfg.train_points,
                    cfg.test_points,
                    cfg.seed,
                    domain_override(cfg),
                )?
            };
            Ok(TaskData::Supervised(Prepared {
                split,
                loss: Loss::Mse,
                metric: Metric::Rmse,
                d_in: f.arity(),
                d_out: 1,
                input_range: range,
            }))
        }
    }
}

/// Builds the configured architecture with endpoints `d_in -> hidden -> d_out`
/// and applies the KAF-specific switches.
fn build_network(
    cfg: &RunConfig,
    d_in: usize,
    d_out: usize,
    input_range: (f64, f64),
    rng: &mut RngState,
) -> Result<Network> {
    let dims = [d_in, cfg.hidden, d_out];
    match cfg.model {
        ModelKind::Kaf => {
            let mut net = Network::kaf(&dims, cfg.grids, cfg.sigma_f, rng)?;
            for layer in &mut net.layers {
                if let Layer::Kaf(l) = layer {
                    l.use_layernorm = cfg.layernorm;
                    l.disable_gelu_path = cfg.disable_gelu;
                    l.disable_rff_path = cfg.disable_rff;
                    if cfg.disable_scales {
                        l.disable_scales = true;
                        l.a.iter_mut().for_each(|v| *v = 1.0);
                        l.b.iter_mut().for_each(|v| *v = 1.0);
                    }
                    if cfg.random_rff_init {
                        // Treat the frequency matrix like an ordinary weight
                        // matrix instead of using the spectral scale.
                        let bound = (6.0 / (l.d_in + l.m) as f64).sqrt();
                        for v in l.w_freq.as_mut_slice() {
                            *v = rng.uniform(-bound, bound);
                        }
                    }
                }
            }
            Ok(net)
        }
        ModelKind::Kan => Network::kan(&dims, cfg.grids, cfg.degree, input_range, rng),
        ModelKind::MlpGelu => Network::mlp(&dims, MlpActivation::Gelu, rng),
        ModelKind::MlpRelu => Network::mlp(&dims, MlpActivation::Relu, rng),
    }
}

fn train_config(cfg: &RunConfig, loss: Loss, metric: Metric) -> TrainConfig {
    TrainConfig {
        epochs: cfg.epochs,
        batch_size: cfg.batch_size,
        lr: cfg.lr,
        seed: cfg.seed,
        loss,
        metric,
        clip_tau: cfg.clip_tau,
        shuffle: true,
        eval_every: cfg.eval_every,
    }
}

fn prepare_out_dir(cfg: &RunConfig) -> Result<PathBuf> {
    let dir = PathBuf::from(&cfg.out_dir);
    std::fs::create_dir_all(&dir)?;
    cfg.write_resolved(&dir)?;
    Ok(dir)
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn write_metrics(path: &Path, records: &[EpochRecord]) -> Result<()> {
    let mut out = String::from("epoch,train_loss,eval_metric,mean_abs_a,mean_abs_b,seconds\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.epoch,
            r.train_loss,
            cell(r.eval_metric),
            cell(r.mean_abs_a),
            cell(r.mean_abs_b),
            r.seconds
        ));
    }
    std::fs::write(path, out)?;
    Ok(())
}

fn metric_name(m: Metric) -> &'static str {
    match m {
        Metric::Rmse => "rmse",
        Metric::Accuracy => "accuracy",
    }
}

pub fn cmd_fit(cfg: &RunConfig) -> Result<()> {
    let out = prepare_out_dir(cfg)?;
    match build_data(cfg)? {
        TaskData::Supervised(p) => {
            let mut rng = RngState::new(cfg.seed);
            let mut net = build_network(cfg, p.d_in, p.d_out, p.input_range, &mut rng)?;
            let tc = train_config(cfg, p.loss, p.metric);
            let report = fit(
                &mut net,
                &p.split.train.x,
                &p.split.train.y,
                &p.split.test.x,
                &p.split.test.y,
                &tc,
            )?;
            write_metrics(&out.join("metrics.csv"), &report.records)?;
            save_checkpoint(&out.join("model.ckpt"), &net)?;
            println!(
                "task={} model={} params={} final_{}={} best={} (epoch {}) wall={:.2}s",
                cfg.task,
                cfg.model,
                net.param_count_total(),
                metric_name(p.metric),
                report.final_metric,
                report.best_metric,
                report.best_epoch,
                report.wall_seconds
            );
        }
        TaskData::Pde(task) => {
            let mut rng = RngState::new(cfg.seed);
            let mut net = build_network(cfg, 1, 1, task.domain, &mut rng)?;
            let start = Instant::now();
            let history = fit_poisson(&mut net, &task, cfg.epochs, cfg.lr)?;
            let rmse =
                solution_rmse(&net, &task, |x| (std::f64::consts::PI * x).sin(), 201)?;
            let wall = start.elapsed().as_secs_f64();
            let records: Vec<EpochRecord> = history
                .iter()
                .enumerate()
                .map(|(epoch, &loss)| EpochRecord {
                    epoch,
                    train_loss: loss,
                    // Solution error is measured once after training.
                    eval_metric: (epoch + 1 == history.len()).then_some(rmse),
                    mean_abs_a: None,
                    mean_abs_b: None,
                    seconds: if epoch + 1 == history.len() { wall } else { 0.0 },
                })
                .collect();
            write_metrics(&out.join("metrics.csv"), &records)?;
            save_checkpoint(&out.join("model.ckpt"), &net)?;
            println!(
                "task=poisson model={} params={} final_residual={} solution_rmse={} wall={:.2}s",
                cfg.model,
                net.param_count_total(),
                history.last().unwrap(),
                rmse,
                wall
            );
        }
    }
    Ok(())
}

pub fn cmd_kernel_check(cfg: &RunConfig) -> Result<()> {
    let out = prepare_out_dir(cfg)?;
    let r = kernel_approx_check(
        cfg.kernel_m,
        cfg.kernel_sigma,
        cfg.kernel_d,
        cfg.kernel_pairs,
        cfg.seed,
    )?;
    let csv = format!(
        "m,sigma,d,n_pairs,sup_error,mean_error,diam,sigma_p\n{},{},{},{},{},{},{},{}\n",
        r.m, r.sigma, r.d, r.n_pairs, r.sup_error, r.mean_error, r.diam, r.sigma_p
    );
    std::fs::write(out.join("kernel_check.csv"), csv)?;
    println!(
        "m={} sigma={} d={} pairs={} sup_error={} mean_error={}",
        r.m, r.sigma, r.d, r.n_pairs, r.sup_error, r.mean_error
    );
    Ok(())
}

pub fn cmd_sigma_opt(cfg: &RunConfig) -> Result<()> {
    let out = prepare_out_dir(cfg)?;
    let r = derive_sigma_opt(cfg.sigma_n_mc, cfg.sigma_grid_spacing, cfg.sigma_grid_limit)?;
    let csv = format!(
        "alpha_opt,integral_s,integral_s2,n_mc,grid_spacing,grid_limit,window_std,half_width\n\
         {},{},{},{},{},{},{},{}\n",
        r.alpha_opt,
        r.integral_s,
        r.integral_s2,
        r.n_mc,
        r.grid_spacing,
        r.grid_limit,
        r.window_std,
        r.half_width
    );
    std::fs::write(out.join("sigma_opt.csv"), csv)?;
    println!(
        "alpha_opt={} integral_s={} integral_s2={}",
        r.alpha_opt, r.integral_s, r.integral_s2
    );
    Ok(())
}

fn family_of(cfg: &RunConfig) -> ModelFamily {
    match cfg.model {
        ModelKind::Kaf => ModelFamily::Kaf { m: cfg.grids },
        ModelKind::Kan => ModelFamily::Kan { g: cfg.grids, k: cfg.degree },
        ModelKind::MlpGelu | ModelKind::MlpRelu => ModelFamily::Mlp,
    }
}

pub fn cmd_params(cfg: &RunConfig) -> Result<()> {
    let out = prepare_out_dir(cfg)?;
    let family = family_of(cfg);
    let r = count_params(family, LayerDims { d_in: cfg.din, d_out: cfg.dout })?;
    let (grids, degree) = match family {
        ModelFamily::Kaf { m } => (m.to_string(), String::new()),
        ModelFamily::Kan { g, k } => (g.to_string(), k.to_string()),
        ModelFamily::Mlp => (String::new(), String::new()),
    };
    let csv = format!(
        "model,d_in,d_out,grids,degree,params_formula,params_actual,flops_formula\n\
         {},{},{},{},{},{},{},{}\n",
        cfg.model,
        cfg.din,
        cfg.dout,
        grids,
        degree,
        r.params_formula,
        r.params_actual,
        r.flops_formula
    );
    std::fs::write(out.join("params.csv"), csv)?;
    println!(
        "model={} {}x{}: params_formula={} params_actual={} flops_formula={}",
        cfg.model, cfg.din, cfg.dout, r.params_formula, r.params_actual, r.flops_formula
    );
    Ok(())
}

/// Equispaced scalar grid dataset for spectrum comparison.
fn spectrum_grid(cfg: &RunConfig) -> Result<(Dataset, (f64, f64))> {
    let f = lookup_task_fn(&cfg.task).map_err(|e| {
        Error::Config(format!("spectrum needs a benchmark function task: {e}"))
    })?;
    if f.arity() != 1 {
        return Err(Error::Config(format!(
            "spectrum needs a 1-d task, `{}` has {} inputs",
            cfg.task,
            f.arity()
        )));
    }
    if matches!(f, BenchmarkFn::Sin | BenchmarkFn::Cos) && domain_override(cfg).is_none() {
        let split = make_sincos_dataset(f)?;
        return Ok((split.train, f.default_domain()));
    }
    let (lo, hi) = domain_override(cfg).unwrap_or_else(|| f.default_domain());
    let n = cfg.train_points.max(2);
    let mut y = Matrix::zeros(n, 1);
    let x = Matrix::from_fn(n, 1, |r, _| lo + (hi - lo) * r as f64 / (n - 1) as f64);
    for r in 0..n {
        y.set(r, 0, f.eval(x.row(r))?);
    }
    Ok((Dataset { x, y, task: TaskKind::Regression }, (lo, hi)))
}

fn write_spectrum(path: &Path, s: &Spectrum) -> Result<()> {
    let mut out = String::new();
    for (f, m) in s.frequencies.iter().zip(&s.magnitudes) {
        out.push_str(&format!("{f} {m}\n"));
    }
    std::fs::write(path, out)?;
    Ok(())
}

pub fn cmd_spectrum(cfg: &RunConfig) -> Result<()> {
    let out = prepare_out_dir(cfg)?;
    let (data, range) = spectrum_grid(cfg)?;
    let mut rng = RngState::new(cfg.seed);
    let mut net = build_network(cfg, 1, 1, range, &mut rng)?;
    if let Some(p) = &cfg.checkpoint {
        load_checkpoint(Path::new(p), &mut net)?;
    }
    let cmp = spectrum_compare(&net, &data)?;
    write_spectrum(&out.join("spectrum_model.txt"), &cmp.model)?;
    write_spectrum(&out.join("spectrum_truth.txt"), &cmp.truth)?;
    println!(
        "peak_bin_model={} (f={}) peak_bin_truth={} (f={}) peak_match={}",
        cmp.peak_bin_model,
        cmp.model.frequencies[cmp.peak_bin_model],
        cmp.peak_bin_truth,
        cmp.truth.frequencies[cmp.peak_bin_truth],
        cmp.peak_match
    );
    Ok(())
}

struct AblateRow {
    strategy: String,
    sigma_f: f64,
    grids: usize,
    params: usize,
    final_rmse: f64,
    best_rmse: f64,
}

fn ablate_variants(cfg: &RunConfig) -> Vec<(String, RunConfig)> {
    // Each row starts from a clean full model so switches do not compound.
    let mut base = cfg.clone();
    base.model = ModelKind::Kaf;
    base.disable_gelu = false;
    base.disable_rff = false;
    base.disable_scales = false;
    base.random_rff_init = false;

    let mut rows = Vec::new();
    rows.push(("full".to_string(), base.clone()));
    let mut v = base.clone();
    v.disable_gelu = true;
    rows.push(("no-gelu".to_string(), v));
    let mut v = base.clone();
    v.disable_rff = true;
    rows.push(("no-rff".to_string(), v));
    let mut v = base.clone();
    v.disable_scales = true;
    rows.push(("no-scales".to_string(), v));
    let mut v = base.clone();
    v.random_rff_init = true;
    rows.push(("random-rff-init".to_string(), v));
    for &s in &cfg.sigma_sweep {
        let mut v = base.clone();
        v.sigma_f = s;
        rows.push((format!("sigma-{s}"), v));
    }
    for &m in &cfg.m_sweep {
        let mut v = base.clone();
        v.grids = m;
        rows.push((format!("grids-{m}"), v));
    }
    rows
}

fn run_variant(name: &str, vcfg: &RunConfig, p: &Prepared) -> Result<AblateRow> {
    let mut rng = RngState::new(vcfg.seed);
    let mut net = build_network(vcfg, p.d_in, p.d_out, p.input_range, &mut rng)?;
    let tc = train_config(vcfg, p.loss, p.metric);
    let report = fit(
        &mut net,
        &p.split.train.x,
        &p.split.train.y,
        &p.split.test.x,
        &p.split.test.y,
        &tc,
    )?;
    Ok(AblateRow {
        strategy: name.to_string(),
        sigma_f: vcfg.sigma_f,
        grids: vcfg.grids,
        params: net.param_count_total(),
        final_rmse: report.final_metric,
        best_rmse: report.best_metric,
    })
}

pub fn cmd_ablate(cfg: &RunConfig) -> Result<()> {
    let out = prepare_out_dir(cfg)?;
    let p = match build_data(cfg)? {
        TaskData::Supervised(p) if matches!(p.loss, Loss::Mse) => p,
        _ => {
            return Err(Error::Config(format!(
                "ablate needs a regression benchmark task, got `{}`",
                cfg.task
            )))
        }
    };
    let variants = ablate_variants(cfg);
    let results: Vec<Result<AblateRow>> = if cfg.parallel {
        std::thread::scope(|scope| {
            let handles: Vec<_> = variants
                .iter()
                .map(|(name, vcfg)| scope.spawn(|| run_variant(name, vcfg, &p)))
                .collect();
            handles
                .into_iter()
                .map(|h| {
                    h.join()
                        .unwrap_or_else(|_| Err(Error::Contract("ablation worker panicked".into())))
                })
                .collect()
        })
    } else {
        variants
            .iter()
            .map(|(name, vcfg)| run_variant(name, vcfg, &p))
            .collect()
    };

    let mut csv = String::from("strategy,sigma_f,grids,params,final_rmse,best_rmse\n");
    println!(
        "{:<18} {:>8} {:>6} {:>8} {:>14} {:>14}",
        "strategy", "sigma_f", "grids", "params", "final_rmse", "best_rmse"
    );
    for row in results {
        let r = row?;
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.strategy, r.sigma_f, r.grids, r.params, r.final_rmse, r.best_rmse
        ));
        println!(
            "{:<18} {:>8} {:>6} {:>8} {:>14.6e} {:>14.6e}",
            r.strategy, r.sigma_f, r.grids, r.params, r.final_rmse, r.best_rmse
        );
    }
    std::fs::write(out.join("ablate.csv"), csv)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg_in(dir: &Path) -> RunConfig {
        let mut cfg = RunConfig::default();
        cfg.out_dir = dir.join("out").to_string_lossy().into_owned();
        cfg
    }

    #[test]
    fn fit_writes_all_artifacts() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = cfg_in(dir.path());
        cfg.task = "simple-product".into();
        cfg.hidden = 4;
        cfg.grids = 2;
        cfg.epochs = 3;
        cfg.train_points = 32;
        cfg.test_points = 16;
        cmd_fit(&cfg).unwrap();
        let out = PathBuf::from(&cfg.out_dir);
        for f in ["metrics.csv", "model.ckpt", "config.resolved"] {
            assert!(out.join(f).is_file(), "missing {f}");
        }
        let metrics = std::fs::read_to_string(out.join("metrics.csv")).unwrap();
        let mut lines = metrics.lines();
        assert_eq!(
            lines.next().unwrap(),
            "epoch,train_loss,eval_metric,mean_abs_a,mean_abs_b,seconds"
        );
        assert_eq!(lines.count(), 3);
    }

    #[test]
    fn missing_data_dir_names_the_key() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = cfg_in(dir.path());
        cfg.task = "cifar10".into();
        let err = cmd_fit(&cfg).unwrap_err();
        assert!(err.to_string().contains("data_dir"), "{err}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn unknown_task_lists_alternatives() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = cfg_in(dir.path());
        cfg.task = "sudoku".into();
        let err = cmd_fit(&cfg).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("sudoku") && msg.contains("poisson"), "{msg}");
    }

    #[test]
    fn task_and_model_shorthands_resolve() {
        assert_eq!(lookup_task_fn("bessel").unwrap(), BenchmarkFn::BesselJ0);
        assert_eq!(ModelKind::parse("mlp").unwrap(), ModelKind::MlpGelu);
    }

    #[test]
    fn params_reports_the_worked_example() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = cfg_in(dir.path());
        cfg.grids = 9;
        cfg.din = 4;
        cfg.dout = 4;
        cmd_params(&cfg).unwrap();
        let csv = std::fs::read_to_string(PathBuf::from(&cfg.out_dir).join("params.csv")).unwrap();
        assert!(csv.contains("kaf,4,4,9,,73,145,204"), "{csv}");
    }

    #[test]
    fn ablate_grid_runs_every_strategy() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = cfg_in(dir.path());
        cfg.task = "simple-product".into();
        cfg.hidden = 3;
        cfg.grids = 2;
        cfg.epochs = 2;
        cfg.train_points = 24;
        cfg.test_points = 12;
        cfg.sigma_sweep = vec![0.5, 2.0];
        cfg.m_sweep = vec![2, 3];
        cmd_ablate(&cfg).unwrap();
        let csv = std::fs::read_to_string(PathBuf::from(&cfg.out_dir).join("ablate.csv")).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        // header + 5 fixed strategies + 2 sigma rows + 2 grids rows
        assert_eq!(lines.len(), 10, "{csv}");
        for s in ["full", "no-gelu", "no-rff", "no-scales", "random-rff-init", "sigma-0.5", "grids-3"] {
            assert!(csv.contains(s), "missing row {s}");
        }
    }

    #[test]
    fn parallel_ablate_matches_sequential_output() {
        let dir = tempfile::tempdir().unwrap();
        let run = |parallel: bool, sub: &str| {
            let mut cfg = cfg_in(&dir.path().join(sub));
            cfg.task = "simple-product".into();
            cfg.hidden = 3;
            cfg.grids = 2;
            cfg.epochs = 2;
            cfg.train_points = 16;
            cfg.test_points = 8;
            cfg.sigma_sweep = vec![1.0];
            cfg.m_sweep = vec![2];
            cfg.parallel = parallel;
            cmd_ablate(&cfg).unwrap();
            std::fs::read_to_string(PathBuf::from(&cfg.out_dir).join("ablate.csv")).unwrap()
        };
        assert_eq!(run(false, "seq"), run(true, "par"));
    }

    #[test]
    fn spectrum_writes_two_column_files() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = cfg_in(dir.path());
        cfg.task = "oscillating-decay".into();
        cfg.hidden = 4;
        cfg.grids = 2;
        cfg.train_points = 64;
        cmd_spectrum(&cfg).unwrap();
        let out = PathBuf::from(&cfg.out_dir);
        for f in ["spectrum_model.txt", "spectrum_truth.txt"] {
            let text = std::fs::read_to_string(out.join(f)).unwrap();
            assert_eq!(text.lines().count(), 33); // 64-sample grid -> 33 bins
            for line in text.lines() {
                assert_eq!(line.split_whitespace().count(), 2);
            }
        }
    }

    #[test]
    fn poisson_fit_writes_solution_error_on_last_row() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = cfg_in(dir.path());
        cfg.task = "poisson".into();
        cfg.model = ModelKind::MlpGelu;
        cfg.hidden = 8;
        cfg.epochs = 5;
        cfg.lr = 1e-3;
        cmd_fit(&cfg).unwrap();
        let metrics =
            std::fs::read_to_string(PathBuf::from(&cfg.out_dir).join("metrics.csv")).unwrap();
        let lines: Vec<&str> = metrics.lines().collect();
        assert_eq!(lines.len(), 6);
        let last: Vec<&str> = lines[5].split(',').collect();
        assert!(!last[2].is_empty(), "{metrics}"); // final solution RMSE
        let mid: Vec<&str> = lines[2].split(',').collect();
        assert!(mid[2].is_empty());
    }
}
