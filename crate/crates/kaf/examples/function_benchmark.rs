//! Function-approximation suite: the Fourier-feature network versus a
//! parameter-matched GELU MLP on ten closed-form targets, median test RMSE
//! over several seeds.
//!
//! Usage: `cargo run --release -p kaf --example function_benchmark \
//!         [epochs] [seeds] [hidden]` (defaults 300 1 16; the full protocol
//!         is 1000 epochs, 3 seeds)

use kaf::prelude::*;

const M: usize = 8;

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(|a, b| a.total_cmp(b));
    let n = xs.len();
    if n % 2 == 1 { xs[n / 2] } else { 0.5 * (xs[n / 2 - 1] + xs[n / 2]) }
}

/// MLP hidden width whose [d, h', 1] parameter count best matches `target`.
fn matched_mlp_hidden(d: usize, target: usize) -> usize {
    (((target - 1) as f64) / (d + 2) as f64).round().max(1.0) as usize
}

fn run(net: &mut Network, split: &Split, epochs: usize, seed: u64) -> Result<f64> {
    let cfg = TrainConfig {
        epochs,
        batch_size: 100,
        lr: 1e-3,
        seed,
        loss: Loss::Mse,
        metric: Metric::Rmse,
        clip_tau: None,
        shuffle: true,
        eval_every: epochs.max(1),
    };
    Ok(fit(net, &split.train.x, &split.train.y, &split.test.x, &split.test.y, &cfg)?
        .final_metric)
}

fn main() -> Result<()> {
    let mut args = std::env::args().skip(1);
    let mut next = |default: usize| -> usize {
        args.next().and_then(|s| s.parse().ok()).unwrap_or(default)
    };
    let (epochs, seeds, hidden) = (next(300), next(1), next(16));

    let suite: Vec<BenchmarkFn> = BenchmarkFn::all()
        .into_iter()
        .filter(|f| !matches!(f, BenchmarkFn::Sin | BenchmarkFn::Cos))
        .collect();

    println!(
        "{} functions, {epochs} epochs, {seeds} seed(s), kaf [d,{hidden},1] m={M} \
         vs parameter-matched gelu MLP\n",
        suite.len()
    );
    println!(
        "{:<18} {:>2} {:>7} {:>7} {:>12} {:>12} {:>8}",
        "function", "d", "kaf_p", "mlp_p", "kaf_rmse", "mlp_rmse", "mlp/kaf"
    );

    let mut wins = 0;
    for f in &suite {
        let d = f.arity();
        let mut kaf_rmse = Vec::new();
        let mut mlp_rmse = Vec::new();
        let mut kaf_params = 0;
        let mut mlp_params = 0;
        for seed in 0..seeds as u64 {
            let split = make_function_dataset(*f, 1000, 1000, seed, None)?;
            let mut kaf_net = Network::kaf(&[d, hidden, 1], M, 1.64, &mut RngState::new(seed))?;
            kaf_params = kaf_net.param_count_total();
            let h2 = matched_mlp_hidden(d, kaf_params);
            let mut mlp_net =
                Network::mlp(&[d, h2, 1], MlpActivation::Gelu, &mut RngState::new(seed))?;
            mlp_params = mlp_net.param_count_total();
            kaf_rmse.push(run(&mut kaf_net, &split, epochs, seed)?);
            mlp_rmse.push(run(&mut mlp_net, &split, epochs, seed)?);
        }
        let (k, m) = (median(kaf_rmse), median(mlp_rmse));
        if k <= m {
            wins += 1;
        }
        println!(
            "{:<18} {:>2} {:>7} {:>7} {:>12.4e} {:>12.4e} {:>8.2}",
            f.name(),
            d,
            kaf_params,
            mlp_params,
            k,
            m,
            m / k
        );
    }
    println!("\nkaf median <= mlp median on {wins}/{} functions", suite.len());
    Ok(())
}
