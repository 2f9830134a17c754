//! Ablation grid on the high-frequency-sum target: disable each path of the
//! layer in turn, replace the spectral frequency init with a generic uniform
//! one, and sweep the frequency scale.
//!
//! Usage: `cargo run --release -p kaf --example ablation [epochs] [seeds]`
//! (defaults 300 1; the full protocol uses 1000 epochs, 3 seeds)

use kaf::layers::KafLayer;
use kaf::prelude::*;

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(|a, b| a.total_cmp(b));
    let n = xs.len();
    if n % 2 == 1 { xs[n / 2] } else { 0.5 * (xs[n / 2 - 1] + xs[n / 2]) }
}

struct Variant {
    name: &'static str,
    sigma_f: f64,
    tweak: fn(&mut KafLayer, &mut RngState),
}

fn no_tweak(_: &mut KafLayer, _: &mut RngState) {}

fn main() -> Result<()> {
    let mut args = std::env::args().skip(1);
    let mut next = |default: usize| -> usize {
        args.next().and_then(|s| s.parse().ok()).unwrap_or(default)
    };
    let (epochs, seeds) = (next(300), next(1));
    let (hidden, m) = (16, 8);

    let variants = [
        Variant { name: "full", sigma_f: 1.64, tweak: no_tweak },
        Variant { name: "no-gelu", sigma_f: 1.64, tweak: |l, _| l.disable_gelu_path = true },
        Variant { name: "no-rff", sigma_f: 1.64, tweak: |l, _| l.disable_rff_path = true },
        Variant { name: "no-scales", sigma_f: 1.64, tweak: |l, _| l.disable_scales = true },
        Variant {
            name: "random-rff-init",
            sigma_f: 1.64,
            tweak: |l, rng| {
                let bound = (6.0 / (l.d_in + l.m) as f64).sqrt();
                for v in l.w_freq.as_mut_slice() {
                    *v = rng.uniform(-bound, bound);
                }
            },
        },
        Variant { name: "sigma-0.1", sigma_f: 0.1, tweak: no_tweak },
        Variant { name: "sigma-1.64", sigma_f: 1.64, tweak: no_tweak },
        Variant { name: "sigma-3", sigma_f: 3.0, tweak: no_tweak },
    ];

    println!(
        "high-freq-sum, kaf [1,{hidden},1] m={m}, {epochs} epochs, {seeds} seed(s)\n"
    );
    println!("{:<18} {:>8} {:>14} {:>14}", "variant", "sigma_f", "final_rmse", "best_rmse");

    for v in &variants {
        let mut finals = Vec::new();
        let mut bests = Vec::new();
        for seed in 0..seeds as u64 {
            let split = make_function_dataset(BenchmarkFn::HighFreqSum, 1000, 1000, seed, None)?;
            let mut rng = RngState::new(seed);
            let mut net = Network::kaf(&[1, hidden, 1], m, v.sigma_f, &mut rng)?;
            for layer in &mut net.layers {
                if let Layer::Kaf(l) = layer {
                    (v.tweak)(l, &mut rng);
                }
            }
            let cfg = TrainConfig {
                epochs,
                batch_size: 100,
                lr: 1e-3,
                seed,
                loss: Loss::Mse,
                metric: Metric::Rmse,
                clip_tau: None,
                shuffle: true,
                eval_every: (epochs / 10).max(1),
            };
            let report = fit(
                &mut net,
                &split.train.x,
                &split.train.y,
                &split.test.x,
                &split.test.y,
                &cfg,
            )?;
            finals.push(report.final_metric);
            bests.push(report.best_metric);
        }
        println!(
            "{:<18} {:>8} {:>14.5e} {:>14.5e}",
            v.name,
            v.sigma_f,
            median(finals),
            median(bests)
        );
    }
    Ok(())
}
