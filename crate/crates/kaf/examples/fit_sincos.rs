//! Trains the Fourier-feature network and two MLP baselines on sin(x) and
//! cos(x) sampled over many periods, then checks that the trained Fourier
//! net reproduces the dominant frequency of the target.
//!
//! Usage: `cargo run --release -p kaf --example fit_sincos [epochs]`

use kaf::prelude::*;

fn train(net: &mut Network, split: &Split, epochs: usize) -> Result<RunReport> {
    let cfg = TrainConfig {
        epochs,
        batch_size: 100,
        lr: 1e-3,
        seed: 0,
        loss: Loss::Mse,
        metric: Metric::Rmse,
        clip_tau: None,
        shuffle: true,
        eval_every: (epochs / 10).max(1),
    };
    fit(
        net,
        &split.train.x,
        &split.train.y,
        &split.test.x,
        &split.test.y,
        &cfg,
    )
}

fn main() -> Result<()> {
    let epochs: usize = std::env::args()
        .nth(1)
        .map(|s| s.parse().map_err(|_| Error::Param(format!("bad epoch count `{s}`"))))
        .transpose()?
        .unwrap_or(1000);

    for f in [BenchmarkFn::Sin, BenchmarkFn::Cos] {
        let split = make_sincos_dataset(f)?;
        println!(
            "{}(x), {} train / {} test points, hidden width 64, {epochs} epochs, \
             lr 1e-3, batch 100",
            f.name(),
            split.train.x.rows(),
            split.test.x.rows()
        );

        let mut results = Vec::new();
        for (label, mut net) in [
            ("kaf m=8", Network::kaf(&[1, 64, 1], 8, 1.64, &mut RngState::new(0))?),
            ("mlp-gelu", Network::mlp(&[1, 64, 1], MlpActivation::Gelu, &mut RngState::new(0))?),
            ("mlp-relu", Network::mlp(&[1, 64, 1], MlpActivation::Relu, &mut RngState::new(0))?),
        ] {
            let report = train(&mut net, &split, epochs)?;
            println!(
                "  {label:<10} params {:>5}  test rmse {:.5e}  ({:.1}s)",
                net.param_count_total(),
                report.final_metric,
                report.wall_seconds
            );
            results.push((label, net, report.final_metric));
        }

        let (_, kaf_net, kaf_rmse) = &results[0];
        let beats_both = results[1..].iter().all(|(_, _, r)| kaf_rmse < r);
        println!("  kaf beats both MLPs: {beats_both}");

        let cmp = spectrum_compare(kaf_net, &split.train)?;
        println!(
            "  spectrum peak: model bin {} ({:.4} cycles/unit) vs truth bin {} ({:.4}) -> match={}\n",
            cmp.peak_bin_model,
            cmp.model.frequencies[cmp.peak_bin_model],
            cmp.peak_bin_truth,
            cmp.truth.frequencies[cmp.peak_bin_truth],
            cmp.peak_match
        );
    }
    Ok(())
}
