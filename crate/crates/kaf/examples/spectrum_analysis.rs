//! Trains a small Fourier-feature net on an oscillatory 1-d target, then
//! compares the discrete Fourier magnitudes of the model's predictions with
//! those of the true samples on the same equispaced grid.
//!
//! Usage: `cargo run --release -p kaf --example spectrum_analysis [epochs]`

use kaf::prelude::*;

fn grid_dataset(f: BenchmarkFn, n: usize) -> Result<Dataset> {
    let (lo, hi) = f.default_domain();
    let x = Matrix::from_fn(n, 1, |r, _| lo + (hi - lo) * r as f64 / (n - 1) as f64);
    let mut y = Matrix::zeros(n, 1);
    for r in 0..n {
        y.set(r, 0, f.eval(x.row(r))?);
    }
    Ok(Dataset { x, y, task: TaskKind::Regression })
}

fn top_bins(s: &Spectrum, k: usize) -> Vec<(usize, f64, f64)> {
    let mut idx: Vec<usize> = (0..s.magnitudes.len()).collect();
    idx.sort_by(|&a, &b| s.magnitudes[b].total_cmp(&s.magnitudes[a]));
    idx.into_iter()
        .take(k)
        .map(|i| (i, s.frequencies[i], s.magnitudes[i]))
        .collect()
}

fn main() -> Result<()> {
    let epochs: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(1500);

    let f = BenchmarkFn::BesselJ0;
    let data = grid_dataset(f, 256)?;
    let mut rng = RngState::new(1);
    let mut net = Network::kaf(&[1, 32, 1], 8, 1.64, &mut rng)?;

    let cfg = TrainConfig {
        epochs,
        batch_size: 64,
        lr: 1e-3,
        seed: 1,
        loss: Loss::Mse,
        metric: Metric::Rmse,
        clip_tau: None,
        shuffle: true,
        eval_every: epochs.max(1),
    };
    let report = fit(&mut net, &data.x, &data.y, &data.x, &data.y, &cfg)?;
    println!(
        "{} on its default domain, 256-point grid, {epochs} epochs -> train-grid rmse {:.4e}\n",
        f.name(),
        report.final_metric
    );

    let cmp = spectrum_compare(&net, &data)?;
    println!("top spectral bins (frequency in cycles/unit):");
    println!("{:<26} {:<26}", "model", "truth");
    let (tm, tt) = (top_bins(&cmp.model, 5), top_bins(&cmp.truth, 5));
    for (m, t) in tm.iter().zip(&tt) {
        println!(
            "bin {:>3} f={:>6.3} |{:>7.4}   bin {:>3} f={:>6.3} |{:>7.4}",
            m.0, m.1, m.2, t.0, t.1, t.2
        );
    }
    println!(
        "\npeak bins: model {} vs truth {} -> match={}",
        cmp.peak_bin_model, cmp.peak_bin_truth, cmp.peak_match
    );
    println!(
        "energy within one bin of the truth peak: model {:.3}, truth {:.3}",
        cmp.model.energy_fraction_near(cmp.peak_bin_truth, 1),
        cmp.truth.energy_fraction_near(cmp.peak_bin_truth, 1)
    );
    Ok(())
}
