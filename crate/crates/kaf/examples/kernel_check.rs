//! Measures how well random Fourier features approximate the Gaussian kernel
//! exp(-|x-y|^2 / 2 sigma^2), and how the error shrinks as features are added.

use kaf::analysis::KernelCheckReport;
use kaf::prelude::*;

fn main() -> Result<()> {
    let (sigma, d, pairs, seed) = (1.0, 4, 200, 42);
    println!("gaussian kernel, sigma={sigma}, d={d}, {pairs} point pairs in [-1,1]^{d}\n");
    println!("{:>6} {:>12} {:>12}", "m", "sup_error", "mean_error");

    let mut reports: Vec<KernelCheckReport> = Vec::new();
    for m in [256, 1024, 4096, 16384] {
        let r = kernel_approx_check(m, sigma, d, pairs, seed)?;
        println!("{:>6} {:>12.5} {:>12.5}", r.m, r.sup_error, r.mean_error);
        reports.push(r);
    }

    println!("\nmean-error ratio when m quadruples (expected near 1/2):");
    for w in reports.windows(2) {
        println!(
            "  m {:>5} -> {:>5}: {:.3}",
            w[0].m,
            w[1].m,
            w[1].mean_error / w[0].mean_error
        );
    }

    let last = reports.last().unwrap();
    println!(
        "\nuniform-error concentration bound: ~{:.2e} samples for eps=0.1 \
         (diam={:.3}, sigma_p={})",
        last.concentration_samples(0.1),
        last.diam,
        last.sigma_p
    );
    Ok(())
}
