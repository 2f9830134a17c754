//! Compares every analytical gradient against central finite differences for
//! all three layer families, across several random configurations.

use kaf::layers::finite_difference_max_rel_error;
use kaf::prelude::*;

fn check(label: &str, mut build: impl FnMut(&mut RngState) -> Result<Network>) -> Result<f64> {
    let mut worst = 0.0f64;
    for seed in 0..8 {
        let mut rng = RngState::new(seed);
        let mut net = build(&mut rng)?;
        let x = Matrix::from_fn(5, net.d_in(), |r, c| {
            0.3 * ((r * 7 + c * 3 + seed as usize) as f64).sin()
        });
        let probe = Matrix::from_fn(5, net.d_out(), |r, c| {
            0.5 * ((r + 2 * c) as f64).cos()
        });
        let err = finite_difference_max_rel_error(&mut net, &x, &probe, 1e-6)?;
        worst = worst.max(err);
    }
    println!("{label:<28} max relative error {worst:.3e}");
    Ok(worst)
}

fn main() -> Result<()> {
    println!("analytic vs central finite-difference gradients (8 seeds each)\n");
    let mut worst = 0.0f64;
    worst = worst.max(check("kaf [3,4,2] m=5", |rng| Network::kaf(&[3, 4, 2], 5, 1.64, rng))?);
    worst = worst.max(check("kaf [2,3] m=3 layernorm", |rng| {
        let mut net = Network::kaf(&[2, 3], 3, 1.64, rng)?;
        if let Layer::Kaf(l) = &mut net.layers[0] {
            l.use_layernorm = true;
        }
        Ok(net)
    })?);
    worst = worst.max(check("kan [3,4,2] g=5 k=3", |rng| {
        Network::kan(&[3, 4, 2], 5, 3, (-2.0, 2.0), rng)
    })?);
    worst = worst.max(check("mlp-gelu [3,8,2]", |rng| {
        Network::mlp(&[3, 8, 2], MlpActivation::Gelu, rng)
    })?);
    worst = worst.max(check("mlp-relu [3,8,2]", |rng| {
        Network::mlp(&[3, 8, 2], MlpActivation::Relu, rng)
    })?);

    let ok = worst < 1e-4;
    println!("\noverall worst {worst:.3e} -> {}", if ok { "OK (< 1e-4)" } else { "FAILED" });
    Ok(())
}
