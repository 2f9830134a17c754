//! Solves -u'' = pi^2 sin(pi x) on [0,1] with zero boundaries by collocation:
//! the network residual is differentiated twice by central finite differences
//! and minimized together with the boundary penalty. Exact solution sin(pi x).
//!
//! Usage: `cargo run --release -p kaf --example poisson_pde [epochs]`

use kaf::benchdata::{fit_poisson, poisson_sine, solution_rmse};
use kaf::prelude::*;
use std::f64::consts::PI;

fn main() -> Result<()> {
    let epochs: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(2000);

    let task = poisson_sine();
    let mut rng = RngState::new(0);
    let mut net = Network::kaf(&[1, 16, 1], 8, 1.64, &mut rng)?;
    println!(
        "collocation points: {}, params: {}, epochs: {epochs}",
        task.n_collocation,
        net.param_count_total()
    );

    let history = fit_poisson(&mut net, &task, epochs, 1e-3)?;
    for (epoch, loss) in history.iter().enumerate() {
        if epoch % (epochs / 10).max(1) == 0 || epoch + 1 == history.len() {
            println!("  epoch {epoch:>5}  residual loss {loss:.5e}");
        }
    }

    let rmse = solution_rmse(&net, &task, |x| (PI * x).sin(), 201)?;
    println!("\nsolution RMSE vs sin(pi x) on a 201-point grid: {rmse:.5e}");

    println!("\n{:>6} {:>12} {:>12}", "x", "u(x)", "sin(pi x)");
    for i in 0..=8 {
        let x = i as f64 / 8.0;
        let u = net.predict(&Matrix::from_vec(1, 1, vec![x])?)?.get(0, 0);
        println!("{x:>6.3} {u:>12.6} {:>12.6}", (PI * x).sin());
    }
    Ok(())
}
