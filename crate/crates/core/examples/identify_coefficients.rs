// Bohr-product estimates of the Fourier coefficients of a noncausal `a`
// against the truth, and the synthesized `â(t)`.

use sfc_lab::bohr::{identify_a, synthesize, BohrConfig};
use sfc_lab::brownian::{sample_path, SeedSpec};
use sfc_lab::catalog::{eval_functionals, true_fourier_a, Drift, ProcessKind, ProcessSpec};
use sfc_lab::grid::make_grid;

pub fn run_example() -> sfc_lab::Result<()> {
    let grid = make_grid(4096)?;
    let spec = ProcessSpec { kind: ProcessKind::NoncausalMidpoint, f: None, drift: Drift::None };
    let path = sample_path(SeedSpec::new(11, 0), &grid);
    let pf = eval_functionals(&spec, &path)?;
    for order in [8, 64, 256] {
        let a_hat = identify_a(&pf, &BohrConfig::new(order, 2))?;
        let err: f64 = (-2..=2)
            .map(|n| Ok((a_hat.at(n) - true_fourier_a(&spec, &path, n)?.value).norm_sqr()))
            .sum::<sfc_lab::Result<f64>>()?
            .sqrt();
        println!(
            "N = {order:>3}: â(0.3) = {:+.4}, coefficient error = {err:.4}",
            synthesize(&a_hat, 0.3).re
        );
    }
    println!("W(1/2) = {:+.4}", path.values()[2048]);
    Ok(())
}

fn main() -> sfc_lab::Result<()> {
    run_example()
}
