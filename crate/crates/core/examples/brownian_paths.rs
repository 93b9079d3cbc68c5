// Seeded Brownian paths: reproducibility per (seed, index) and a left-point
// Wiener integral checked against the isometry.

use num_complex::Complex64;
use sfc_lab::brownian::{sample_path, wiener_integral, SeedSpec};
use sfc_lab::grid::make_grid;

pub fn run_example() -> sfc_lab::Result<()> {
    let grid = make_grid(1024)?;
    let a = sample_path(SeedSpec::new(42, 7), &grid);
    let b = sample_path(SeedSpec::new(42, 7), &grid);
    assert_eq!(a.values(), b.values());
    println!("W(1/2) = {:.6}, W(1) = {:.6}", a.values()[512], a.terminal());

    // ∫ t dW has variance ∫ t² dt = 1/3.
    let f: Vec<Complex64> = grid.left_nodes().iter().map(|&t| Complex64::new(t, 0.0)).collect();
    let paths = 4000;
    let mut second = 0.0;
    for i in 0..paths {
        let p = sample_path(SeedSpec::new(42, i), &grid);
        second += wiener_integral(&p, &f)?.norm_sqr();
    }
    println!("E|∫ t dW|^2 ≈ {:.4} (exact 1/3)", second / paths as f64);
    Ok(())
}

fn main() -> sfc_lab::Result<()> {
    run_example()
}
