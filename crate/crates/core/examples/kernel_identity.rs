// The Dirichlet kernel on a grid: values, closed form, and the L² identity
// `∫|K_N|² = 2N + 1`.

use sfc_lab::grid::{dirichlet_closed_form, dirichlet_kernel, kernel_l2_identity, make_grid};

pub fn run_example() -> sfc_lab::Result<()> {
    for x in [0.0, 0.1, 0.25, 0.5] {
        println!(
            "K_5({x:<4}) sum = {:>9.5}  closed form = {:>9.5}",
            dirichlet_kernel(5, x).re,
            dirichlet_closed_form(5, x)
        );
    }
    for order in [1, 5, 32] {
        let grid = make_grid(4 * order + 4)?;
        let v = kernel_l2_identity(order, &grid)?;
        println!("N = {order:>2}, m = {:>3}: mean |K_N|^2 = {v}", grid.m());
        assert!((v - (2 * order + 1) as f64).abs() < 1e-9);
    }
    Ok(())
}

fn main() -> sfc_lab::Result<()> {
    run_example()
}
