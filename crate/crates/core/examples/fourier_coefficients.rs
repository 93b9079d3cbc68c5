// Stochastic Fourier coefficients of `dX` and of `dW` on one path.

use sfc_lab::brownian::{sample_path, SeedSpec};
use sfc_lab::catalog::{eval_functionals, Drift, DetFn, ProcessKind, ProcessSpec, TrigPoly};
use sfc_lab::grid::make_grid;
use sfc_lab::sfc::{sfc_range, wiener_sfc_range};

pub fn run_example() -> sfc_lab::Result<()> {
    let grid = make_grid(2048)?;
    let path = sample_path(SeedSpec::new(3, 0), &grid);
    let spec = ProcessSpec {
        kind: ProcessKind::NoncausalW1,
        f: None,
        drift: Drift::Deterministic { g: DetFn::Trig(TrigPoly::cosine(2, 1.0)) },
    };
    let pf = eval_functionals(&spec, &path)?;
    let fx = sfc_range(&pf, 3)?;
    let fw = wiener_sfc_range(&path, 3)?;
    for (n, z) in fx.iter() {
        println!("n = {n:+}  F_n(dX) = {:+.5}{:+.5}i   F_n(dW) = {:+.5}{:+.5}i", z.re, z.im, fw.at(n).re, fw.at(n).im);
    }
    // dW is real, so F_{-n} is the conjugate of F_n.
    assert!((fw.at(-2) - fw.at(2).conj()).norm() < 1e-12);
    Ok(())
}

fn main() -> sfc_lab::Result<()> {
    run_example()
}
