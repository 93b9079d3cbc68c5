// Every catalog process evaluated on one path: `a`, `b`, `X` at t = 1 and the
// true Fourier coefficients of `a`.

use sfc_lab::brownian::{sample_path, SeedSpec};
use sfc_lab::catalog::{
    eval_functionals, make_process, true_fourier_a, DetFn, Drift, ProcessKind, ProcessParams, TrigPoly,
};
use sfc_lab::grid::make_grid;

pub fn run_example() -> sfc_lab::Result<()> {
    let grid = make_grid(512)?;
    let path = sample_path(SeedSpec::new(1, 0), &grid);
    println!("W(1) = {:.5}", path.terminal());
    for kind in ProcessKind::ALL {
        let mut params = ProcessParams::default()
            .with_drift(Drift::Deterministic { g: DetFn::Trig(TrigPoly::cosine(1, 1.0)) });
        if kind == ProcessKind::Det {
            params = params.with_f(DetFn::Trig(TrigPoly::sine(2, 0.5)));
        }
        let spec = make_process(kind, params)?;
        let pf = eval_functionals(&spec, &path)?;
        let a0 = true_fourier_a(&spec, &path, 0)?;
        println!(
            "{:<18} a(1/2) = {:+.4}  X(1) = {:+.4}  a_0 = {:+.4}{}",
            kind,
            pf.a[256],
            pf.x[512],
            a0.value.re,
            if a0.exact { "" } else { " (quadrature)" }
        );
    }
    Ok(())
}

fn main() -> sfc_lab::Result<()> {
    run_example()
}
