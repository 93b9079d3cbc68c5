// A small Monte Carlo convergence study: error of `B_N(n)` against `2N + 1`
// with a fitted log-log slope per frequency. Pass a path count to scale it up.

use sfc_lab::catalog::{Drift, ProcessKind, ProcessSpec};
use sfc_lab::experiment::{run_convergence, ExperimentConfig};
use sfc_lab::report::convergence_csv;

pub fn run_example() -> sfc_lab::Result<()> {
    let paths = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(200);
    let cfg = ExperimentConfig {
        n_list: vec![4, 8, 16, 32, 64],
        max_freq: 1,
        mesh: 1024,
        paths,
        seed: 9,
        ..ExperimentConfig::new(ProcessSpec { kind: ProcessKind::NoncausalW1, f: None, drift: Drift::None })
    };
    let res = run_convergence(&cfg)?;
    print!("{}", convergence_csv(&res)?);
    for f in &res.fits {
        println!("n = {:+}: slope {:+.3} ± {:.3}", f.n, f.fit.slope, f.fit.half_width);
    }
    Ok(())
}

fn main() -> sfc_lab::Result<()> {
    run_example()
}
