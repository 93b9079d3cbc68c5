// Recovering the drift coefficients `b̂_n` once `a` is identified, averaged
// over paths, for `a = W_1` and `b = cos 2πt`.

use num_complex::Complex64;
use sfc_lab::experiment::{run_identification, ExperimentConfig};
use sfc_lab::catalog::{DetFn, Drift, ProcessKind, ProcessSpec, TrigPoly};

pub fn run_example() -> sfc_lab::Result<()> {
    let spec = ProcessSpec {
        kind: ProcessKind::NoncausalW1,
        f: None,
        drift: Drift::Deterministic { g: DetFn::Trig(TrigPoly::cosine(1, 1.0)) },
    };
    let cfg = ExperimentConfig {
        n_list: vec![16],
        max_freq: 2,
        mesh: 1024,
        paths: 400,
        ..ExperimentConfig::new(spec)
    };
    let res = run_identification(&cfg, 16, None)?;
    for n in -2..=2 {
        let row = res.get('b', n).expect("row present");
        println!(
            "b_{n:+}: mean {:+.6} ± {:.1e}  (truth {:+.3})",
            row.estimate.mean.re, row.estimate.std_err, row.truth.mean.re
        );
    }
    assert!(res.get('b', 1).unwrap().estimate.within(Complex64::new(0.5, 0.0), 3.0));
    Ok(())
}

fn main() -> sfc_lab::Result<()> {
    run_example()
}
