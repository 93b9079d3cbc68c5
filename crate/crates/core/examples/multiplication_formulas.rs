// Integration by parts and the two product formulas, checked path by path on
// the discrete Wiener space.

use num_complex::Complex64;
use sfc_lab::brownian::{sample_path, SeedSpec};
use sfc_lab::catalog::{DetFn, Drift, ProcessKind, ProcessSpec, TrigPoly};
use sfc_lab::grid::{make_grid, BasisTable};
use sfc_lab::malliavin::{lemma_fdelta_residual, prop1_terms, prop2_terms, DiscreteFunctional};

pub fn run_example() -> sfc_lab::Result<()> {
    let grid = make_grid(1024)?;
    let table = BasisTable::new(&grid);
    let path = sample_path(SeedSpec::new(5, 0), &grid);
    let e1 = table.row(1);

    let w1 = DiscreteFunctional::terminal(&path);
    let h2 = w1.mul(&w1).add(&DiscreteFunctional::constant(Complex64::new(-1.0, 0.0), grid.m()));
    println!("F δ(e) residual, F = W_1^2 - 1: {:.2e}", lemma_fdelta_residual(&h2, &e1, &path)?);

    let spec = ProcessSpec {
        kind: ProcessKind::NoncausalMidpoint,
        f: None,
        drift: Drift::TerminalScaled { g: DetFn::Trig(TrigPoly::cosine(1, 1.0)) },
    };
    let p1 = prop1_terms(&spec, &e1, &path)?;
    println!(
        "δ(a)·δ(e) = {:.6}  = outer {:.6} + derivative {:.6} + trace {:.6}",
        p1.lhs, p1.outer, p1.derivative, p1.trace
    );
    let p2 = prop2_terms(&spec, &e1, &path)?;
    println!("∫b dt·δ(e) = {:.6}  residual {:.2e}", p2.lhs, p2.residual());
    assert!(p1.residual() < 1e-9 && p2.residual() < 1e-9);
    Ok(())
}

fn main() -> sfc_lab::Result<()> {
    run_example()
}
