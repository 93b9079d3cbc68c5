//! Stochastic Fourier coefficients `F_n(dX) = Σ_i conj(e_n(t_i)) (X_{i+1} − X_i)`
//! and the Wiener coefficients `I_ℓ = Σ_i conj(e_ℓ(t_i)) ΔW_i`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::brownian::BrownianPath;
use crate::catalog::PathFunctionals;
use crate::error::{invalid, Result};
use crate::grid::BasisTable;

/// Coefficients indexed by `n ∈ [−M, M]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSet {
    max_freq: usize,
    entries: Vec<Complex64>,
}

impl CoefficientSet {
    pub fn new(max_freq: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != 2 * max_freq + 1 {
            return invalid(format!(
                "{} entries cannot cover [-{max_freq}, {max_freq}]",
                entries.len()
            ));
        }
        Ok(Self { max_freq, entries })
    }

    pub fn from_fn(max_freq: usize, mut f: impl FnMut(i64) -> Complex64) -> Self {
        let m = max_freq as i64;
        Self { max_freq, entries: (-m..=m).map(&mut f).collect() }
    }

    pub fn zeros(max_freq: usize) -> Self {
        Self::from_fn(max_freq, |_| Complex64::new(0.0, 0.0))
    }

    pub fn max_freq(&self) -> usize {
        self.max_freq
    }

    pub fn contains(&self, n: i64) -> bool {
        n.unsigned_abs() as usize <= self.max_freq
    }

    pub fn get(&self, n: i64) -> Option<Complex64> {
        self.contains(n)
            .then(|| self.entries[(n + self.max_freq as i64) as usize])
    }

    /// Panics when `n` is out of range.
    pub fn at(&self, n: i64) -> Complex64 {
        self.get(n)
            .unwrap_or_else(|| panic!("index {n} outside [-{0}, {0}]", self.max_freq))
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// `(n, value)` pairs in ascending `n`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let m = self.max_freq as i64;
        (-m..=m).zip(self.entries.iter().copied())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.max_freq != other.max_freq {
            return invalid("coefficient ranges differ");
        }
        Ok(Self {
            max_freq: self.max_freq,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
        })
    }
}

pub(crate) fn alias_guard(m: usize, freq: usize) -> Result<()> {
    if m <= 2 * freq {
        return invalid(format!(
            "frequency {freq} aliases on a grid with m = {m}; need m > {}",
            2 * freq
        ));
    }
    Ok(())
}

#[allow(non_snake_case)]
pub fn sfc_dX(pf: &PathFunctionals, n: i64) -> Result<Complex64> {
    alias_guard(pf.m(), n.unsigned_abs() as usize)?;
    let table = BasisTable::new(&pf.grid);
    Ok(table.conj_dot_real(n, &pf.dx()))
}

pub fn sfc_range(pf: &PathFunctionals, max_freq: usize) -> Result<CoefficientSet> {
    let table = BasisTable::new(&pf.grid);
    sfc_range_with(&table, pf, max_freq)
}

/// [`sfc_range`] with a precomputed basis table for the same grid.
pub fn sfc_range_with(
    table: &BasisTable,
    pf: &PathFunctionals,
    max_freq: usize,
) -> Result<CoefficientSet> {
    alias_guard(pf.m(), max_freq)?;
    let dx = pf.dx();
    Ok(CoefficientSet::from_fn(max_freq, |n| table.conj_dot_real(n, &dx)))
}

pub fn wiener_sfc(path: &BrownianPath, l: i64) -> Result<Complex64> {
    alias_guard(path.m(), l.unsigned_abs() as usize)?;
    let table = BasisTable::new(path.grid());
    Ok(table.conj_dot_real(l, path.increments()))
}

pub fn wiener_sfc_range(path: &BrownianPath, max_freq: usize) -> Result<CoefficientSet> {
    let table = BasisTable::new(path.grid());
    wiener_sfc_range_with(&table, path, max_freq)
}

pub fn wiener_sfc_range_with(
    table: &BasisTable,
    path: &BrownianPath,
    max_freq: usize,
) -> Result<CoefficientSet> {
    alias_guard(path.m(), max_freq)?;
    Ok(CoefficientSet::from_fn(max_freq, |l| table.conj_dot_real(l, path.increments())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brownian::{sample_path, wiener_integral, SeedSpec};
    use crate::catalog::{eval_functionals, DetFn, Drift, ProcessKind, ProcessSpec, TrigPoly};
    use crate::grid::make_grid;
    use crate::malliavin::divergence_from_diagonal;

    fn unit_drift() -> ProcessSpec {
        ProcessSpec {
            kind: ProcessKind::Det,
            f: Some(DetFn::Trig(TrigPoly::constant(0.0))),
            drift: Drift::Deterministic { g: DetFn::Trig(TrigPoly::constant(1.0)) },
        }
    }

    #[test]
    fn pure_drift_is_kronecker() {
        let g = make_grid(64).unwrap();
        let p = sample_path(SeedSpec::new(1, 0), &g);
        let pf = eval_functionals(&unit_drift(), &p).unwrap();
        let set = sfc_range(&pf, 3).unwrap();
        for (n, v) in set.iter() {
            let want = if n == 0 { 1.0 } else { 0.0 };
            assert!((v - Complex64::new(want, 0.0)).norm() < 1e-12, "n = {n}");
        }
        assert!((sfc_dX(&pf, 0).unwrap() - 1.0).norm() < 1e-12);
    }

    #[test]
    fn const_matches_wiener_integral() {
        let g = make_grid(64).unwrap();
        let tab = BasisTable::new(&g);
        let p = sample_path(SeedSpec::new(1, 1), &g);
        let pf = eval_functionals(&ProcessSpec::constant(), &p).unwrap();
        for n in -5..=5 {
            let direct = wiener_integral(&p, &tab.conj_row(n)).unwrap();
            assert!((sfc_dX(&pf, n).unwrap() - direct).norm() < 1e-12);
            assert!((wiener_sfc(&p, n).unwrap() - direct).norm() < 1e-12);
        }
        assert!((wiener_sfc(&p, 0).unwrap().re - p.terminal()).abs() < 1e-12);
    }

    #[test]
    fn w1_zero_mode_telescopes() {
        let g = make_grid(128).unwrap();
        let p = sample_path(SeedSpec::new(2, 0), &g);
        let spec = ProcessSpec { kind: ProcessKind::NoncausalW1, f: None, drift: Drift::None };
        let pf = eval_functionals(&spec, &p).unwrap();
        let w1 = p.terminal();
        assert!((sfc_dX(&pf, 0).unwrap() - Complex64::new(w1 * w1 - 1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn aliasing_guard() {
        let g = make_grid(16).unwrap();
        let p = sample_path(SeedSpec::new(2, 0), &g);
        let pf = eval_functionals(&ProcessSpec::constant(), &p).unwrap();
        assert!(sfc_dX(&pf, 8).is_err());
        assert!(sfc_dX(&pf, 7).is_ok());
        assert!(sfc_range(&pf, 8).is_err());
        assert!(wiener_sfc(&p, -8).is_err());
    }

    #[test]
    fn conjugate_symmetry_for_real_increments() {
        let g = make_grid(96).unwrap();
        let p = sample_path(SeedSpec::new(2, 3), &g);
        let spec = ProcessSpec { kind: ProcessKind::NoncausalBridge, f: None, drift: Drift::None };
        let pf = eval_functionals(&spec, &p).unwrap();
        let set = sfc_range(&pf, 10).unwrap();
        let w = wiener_sfc_range(&p, 10).unwrap();
        for n in 1..=10 {
            assert!((set.at(-n) - set.at(n).conj()).norm() < 1e-12);
            assert!((w.at(-n) - w.at(n).conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn wiener_sfc_isometry() {
        let g = make_grid(64).unwrap();
        let paths = 10_000u64;
        let second: f64 = (0..paths)
            .map(|i| wiener_sfc(&sample_path(SeedSpec::new(4, i), &g), 5).unwrap().norm_sqr())
            .sum::<f64>()
            / paths as f64;
        assert!((0.958..=1.042).contains(&second), "{second}");
    }

    /// For discretely exact entries, the SFC is the quadrature of `b ē_n`
    /// plus the discrete divergence of `a ē_n`.
    #[test]
    fn splits_into_drift_and_divergence() {
        let g = make_grid(128).unwrap();
        let tab = BasisTable::new(&g);
        for kind in [ProcessKind::Const, ProcessKind::NoncausalW1, ProcessKind::NoncausalMidpoint] {
            let spec = ProcessSpec {
                kind,
                f: None,
                drift: Drift::TerminalScaled { g: DetFn::Trig(TrigPoly::cosine(1, 1.0)) },
            };
            for idx in 0..10 {
                let p = sample_path(SeedSpec::new(5, idx), &g);
                let pf = eval_functionals(&spec, &p).unwrap();
                for n in [-2i64, 0, 3] {
                    let e = tab.conj_row(n);
                    let vals: Vec<Complex64> = (0..128).map(|i| e[i] * pf.a[i]).collect();
                    let diag: Vec<Complex64> = (0..128)
                        .map(|i| e[i] * pf.da(i, i) / (128f64).sqrt())
                        .collect();
                    let div = divergence_from_diagonal(&p, &vals, &diag).unwrap();
                    let quad = tab.conj_dot_real(n, &pf.b[..128]) / 128.0;
                    let got = sfc_dX(&pf, n).unwrap();
                    assert!((got - div - quad).norm() <= 1e-10, "{kind} n = {n}");
                }
            }
        }
    }

    #[test]
    fn coefficient_set_indexing() {
        let s = CoefficientSet::from_fn(2, |n| Complex64::new(n as f64, 0.0));
        assert_eq!(s.entries().len(), 5);
        assert_eq!(s.at(-2).re, -2.0);
        assert_eq!(s.get(3), None);
        assert!(CoefficientSet::new(2, vec![Complex64::new(0.0, 0.0); 4]).is_err());
    }
}
