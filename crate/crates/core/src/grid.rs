//! Uniform time grids on `[0, 1]`, the trigonometric basis `e_n(t) = exp(2πi n t)`,
//! and the Dirichlet kernel `K_N(x) = Σ_{|ℓ|≤N} exp(-2πi ℓ x)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Uniform partition `t_i = i/m`, `i = 0..=m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TimeGrid {
    m: usize,
}

impl TimeGrid {
    pub fn new(m: usize) -> Result<Self> {
        if m < 2 {
            return invalid(format!("grid needs at least 2 subintervals, got {m}"));
        }
        Ok(Self { m })
    }

    /// Number of subintervals.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dt(&self) -> f64 {
        1.0 / self.m as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        debug_assert!(i <= self.m);
        i as f64 / self.m as f64
    }

    /// All `m + 1` nodes, `t_0 = 0` through `t_m = 1`.
    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.m).map(|i| self.node(i)).collect()
    }

    /// Left endpoints `t_0..t_{m-1}`, the tags used by every Riemann and Itô sum.
    pub fn left_nodes(&self) -> Vec<f64> {
        (0..self.m).map(|i| self.node(i)).collect()
    }
}

pub fn make_grid(m: usize) -> Result<TimeGrid> {
    TimeGrid::new(m)
}

/// `e_n(t) = exp(2πi n t)`.
pub fn eval_basis(n: i64, t: f64) -> Complex64 {
    // Reduce the phase before scaling so integer multiples land on exact angles.
    let phase = (n as f64 * t).rem_euclid(1.0);
    Complex64::from_polar(1.0, 2.0 * PI * phase)
}

/// Dirichlet kernel in sum form, `K_N(x) = Σ_{|ℓ|≤N} exp(-2πi ℓ x)`.
pub fn dirichlet_kernel(order: usize, x: f64) -> Complex64 {
    if x.fract() == 0.0 {
        return Complex64::new((2 * order + 1) as f64, 0.0);
    }
    let mut acc = Complex64::new(1.0, 0.0);
    for l in 1..=order as i64 {
        acc += eval_basis(-l, x) + eval_basis(l, x);
    }
    acc
}

/// A sampled kernel value `K_N(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    pub order: usize,
    pub x: f64,
    pub value: Complex64,
}

impl KernelValue {
    pub fn new(order: usize, x: f64) -> Self {
        Self { order, x, value: dirichlet_kernel(order, x) }
    }
}

/// Closed form `sin((2N+1)πx) / sin(πx)` of the 1-periodic kernel. Cross-check only.
pub fn dirichlet_closed_form(order: usize, x: f64) -> f64 {
    let den = (PI * x).sin();
    if x.fract() == 0.0 || den.abs() < 1e-300 {
        return (2 * order + 1) as f64;
    }
    ((2 * order + 1) as f64 * PI * x).sin() / den
}

/// Riemann sum `(1/m) Σ_i |K_N(t_i)|²`. Exact for `m ≥ 4N + 4`, where it equals `2N + 1`.
pub fn kernel_l2_identity(order: usize, grid: &TimeGrid) -> Result<f64> {
    let need = 4 * order + 4;
    if grid.m() < need {
        return invalid(format!(
            "m = {} aliases |K_{order}|^2; need m >= {need}",
            grid.m()
        ));
    }
    let table = BasisTable::new(grid);
    let kern = table.dirichlet_table(order);
    let sum: f64 = kern.iter().map(|k| k * k).sum();
    Ok(sum / grid.m() as f64)
}

/// Roots of unity `exp(2πi r/m)` on a grid, so that `e_n(t_i)` is a table lookup
/// with index `n·i mod m`. Conjugate pairs are stored bit-exactly conjugate.
#[derive(Debug, Clone)]
pub struct BasisTable {
    m: usize,
    roots: Vec<Complex64>,
}

impl BasisTable {
    pub fn new(grid: &TimeGrid) -> Self {
        let m = grid.m();
        let mut roots = vec![Complex64::new(0.0, 0.0); m];
        for r in 0..=m / 2 {
            let z = Complex64::from_polar(1.0, 2.0 * PI * r as f64 / m as f64);
            roots[r] = z;
            if r != 0 {
                roots[m - r] = z.conj();
            }
        }
        // Quarter turns exact.
        roots[0] = Complex64::new(1.0, 0.0);
        if m % 2 == 0 {
            roots[m / 2] = Complex64::new(-1.0, 0.0);
        }
        if m % 4 == 0 {
            roots[m / 4] = Complex64::new(0.0, 1.0);
            roots[3 * m / 4] = Complex64::new(0.0, -1.0);
        }
        Self { m, roots }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    fn index(&self, n: i64, i: usize) -> usize {
        let m = self.m as i128;
        ((n as i128 * i as i128).rem_euclid(m)) as usize
    }

    /// `e_n(t_i)`.
    pub fn value(&self, n: i64, i: usize) -> Complex64 {
        self.roots[self.index(n, i)]
    }

    /// `conj(e_n(t_i)) = e_{-n}(t_i)`.
    pub fn conj_value(&self, n: i64, i: usize) -> Complex64 {
        self.roots[self.index(-n, i)]
    }

    /// `e_n` sampled at the left nodes `t_0..t_{m-1}`.
    pub fn row(&self, n: i64) -> Vec<Complex64> {
        (0..self.m).map(|i| self.value(n, i)).collect()
    }

    /// `conj(e_n)` sampled at the left nodes.
    pub fn conj_row(&self, n: i64) -> Vec<Complex64> {
        (0..self.m).map(|i| self.conj_value(n, i)).collect()
    }

    /// `Σ_i conj(e_n(t_i)) w_i`.
    pub fn conj_dot(&self, n: i64, w: &[Complex64]) -> Complex64 {
        debug_assert_eq!(w.len(), self.m);
        let step = (-(n as i128)).rem_euclid(self.m as i128) as usize;
        let mut idx = 0usize;
        let mut acc = Complex64::new(0.0, 0.0);
        for &x in w {
            acc += self.roots[idx] * x;
            idx += step;
            if idx >= self.m {
                idx -= self.m;
            }
        }
        acc
    }

    /// Same as [`BasisTable::conj_dot`] for a real weight vector.
    pub fn conj_dot_real(&self, n: i64, w: &[f64]) -> Complex64 {
        debug_assert_eq!(w.len(), self.m);
        let step = (-(n as i128)).rem_euclid(self.m as i128) as usize;
        let mut idx = 0usize;
        let mut acc = Complex64::new(0.0, 0.0);
        for &x in w {
            acc += self.roots[idx] * x;
            idx += step;
            if idx >= self.m {
                idx -= self.m;
            }
        }
        acc
    }

    /// Real values `K_N(d/m)` for `d = 0..m`, so `K_N(t_s - t_t)` is entry `(s - t) mod m`.
    pub fn dirichlet_table(&self, order: usize) -> Vec<f64> {
        (0..self.m)
            .map(|d| {
                let mut acc = 1.0;
                for l in 1..=order as i64 {
                    acc += 2.0 * self.value(l, d).re;
                }
                acc
            })
            .collect()
    }
}
