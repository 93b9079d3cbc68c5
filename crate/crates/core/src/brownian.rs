//! Seeded Brownian paths on a [`TimeGrid`] and left-point Wiener integrals.
//!
//! Each `(master_seed, path_index)` pair selects its own ChaCha stream, so a
//! path never depends on which other paths were generated or in what order.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::grid::TimeGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub path_index: u64,
}

impl SeedSpec {
    pub fn new(master_seed: u64, path_index: u64) -> Self {
        Self { master_seed, path_index }
    }

    fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.path_index);
        rng
    }
}

/// A sampled Wiener trajectory `W_0 = 0, W_1, …, W_m` with its increments.
#[derive(Debug, Clone, PartialEq)]
pub struct BrownianPath {
    grid: TimeGrid,
    values: Vec<f64>,
    increments: Vec<f64>,
}

impl BrownianPath {
    /// Builds a path from the increments `ΔW_0..ΔW_{m-1}`.
    pub fn from_increments(grid: TimeGrid, increments: Vec<f64>) -> Result<Self> {
        if increments.len() != grid.m() {
            return invalid(format!(
                "expected {} increments, got {}",
                grid.m(),
                increments.len()
            ));
        }
        let mut values = Vec::with_capacity(grid.m() + 1);
        let mut w = 0.0;
        values.push(w);
        for dw in &increments {
            w += dw;
            values.push(w);
        }
        Ok(Self { grid, values, increments })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn m(&self) -> usize {
        self.grid.m()
    }

    /// `W_{t_0}..W_{t_m}`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn increments(&self) -> &[f64] {
        &self.increments
    }

    /// `W_1`.
    pub fn terminal(&self) -> f64 {
        self.values[self.grid.m()]
    }

    /// Standardized increments `ξ_i = ΔW_i √m`.
    pub fn standardized(&self) -> Vec<f64> {
        let s = (self.grid.m() as f64).sqrt();
        self.increments.iter().map(|dw| dw * s).collect()
    }
}

pub fn sample_path(seed: SeedSpec, grid: &TimeGrid) -> BrownianPath {
    let mut rng = seed.rng();
    let scale = grid.dt().sqrt();
    let increments: Vec<f64> = (0..grid.m())
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            z * scale
        })
        .collect();
    BrownianPath::from_increments(*grid, increments).expect("length matches grid")
}

/// Left-point Itô sum `Σ_i f(t_i) ΔW_i` for `f` sampled at `t_0..t_{m-1}`.
pub fn wiener_integral(path: &BrownianPath, f: &[Complex64]) -> Result<Complex64> {
    if f.len() != path.m() {
        return invalid(format!(
            "integrand has {} samples, grid has {} subintervals",
            f.len(),
            path.m()
        ));
    }
    Ok(f.iter()
        .zip(path.increments())
        .map(|(fi, dw)| fi * dw)
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, BasisTable};

    #[test]
    fn starts_at_zero_and_is_deterministic() {
        let g = make_grid(64).unwrap();
        for idx in 0..5 {
            let p = sample_path(SeedSpec::new(7, idx), &g);
            assert_eq!(p.values()[0], 0.0);
            let q = sample_path(SeedSpec::new(7, idx), &g);
            assert_eq!(p.values(), q.values());
        }
        let a = sample_path(SeedSpec::new(7, 0), &g);
        let b = sample_path(SeedSpec::new(7, 1), &g);
        assert_ne!(a.values(), b.values());
    }

    #[test]
    fn values_are_prefix_sums() {
        let g = make_grid(16).unwrap();
        let p = sample_path(SeedSpec::new(1, 3), &g);
        let mut acc = 0.0;
        for i in 0..16 {
            acc += p.increments()[i];
            assert_eq!(p.values()[i + 1], acc);
        }
    }

    #[test]
    fn terminal_variance_band() {
        let g = make_grid(32).unwrap();
        let paths = 10_000;
        let w1: Vec<f64> = (0..paths)
            .map(|i| sample_path(SeedSpec::new(2024, i), &g).terminal())
            .collect();
        let mean = w1.iter().sum::<f64>() / paths as f64;
        let var = w1.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (paths - 1) as f64;
        assert!((0.958..=1.042).contains(&var), "var = {var}");
    }

    #[test]
    fn constant_integrand_telescopes() {
        let g = make_grid(128).unwrap();
        let p = sample_path(SeedSpec::new(5, 0), &g);
        let ones = vec![Complex64::new(1.0, 0.0); 128];
        let v = wiener_integral(&p, &ones).unwrap();
        assert!((v.re - p.terminal()).abs() < 1e-12);
        assert_eq!(v.im, 0.0);
        assert!(wiener_integral(&p, &ones[..127]).is_err());
    }

    #[test]
    fn basis_integral_isometry() {
        let g = make_grid(64).unwrap();
        let tab = BasisTable::new(&g);
        let f = tab.conj_row(3);
        let paths = 10_000;
        let vals: Vec<Complex64> = (0..paths)
            .map(|i| wiener_integral(&sample_path(SeedSpec::new(99, i), &g), &f).unwrap())
            .collect();
        let mean = vals.iter().sum::<Complex64>() / paths as f64;
        let second = vals.iter().map(|v| v.norm_sqr()).sum::<f64>() / paths as f64;
        assert!(mean.norm() <= 3.0 / (paths as f64).sqrt());
        assert!((0.958..=1.042).contains(&second), "E|I|^2 = {second}");
    }

    #[test]
    fn independent_across_indices() {
        let g = make_grid(8).unwrap();
        let paths = 5_000u64;
        let (mut sxy, mut sx, mut sy, mut sxx, mut syy) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for i in 0..paths {
            let x = sample_path(SeedSpec::new(11, 2 * i), &g).terminal();
            let y = sample_path(SeedSpec::new(11, 2 * i + 1), &g).terminal();
            sxy += x * y;
            sx += x;
            sy += y;
            sxx += x * x;
            syy += y * y;
        }
        let p = paths as f64;
        let cov = sxy / p - sx * sy / (p * p);
        let corr = cov / ((sxx / p - (sx / p).powi(2)) * (syy / p - (sy / p).powi(2))).sqrt();
        assert!(corr.abs() <= 3.0 / p.sqrt(), "corr = {corr}");
    }
}
