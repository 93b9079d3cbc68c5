//! Divergence and derivative on the discrete Wiener space generated by the
//! standardized increments `ξ_i = ΔW_i √m`.
//!
//! Two derivative normalizations appear below. `partials` are `∂/∂ξ_i`. The
//! Malliavin derivative `D_t F` for `t ∈ [t_i, t_{i+1})` is `∂F/∂ΔW_i = √m ∂F/∂ξ_i`,
//! which has unit size for `F = W_1`. The pairing `∫ D_t F e(t) dt` becomes
//! `Σ_i (∂F/∂ξ_i) e(t_i) / √m`.
//!
//! The divergence is
//!
//! ```text
//! δ(u) = Σ_i u_i ΔW_i − (1/√m) Σ_i ∂u_i/∂ξ_i
//! ```
//!
//! and satisfies `E[F δ(u)] = E[Σ_i (∂F/∂ξ_i) u_i / √m]` exactly, by Gaussian
//! integration by parts in each coordinate. For `u_i` that does not depend
//! on `ξ_i, ξ_{i+1}, …` the correction vanishes and `δ(u)` is the left-point Itô sum.
//!
//! Example: `u_i = W_1` for every `i` has `∂u_i/∂ξ_i = 1/√m`, so
//! `δ(u) = W_1 · W_1 − m · (1/√m)(1/√m) = W_1² − 1`.

use num_complex::Complex64;

use crate::brownian::{wiener_integral, BrownianPath};
use crate::catalog::{eval_functionals, ProcessSpec};
use crate::error::{invalid, Result};

/// A Wiener functional with its gradient in the standardized increments.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteFunctional {
    pub value: Complex64,
    /// `∂F/∂ξ_i`, `i = 0..m`.
    pub partials: Vec<Complex64>,
}

impl DiscreteFunctional {
    pub fn constant(c: Complex64, m: usize) -> Self {
        Self { value: c, partials: vec![Complex64::new(0.0, 0.0); m] }
    }

    /// `W_1`.
    pub fn terminal(path: &BrownianPath) -> Self {
        let m = path.m();
        let p = Complex64::new(1.0 / (m as f64).sqrt(), 0.0);
        Self { value: Complex64::new(path.terminal(), 0.0), partials: vec![p; m] }
    }

    /// `W_{t_k}`.
    pub fn value_at(path: &BrownianPath, k: usize) -> Self {
        let m = path.m();
        let p = 1.0 / (m as f64).sqrt();
        let partials = (0..m)
            .map(|i| Complex64::new(if i < k { p } else { 0.0 }, 0.0))
            .collect();
        Self { value: Complex64::new(path.values()[k], 0.0), partials }
    }

    /// Builds a functional from its Malliavin derivative `D_{t_i} F = ∂F/∂ΔW_i`.
    pub fn from_malliavin(value: Complex64, derivative: &[Complex64]) -> Self {
        let s = 1.0 / (derivative.len() as f64).sqrt();
        Self { value, partials: derivative.iter().map(|d| d * s).collect() }
    }

    pub fn m(&self) -> usize {
        self.partials.len()
    }

    /// `D_{t_i} F = √m ∂F/∂ξ_i`.
    pub fn malliavin(&self) -> Vec<Complex64> {
        let s = (self.m() as f64).sqrt();
        self.partials.iter().map(|p| p * s).collect()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { value: self.value * c, partials: self.partials.iter().map(|p| p * c).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.m(), other.m());
        Self {
            value: self.value + other.value,
            partials: self.partials.iter().zip(&other.partials).map(|(a, b)| a + b).collect(),
        }
    }

    /// Product rule.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.m(), other.m());
        Self {
            value: self.value * other.value,
            partials: self
                .partials
                .iter()
                .zip(&other.partials)
                .map(|(a, b)| a * other.value + self.value * b)
                .collect(),
        }
    }

    /// `Σ_i (∂F/∂ξ_i) e_i / √m`, the discrete `∫ D_t F e(t) dt`.
    pub fn pair_with(&self, e: &[Complex64]) -> Complex64 {
        let s = 1.0 / (self.m() as f64).sqrt();
        self.partials.iter().zip(e).map(|(p, ei)| p * ei).sum::<Complex64>() * s
    }
}

/// Discrete Skorokhod integral of a per-node field of functionals.
pub fn discrete_divergence(u: &[DiscreteFunctional], path: &BrownianPath) -> Result<Complex64> {
    let m = path.m();
    if u.len() != m {
        return invalid(format!("field has {} nodes, grid has {m}", u.len()));
    }
    if let Some(i) = u.iter().position(|ui| ui.partials.len() != m) {
        return invalid(format!("node {i} is missing partials"));
    }
    let values: Vec<Complex64> = u.iter().map(|ui| ui.value).collect();
    let diag: Vec<Complex64> = u.iter().enumerate().map(|(i, ui)| ui.partials[i]).collect();
    divergence_from_diagonal(path, &values, &diag)
}

/// Same as [`discrete_divergence`] when only the diagonal partials
/// `∂u_i/∂ξ_i` are known, which is all the divergence needs.
pub fn divergence_from_diagonal(
    path: &BrownianPath,
    values: &[Complex64],
    diag_partials: &[Complex64],
) -> Result<Complex64> {
    let m = path.m();
    if values.len() != m || diag_partials.len() != m {
        return invalid(format!(
            "field has {} values and {} partials, grid has {m}",
            values.len(),
            diag_partials.len()
        ));
    }
    let correction: Complex64 = diag_partials.iter().sum();
    Ok(wiener_integral(path, values)? - correction / (m as f64).sqrt())
}

/// Divergence with the diagonal given as Malliavin derivatives `D_{t_i} u_i`.
pub(crate) fn skorokhod(path: &BrownianPath, values: &[Complex64], diag_d: &[Complex64]) -> Complex64 {
    debug_assert_eq!(values.len(), path.m());
    debug_assert_eq!(diag_d.len(), path.m());
    let ito: Complex64 = values.iter().zip(path.increments()).map(|(v, dw)| v * dw).sum();
    let correction: Complex64 = diag_d.iter().sum();
    ito - correction / path.m() as f64
}

fn check_len(e: &[Complex64], m: usize) -> Result<()> {
    if e.len() != m {
        return invalid(format!("test function has {} samples, grid has {m}", e.len()));
    }
    Ok(())
}

/// `|F ∫e dW − (δ(F e) + ∫ D_t F e(t) dt)|`. Exact on the discrete space.
pub fn lemma_fdelta_residual(
    f: &DiscreteFunctional,
    e: &[Complex64],
    path: &BrownianPath,
) -> Result<f64> {
    let m = path.m();
    check_len(e, m)?;
    if f.m() != m {
        return invalid(format!("functional has {} partials, grid has {m}", f.m()));
    }
    let lhs = f.value * wiener_integral(path, e)?;
    let values: Vec<Complex64> = e.iter().map(|ei| f.value * ei).collect();
    let diag: Vec<Complex64> = e.iter().zip(&f.partials).map(|(ei, p)| p * ei).collect();
    let rhs = divergence_from_diagonal(path, &values, &diag)? + f.pair_with(e);
    Ok((lhs - rhs).norm())
}

/// Terms of the product formula for `∫a dW · ∫e dW`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prop1Terms {
    pub lhs: Complex64,
    /// `δ( δ(a) e )`
    pub outer: Complex64,
    /// `δ_s( ∫ D_t a(s) e(t) dt )`
    pub derivative: Complex64,
    /// `∫ a e dt`
    pub trace: Complex64,
}

impl Prop1Terms {
    pub fn residual(&self) -> f64 {
        (self.lhs - self.outer - self.derivative - self.trace).norm()
    }
}

pub fn prop1_terms(spec: &ProcessSpec, e: &[Complex64], path: &BrownianPath) -> Result<Prop1Terms> {
    let m = path.m();
    check_len(e, m)?;
    let pf = eval_functionals(spec, path)?;
    let kernel = pf.a_derivative;
    let dt = 1.0 / m as f64;
    let a: Vec<Complex64> = pf.a[..m].iter().map(|&v| Complex64::new(v, 0.0)).collect();

    let diag_a: Vec<Complex64> = (0..m).map(|i| Complex64::new(kernel.entry(i, i), 0.0)).collect();
    let delta_a = skorokhod(path, &a, &diag_a);
    let lhs = delta_a * wiener_integral(path, e)?;

    // D_t δ(a) = a_t + Σ_s D_t a_s ΔW_s; second derivatives of a vanish.
    let d_delta: Vec<f64> = kernel.sum_over_s(path.increments());
    let values: Vec<Complex64> = e.iter().map(|ei| delta_a * ei).collect();
    let diag: Vec<Complex64> = (0..m).map(|t| e[t] * (a[t] + d_delta[t])).collect();
    let outer = skorokhod(path, &values, &diag);

    // v_s = ∫ D_t a_s e_t dt is deterministic for chaos-1 a.
    let v: Vec<Complex64> = kernel.sum_over_r(e).into_iter().map(|x| x * dt).collect();
    let derivative = skorokhod(path, &v, &vec![Complex64::new(0.0, 0.0); m]);

    let trace = a.iter().zip(e).map(|(ai, ei)| ai * ei).sum::<Complex64>() * dt;
    Ok(Prop1Terms { lhs, outer, derivative, trace })
}

pub fn prop1_residual(spec: &ProcessSpec, e: &[Complex64], path: &BrownianPath) -> Result<f64> {
    Ok(prop1_terms(spec, e, path)?.residual())
}

/// Terms of the product formula for `∫b dt · ∫e dW`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prop2Terms {
    pub lhs: Complex64,
    /// `δ( (∫b ds) e )`
    pub outer: Complex64,
    /// `∫∫ D_t b(s) e(t) dt ds`
    pub derivative: Complex64,
}

impl Prop2Terms {
    pub fn residual(&self) -> f64 {
        (self.lhs - self.outer - self.derivative).norm()
    }
}

pub fn prop2_terms(spec: &ProcessSpec, e: &[Complex64], path: &BrownianPath) -> Result<Prop2Terms> {
    let m = path.m();
    check_len(e, m)?;
    let pf = eval_functionals(spec, path)?;
    let dt = 1.0 / m as f64;
    let b_int: f64 = pf.b[..m].iter().sum::<f64>() * dt;
    let lhs = b_int * wiener_integral(path, e)?;

    // D_t ∫b ds = (1/m) Σ_s D_t b_s
    let d_b_int: Vec<f64> = pf
        .b_derivative
        .sum_over_s(&pf.b_derivative_weights[..m])
        .into_iter()
        .map(|x| x * dt)
        .collect();
    let values: Vec<Complex64> = e.iter().map(|ei| ei * b_int).collect();
    let diag: Vec<Complex64> = e.iter().zip(&d_b_int).map(|(ei, d)| ei * d).collect();
    let outer = skorokhod(path, &values, &diag);
    let derivative = e.iter().zip(&d_b_int).map(|(ei, d)| ei * d).sum::<Complex64>() * dt;
    Ok(Prop2Terms { lhs, outer, derivative })
}

pub fn prop2_residual(spec: &ProcessSpec, e: &[Complex64], path: &BrownianPath) -> Result<f64> {
    Ok(prop2_terms(spec, e, path)?.residual())
}
