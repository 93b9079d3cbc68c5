//! Test processes `dX = b dt + a dW` with closed-form ground truth.
//!
//! | kind                 | `a(t)`          | `X(t)` without drift            | `D_r a(t)`     | chaos |
//! |----------------------|-----------------|---------------------------------|----------------|-------|
//! | `CONST`              | `1`             | `W_t`                           | `0`            | 0     |
//! | `DET`                | `f(t)`          | `Σ f(t_j) ΔW_j`                 | `0`            | 0     |
//! | `ADAPTED_W`          | `W_t`           | `(W_t² − t)/2`                  | `1{r < t}`     | 1     |
//! | `NONCAUSAL_W1`       | `W_1`           | `W_1 W_t − t`                   | `1`            | 1     |
//! | `NONCAUSAL_BRIDGE`   | `W_1 − W_t`     | `W_1 W_t − (W_t² + t)/2`        | `1{r ≥ t}`     | 1     |
//! | `NONCAUSAL_MIDPOINT` | `W_{1/2}`       | `W_{1/2} W_t − min(t, 1/2)`     | `1{r < 1/2}`   | 1     |
//!
//! The bridge entry follows from linearity of the divergence:
//! `δ((W_1 − W_·) 1_{[0,t]}) = δ(W_1 1_{[0,t]}) − ∫_0^t W_s dW_s = (W_1 W_t − t) − (W_t² − t)/2`.
//!
//! The drift contributes `∫_0^t b ds`, discretized with the same left-point
//! rule as every other sum so that `b dt` coefficients obey discrete
//! orthogonality exactly. Drifts are either deterministic `g(t)` or
//! `W_1 g(t)` (with `D_r b(t) = g(t)`).
//!
//! On the grid, `D_r` is the derivative with respect to the increment `ΔW_j`
//! containing `r`. `ADAPTED_W` and `NONCAUSAL_BRIDGE` use their continuum
//! closed forms, which differ from the discrete divergence by `O(m^{-1/2})`;
//! the other entries agree with it to rounding.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::brownian::BrownianPath;
use crate::error::{invalid, Error, Result};
use crate::grid::{BasisTable, TimeGrid};

/// Real trigonometric polynomial `c + Σ A_k cos(2πkt) + Σ B_k sin(2πkt)`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrigPoly {
    #[serde(default)]
    pub constant: f64,
    #[serde(default)]
    pub cos: Vec<(u32, f64)>,
    #[serde(default)]
    pub sin: Vec<(u32, f64)>,
}

impl TrigPoly {
    pub fn constant(c: f64) -> Self {
        Self { constant: c, ..Self::default() }
    }

    /// `amp · cos(2π k t)`.
    pub fn cosine(k: u32, amp: f64) -> Self {
        Self { cos: vec![(k, amp)], ..Self::default() }
    }

    pub fn sine(k: u32, amp: f64) -> Self {
        Self { sin: vec![(k, amp)], ..Self::default() }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let mut v = self.constant;
        for &(k, amp) in &self.cos {
            v += amp * (2.0 * PI * k as f64 * t).cos();
        }
        for &(k, amp) in &self.sin {
            v += amp * (2.0 * PI * k as f64 * t).sin();
        }
        v
    }

    pub fn degree(&self) -> u32 {
        self.cos.iter().chain(&self.sin).map(|&(k, _)| k).max().unwrap_or(0)
    }

    /// Exact `∫_0^1 g(t) conj(e_n(t)) dt`.
    pub fn coefficient(&self, n: i64) -> Complex64 {
        let mut c = Complex64::new(0.0, 0.0);
        if n == 0 {
            c += self.constant;
        }
        for &(k, amp) in &self.cos {
            let k = k as i64;
            if k == 0 {
                if n == 0 {
                    c += amp;
                }
            } else if n.abs() == k {
                c += amp / 2.0;
            }
        }
        for &(k, amp) in &self.sin {
            let k = k as i64;
            // sin = (e_k − e_{−k}) / 2i
            if k != 0 && n == k {
                c += Complex64::new(0.0, -amp / 2.0);
            } else if k != 0 && n == -k {
                c += Complex64::new(0.0, amp / 2.0);
            }
        }
        c
    }
}

/// A deterministic function of time: a trigonometric polynomial with exact
/// coefficients, or a table of values at the `m + 1` grid nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetFn {
    Trig(TrigPoly),
    Table(Vec<f64>),
}

impl DetFn {
    fn nodes(&self, grid: &TimeGrid) -> Result<Vec<f64>> {
        match self {
            DetFn::Trig(p) => Ok(grid.nodes().into_iter().map(|t| p.eval(t)).collect()),
            DetFn::Table(v) if v.len() == grid.m() + 1 => Ok(v.clone()),
            DetFn::Table(v) => invalid(format!(
                "node table has {} entries, grid has {} nodes",
                v.len(),
                grid.m() + 1
            )),
        }
    }

    /// Fourier coefficient, with `exact = false` when only a node table is known.
    fn coefficient(&self, grid: &TimeGrid, n: i64) -> Result<Truth> {
        match self {
            DetFn::Trig(p) => Ok(Truth::exact(p.coefficient(n))),
            DetFn::Table(_) => {
                let v = self.nodes(grid)?;
                let tab = BasisTable::new(grid);
                let c = tab.conj_dot_real(n, &v[..grid.m()]) / grid.m() as f64;
                Ok(Truth::approximate(c))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Drift {
    #[default]
    None,
    /// `b(t) = g(t)`.
    Deterministic { g: DetFn },
    /// `b(t) = W_1 g(t)`.
    TerminalScaled { g: DetFn },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ProcessKind {
    Const,
    Det,
    AdaptedW,
    NoncausalW1,
    NoncausalBridge,
    NoncausalMidpoint,
}

impl ProcessKind {
    pub const ALL: [ProcessKind; 6] = [
        ProcessKind::Const,
        ProcessKind::Det,
        ProcessKind::AdaptedW,
        ProcessKind::NoncausalW1,
        ProcessKind::NoncausalBridge,
        ProcessKind::NoncausalMidpoint,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProcessKind::Const => "CONST",
            ProcessKind::Det => "DET",
            ProcessKind::AdaptedW => "ADAPTED_W",
            ProcessKind::NoncausalW1 => "NONCAUSAL_W1",
            ProcessKind::NoncausalBridge => "NONCAUSAL_BRIDGE",
            ProcessKind::NoncausalMidpoint => "NONCAUSAL_MIDPOINT",
        }
    }
}

impl fmt::Display for ProcessKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for ProcessKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let up = s.trim().to_ascii_uppercase().replace('-', "_");
        ProcessKind::ALL
            .into_iter()
            .find(|k| k.name() == up)
            .ok_or_else(|| Error::Config(format!("unknown process kind '{s}'")))
    }
}

/// Structure of a derivative table `D_r c(s)` on the grid, for the 0/1
/// patterns the catalog needs. `s` indexes the integrand node, `r` the
/// increment being differentiated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativeKernel {
    Zero,
    Ones,
    /// `1{r < s}`
    Before,
    /// `1{r ≥ s}`
    From,
    /// `1{r < end}`
    Prefix { end: usize },
}

impl DerivativeKernel {
    pub fn entry(self, s: usize, r: usize) -> f64 {
        let hit = match self {
            DerivativeKernel::Zero => false,
            DerivativeKernel::Ones => true,
            DerivativeKernel::Before => r < s,
            DerivativeKernel::From => r >= s,
            DerivativeKernel::Prefix { end } => r < end,
        };
        if hit {
            1.0
        } else {
            0.0
        }
    }

    pub fn is_zero(self) -> bool {
        self == DerivativeKernel::Zero
    }

    /// `out[r] = Σ_s K(s, r) w[s]`.
    pub fn sum_over_s<T>(self, w: &[T]) -> Vec<T>
    where
        T: Copy + Default + std::ops::Add<Output = T>,
    {
        let m = w.len();
        let zero = T::default();
        let total = || w.iter().fold(zero, |a, &b| a + b);
        match self {
            DerivativeKernel::Zero => vec![zero; m],
            DerivativeKernel::Ones => vec![total(); m],
            DerivativeKernel::Before => {
                // Σ_{s > r} w[s]
                let mut out = vec![zero; m];
                let mut acc = zero;
                for r in (0..m).rev() {
                    out[r] = acc;
                    acc = acc + w[r];
                }
                out
            }
            DerivativeKernel::From => {
                // Σ_{s ≤ r} w[s]
                let mut out = vec![zero; m];
                let mut acc = zero;
                for r in 0..m {
                    acc = acc + w[r];
                    out[r] = acc;
                }
                out
            }
            DerivativeKernel::Prefix { end } => {
                let t = total();
                (0..m).map(|r| if r < end { t } else { zero }).collect()
            }
        }
    }

    /// `out[s] = Σ_r K(s, r) w[r]`.
    pub fn sum_over_r<T>(self, w: &[T]) -> Vec<T>
    where
        T: Copy + Default + std::ops::Add<Output = T>,
    {
        let m = w.len();
        let zero = T::default();
        let total = || w.iter().fold(zero, |a, &b| a + b);
        match self {
            DerivativeKernel::Zero => vec![zero; m],
            DerivativeKernel::Ones => vec![total(); m],
            DerivativeKernel::Before => {
                // Σ_{r < s} w[r]
                let mut out = vec![zero; m];
                let mut acc = zero;
                for s in 0..m {
                    out[s] = acc;
                    acc = acc + w[s];
                }
                out
            }
            DerivativeKernel::From => {
                // Σ_{r ≥ s} w[r]
                let mut out = vec![zero; m];
                let mut acc = zero;
                for s in (0..m).rev() {
                    acc = acc + w[s];
                    out[s] = acc;
                }
                out
            }
            DerivativeKernel::Prefix { end } => {
                let t = w[..end.min(m)].iter().fold(zero, |a, &b| a + b);
                vec![t; m]
            }
        }
    }
}

/// A validated catalog entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProcessSpec {
    pub kind: ProcessKind,
    /// Diffusion coefficient for `DET`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<DetFn>,
    #[serde(default)]
    pub drift: Drift,
}

/// Parameters accepted by [`make_process`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ProcessParams {
    pub f: Option<DetFn>,
    pub drift: Drift,
}

impl ProcessParams {
    pub fn with_f(mut self, f: DetFn) -> Self {
        self.f = Some(f);
        self
    }

    pub fn with_drift(mut self, drift: Drift) -> Self {
        self.drift = drift;
        self
    }
}

pub fn make_process(kind: ProcessKind, params: ProcessParams) -> Result<ProcessSpec> {
    let spec = ProcessSpec { kind, f: params.f, drift: params.drift };
    spec.validate()?;
    Ok(spec)
}

impl ProcessSpec {
    pub fn constant() -> Self {
        Self { kind: ProcessKind::Const, f: None, drift: Drift::None }
    }

    pub fn validate(&self) -> Result<()> {
        match (self.kind, &self.f) {
            (ProcessKind::Det, None) => {
                Err(Error::Config("DET requires a diffusion function f".into()))
            }
            (k, Some(_)) if k != ProcessKind::Det => {
                Err(Error::Config(format!("{k} does not take a diffusion function f")))
            }
            _ => Ok(()),
        }
    }

    /// Wiener chaos order of `a`.
    pub fn a_chaos_order(&self) -> u32 {
        match self.kind {
            ProcessKind::Const | ProcessKind::Det => 0,
            _ => 1,
        }
    }

    /// Whether the closed-form `X` coincides with the discrete divergence
    /// up to rounding, which makes the discrete multiplication formulas and
    /// remainder decomposition exact for the sampled SFCs.
    pub fn is_discretely_exact(&self) -> bool {
        !matches!(self.kind, ProcessKind::AdaptedW | ProcessKind::NoncausalBridge)
    }

    pub fn a_derivative(&self, grid: &TimeGrid) -> DerivativeKernel {
        match self.kind {
            ProcessKind::Const | ProcessKind::Det => DerivativeKernel::Zero,
            ProcessKind::AdaptedW => DerivativeKernel::Before,
            ProcessKind::NoncausalW1 => DerivativeKernel::Ones,
            ProcessKind::NoncausalBridge => DerivativeKernel::From,
            ProcessKind::NoncausalMidpoint => DerivativeKernel::Prefix { end: grid.m() / 2 },
        }
    }

    /// `D_r b(s) = weights[s] · K(s, r)`.
    pub fn b_derivative(&self, grid: &TimeGrid) -> Result<(DerivativeKernel, Vec<f64>)> {
        match &self.drift {
            Drift::TerminalScaled { g } => Ok((DerivativeKernel::Ones, g.nodes(grid)?)),
            _ => Ok((DerivativeKernel::Zero, vec![0.0; grid.m() + 1])),
        }
    }

    /// Closed-form `D_r a(t_s)` on the grid.
    pub fn derivative_a(&self, grid: &TimeGrid, s: usize, r: usize) -> f64 {
        self.a_derivative(grid).entry(s, r)
    }
}

/// Node arrays of `a`, `b` and `X` along one path.
#[derive(Debug, Clone)]
pub struct PathFunctionals {
    pub grid: TimeGrid,
    pub path: BrownianPath,
    /// `a(t_i)`, `i = 0..=m`.
    pub a: Vec<f64>,
    /// `b(t_i)`, `i = 0..=m`.
    pub b: Vec<f64>,
    /// `X(t_i)`, `i = 0..=m`, with `X_0 = 0`.
    pub x: Vec<f64>,
    pub a_derivative: DerivativeKernel,
    pub b_derivative: DerivativeKernel,
    /// Weights `g(t_s)` of the drift derivative `D_r b(s) = g(t_s) K(s, r)`.
    pub b_derivative_weights: Vec<f64>,
    pub kind: ProcessKind,
    /// See [`ProcessSpec::is_discretely_exact`].
    pub discretely_exact: bool,
    pub a_chaos_order: u32,
}

impl PathFunctionals {
    pub fn m(&self) -> usize {
        self.grid.m()
    }

    /// `X_{i+1} − X_i`, `i = 0..m`.
    pub fn dx(&self) -> Vec<f64> {
        self.x.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// `D_r a(t_s)`.
    pub fn da(&self, s: usize, r: usize) -> f64 {
        self.a_derivative.entry(s, r)
    }

    /// `D_r b(t_s)`.
    pub fn db(&self, s: usize, r: usize) -> f64 {
        self.b_derivative_weights[s] * self.b_derivative.entry(s, r)
    }
}

pub fn eval_functionals(spec: &ProcessSpec, path: &BrownianPath) -> Result<PathFunctionals> {
    spec.validate()?;
    let grid = *path.grid();
    let m = grid.m();
    let w = path.values();
    let w1 = path.terminal();
    let t = grid.nodes();

    if spec.kind == ProcessKind::NoncausalMidpoint && m % 2 != 0 {
        return invalid(format!("NONCAUSAL_MIDPOINT needs an even mesh, got m = {m}"));
    }
    let w_half = w[m / 2];

    let (a, mut x): (Vec<f64>, Vec<f64>) = match spec.kind {
        ProcessKind::Const => (vec![1.0; m + 1], w.to_vec()),
        ProcessKind::Det => {
            let f = spec.f.as_ref().expect("validated").nodes(&grid)?;
            let mut x = Vec::with_capacity(m + 1);
            let mut acc = 0.0;
            x.push(acc);
            for i in 0..m {
                acc += f[i] * path.increments()[i];
                x.push(acc);
            }
            (f, x)
        }
        ProcessKind::AdaptedW => (
            w.to_vec(),
            (0..=m).map(|i| 0.5 * (w[i] * w[i] - t[i])).collect(),
        ),
        ProcessKind::NoncausalW1 => (
            vec![w1; m + 1],
            (0..=m).map(|i| w1 * w[i] - t[i]).collect(),
        ),
        ProcessKind::NoncausalBridge => (
            w.iter().map(|wi| w1 - wi).collect(),
            (0..=m).map(|i| w1 * w[i] - 0.5 * (w[i] * w[i] + t[i])).collect(),
        ),
        ProcessKind::NoncausalMidpoint => (
            vec![w_half; m + 1],
            (0..=m).map(|i| w_half * w[i] - t[i].min(0.5)).collect(),
        ),
    };
    // Closed forms are exact at t = 0; pin X_0 against rounding.
    x[0] = 0.0;

    let b: Vec<f64> = match &spec.drift {
        Drift::None => vec![0.0; m + 1],
        Drift::Deterministic { g } => g.nodes(&grid)?,
        Drift::TerminalScaled { g } => g.nodes(&grid)?.into_iter().map(|v| w1 * v).collect(),
    };
    if !matches!(spec.drift, Drift::None) {
        let dt = grid.dt();
        let mut acc = 0.0;
        for i in 0..m {
            acc += b[i] * dt;
            x[i + 1] += acc;
        }
    }

    let (b_derivative, b_derivative_weights) = spec.b_derivative(&grid)?;
    Ok(PathFunctionals {
        grid,
        path: path.clone(),
        a,
        b,
        x,
        a_derivative: spec.a_derivative(&grid),
        b_derivative,
        b_derivative_weights,
        kind: spec.kind,
        discretely_exact: spec.is_discretely_exact(),
        a_chaos_order: spec.a_chaos_order(),
    })
}

/// A reference coefficient; `exact` is false when it comes from quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Truth {
    pub value: Complex64,
    pub exact: bool,
}

impl Truth {
    pub fn exact(value: Complex64) -> Self {
        Self { value, exact: true }
    }

    pub fn approximate(value: Complex64) -> Self {
        Self { value, exact: false }
    }
}

fn delta0(n: i64, v: f64) -> Complex64 {
    if n == 0 {
        Complex64::new(v, 0.0)
    } else {
        Complex64::new(0.0, 0.0)
    }
}

/// Trapezoid rule for `∫_0^1 W_t conj(e_n(t)) dt` on the path nodes.
fn trapezoid_w(path: &BrownianPath, n: i64) -> Complex64 {
    let grid = path.grid();
    let tab = BasisTable::new(grid);
    let m = grid.m();
    let w = path.values();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..m {
        acc += 0.5 * (tab.conj_value(n, i) * w[i] + tab.conj_value(n, i + 1) * w[i + 1]);
    }
    acc / m as f64
}

/// `∫_0^1 a(t) conj(e_n(t)) dt` for the path.
pub fn true_fourier_a(spec: &ProcessSpec, path: &BrownianPath, n: i64) -> Result<Truth> {
    let w = path.values();
    let m = path.m();
    Ok(match spec.kind {
        ProcessKind::Const => Truth::exact(delta0(n, 1.0)),
        ProcessKind::Det => spec.f.as_ref().expect("validated").coefficient(path.grid(), n)?,
        ProcessKind::NoncausalW1 => Truth::exact(delta0(n, path.terminal())),
        ProcessKind::NoncausalMidpoint => {
            if m % 2 != 0 {
                return invalid("NONCAUSAL_MIDPOINT needs an even mesh");
            }
            Truth::exact(delta0(n, w[m / 2]))
        }
        ProcessKind::AdaptedW => Truth::approximate(trapezoid_w(path, n)),
        ProcessKind::NoncausalBridge => {
            Truth::approximate(delta0(n, path.terminal()) - trapezoid_w(path, n))
        }
    })
}

/// `∫_0^1 b(t) conj(e_n(t)) dt` for the path.
pub fn true_fourier_b(spec: &ProcessSpec, path: &BrownianPath, n: i64) -> Result<Truth> {
    Ok(match &spec.drift {
        Drift::None => Truth::exact(Complex64::new(0.0, 0.0)),
        Drift::Deterministic { g } => g.coefficient(path.grid(), n)?,
        Drift::TerminalScaled { g } => {
            let c = g.coefficient(path.grid(), n)?;
            Truth { value: c.value * path.terminal(), exact: c.exact }
        }
    })
}
