//! Bohr-product identification of `a`, recovery of `b`, Fourier synthesis,
//! and the four-term remainder decomposition of the estimator error.
//!
//! The estimator is
//!
//! ```text
//! B_N(n) = 1/(2N+1) Σ_{k+ℓ=n, |ℓ|≤N} F_k(dX) · I_ℓ
//! ```
//!
//! which converges to `∫ a(t) conj(e_n(t)) dt` as `N → ∞`, with every
//! remainder term of size `O((2N+1)^{-1/2})`.

use log::warn;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::catalog::PathFunctionals;
use crate::error::{invalid, Error, Result};
use crate::grid::{eval_basis, BasisTable};
use crate::malliavin::skorokhod;
use crate::sfc::{sfc_range_with, wiener_sfc_range_with, CoefficientSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecoveryMode {
    /// Subtract the divergence of the catalog's own `a ē_n`.
    #[default]
    ClosedForm,
    /// Subtract the divergence of the synthesized estimate `Σ â_j e_j ē_n`.
    Synthesized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BohrConfig {
    /// Window half-width `N`.
    pub order: usize,
    /// Largest reported frequency `M`.
    pub max_freq: usize,
    #[serde(default)]
    pub mode: RecoveryMode,
    /// Accept grids below `m ≥ 8(N + M)` with a warning.
    #[serde(default)]
    pub allow_coarse_grid: bool,
}

impl BohrConfig {
    pub fn new(order: usize, max_freq: usize) -> Self {
        Self { order, max_freq, mode: RecoveryMode::ClosedForm, allow_coarse_grid: false }
    }

    pub fn with_mode(mut self, mode: RecoveryMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.order < 1 {
            return invalid("Bohr window order must be at least 1");
        }
        Ok(())
    }

    pub fn check_grid(&self, m: usize) -> Result<()> {
        self.validate()?;
        let need = 8 * (self.order + self.max_freq);
        if m < need {
            if self.allow_coarse_grid && m > 2 * (self.order + self.max_freq) {
                warn!("mesh m = {m} below recommended {need}; discretization bias may dominate");
            } else {
                return invalid(format!(
                    "mesh m = {m} too coarse for N = {}, M = {}; need m >= {need}",
                    self.order, self.max_freq
                ));
            }
        }
        Ok(())
    }
}

/// `B_N(n) = 1/(2N+1) Σ_{|ℓ|≤N} F_{n−ℓ} I_ℓ`.
pub fn bohr_product(
    sfc: &CoefficientSet,
    wiener: &CoefficientSet,
    n: i64,
    order: usize,
) -> Result<Complex64> {
    let order_i = order as i64;
    if wiener.max_freq() < order {
        return invalid(format!(
            "Wiener coefficients cover |l| <= {}, window needs {order}",
            wiener.max_freq()
        ));
    }
    if !sfc.contains(n - order_i) || !sfc.contains(n + order_i) {
        return invalid(format!(
            "SFCs cover |k| <= {}, window at n = {n} needs {}",
            sfc.max_freq(),
            n.unsigned_abs() as usize + order
        ));
    }
    let sum: Complex64 = (-order_i..=order_i)
        .map(|l| sfc.at(n - l) * wiener.at(l))
        .sum();
    Ok(sum / (2 * order + 1) as f64)
}

/// SFCs and Wiener coefficients needed by a Bohr window of a given order.
#[derive(Debug, Clone)]
pub struct Spectra {
    pub sfc: CoefficientSet,
    pub wiener: CoefficientSet,
}

impl Spectra {
    pub fn compute(table: &BasisTable, pf: &PathFunctionals, order: usize, max_freq: usize) -> Result<Self> {
        Ok(Self {
            sfc: sfc_range_with(table, pf, order + max_freq)?,
            wiener: wiener_sfc_range_with(table, &pf.path, order)?,
        })
    }

    pub fn estimate(&self, n: i64, order: usize) -> Result<Complex64> {
        bohr_product(&self.sfc, &self.wiener, n, order)
    }

    pub fn estimates(&self, order: usize, max_freq: usize) -> Result<CoefficientSet> {
        let m = max_freq as i64;
        let entries = (-m..=m)
            .map(|n| self.estimate(n, order))
            .collect::<Result<Vec<_>>>()?;
        CoefficientSet::new(max_freq, entries)
    }
}

/// Per-path estimates of `∫ a ē_n dt` for `|n| ≤ M`.
pub fn identify_a(pf: &PathFunctionals, cfg: &BohrConfig) -> Result<CoefficientSet> {
    cfg.check_grid(pf.m())?;
    let table = BasisTable::new(&pf.grid);
    Spectra::compute(&table, pf, cfg.order, cfg.max_freq)?.estimates(cfg.order, cfg.max_freq)
}

/// `b̂_n = F_n(dX) − ∫ a ē_n dW` for `|n| ≤ M`, with `a` either the catalog's
/// or the synthesized estimate, per `cfg.mode`.
pub fn recover_b(
    pf: &PathFunctionals,
    a_hat: &CoefficientSet,
    cfg: &BohrConfig,
) -> Result<CoefficientSet> {
    cfg.check_grid(pf.m())?;
    let table = BasisTable::new(&pf.grid);
    let spectra = Spectra::compute(&table, pf, cfg.order, cfg.max_freq)?;
    recover_b_with(&table, pf, &spectra, a_hat, cfg)
}

pub(crate) fn recover_b_with(
    table: &BasisTable,
    pf: &PathFunctionals,
    spectra: &Spectra,
    a_hat: &CoefficientSet,
    cfg: &BohrConfig,
) -> Result<CoefficientSet> {
    let m = pf.m();
    let max = cfg.max_freq as i64;
    match cfg.mode {
        RecoveryMode::ClosedForm => {
            let diag_a: Vec<Complex64> =
                (0..m).map(|i| Complex64::new(pf.da(i, i), 0.0)).collect();
            let entries = (-max..=max)
                .map(|n| {
                    let vals: Vec<Complex64> =
                        (0..m).map(|i| table.conj_value(n, i) * pf.a[i]).collect();
                    let diag: Vec<Complex64> =
                        (0..m).map(|i| table.conj_value(n, i) * diag_a[i]).collect();
                    spectra.sfc.at(n) - skorokhod(&pf.path, &vals, &diag)
                })
                .collect();
            CoefficientSet::new(cfg.max_freq, entries)
        }
        RecoveryMode::Synthesized => {
            if pf.a_chaos_order > 1 || !pf.discretely_exact {
                return Err(Error::UnsupportedMode(format!(
                    "synthesized recovery needs a discretely exact chaos-1 diffusion; {} is not",
                    pf.kind
                )));
            }
            if a_hat.max_freq() < cfg.max_freq {
                return invalid("estimate does not cover the requested frequencies");
            }
            let (values, derivative) = synthesized_field(table, pf, spectra, a_hat, cfg)?;
            let entries = (-max..=max)
                .map(|n| {
                    let vals: Vec<Complex64> =
                        (0..m).map(|i| values[i] * table.conj_value(n, i)).collect();
                    let diag: Vec<Complex64> =
                        (0..m).map(|i| derivative[i] * table.conj_value(n, i)).collect();
                    spectra.sfc.at(n) - skorokhod(&pf.path, &vals, &diag)
                })
                .collect();
            CoefficientSet::new(cfg.max_freq, entries)
        }
    }
}

/// Values `â(t_i) = Σ_j â_j e_j(t_i)` and diagonal derivatives `D_{t_i} â(t_i)`,
/// by the product rule applied to `â_j = c Σ_ℓ F_{j−ℓ} I_ℓ`.
fn synthesized_field(
    table: &BasisTable,
    pf: &PathFunctionals,
    spectra: &Spectra,
    a_hat: &CoefficientSet,
    cfg: &BohrConfig,
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let m = pf.m();
    let order = cfg.order as i64;
    let max = cfg.max_freq as i64;
    let scale = 1.0 / (2 * cfg.order + 1) as f64;
    let dw = pf.path.increments();

    // H(s) = Σ_ℓ e_ℓ(t_s) I_ℓ, so Σ_ℓ conj(e_{j−ℓ}(t_s)) I_ℓ = conj(e_j(t_s)) H(s).
    let h: Vec<Complex64> = (0..m)
        .map(|s| {
            (-order..=order)
                .map(|l| table.value(l, s) * spectra.wiener.at(l))
                .sum()
        })
        .collect();

    let mut values = vec![Complex64::new(0.0, 0.0); m];
    let mut derivative = vec![Complex64::new(0.0, 0.0); m];
    for j in -max..=max {
        let aj = a_hat.at(j);
        let hj: Vec<Complex64> = (0..m).map(|s| table.conj_value(j, s) * h[s]).collect();
        let via_dw: Vec<Complex64> = hj.iter().zip(dw).map(|(x, d)| x * d).collect();
        let via_b: Vec<Complex64> = hj
            .iter()
            .zip(&pf.b_derivative_weights)
            .map(|(x, g)| x * g)
            .collect();
        let sum_a = pf.a_derivative.sum_over_s(&via_dw);
        let sum_b = pf.b_derivative.sum_over_s(&via_b);
        for i in 0..m {
            // Σ_ℓ D_i F_{j−ℓ} · I_ℓ
            let d_sfc = pf.a[i] * hj[i] + sum_a[i] + sum_b[i] / m as f64;
            // Σ_ℓ F_{j−ℓ} · D_i I_ℓ
            let d_wiener: Complex64 = (-order..=order)
                .map(|l| spectra.sfc.at(j - l) * table.conj_value(l, i))
                .sum();
            let ej = table.value(j, i);
            values[i] += aj * ej;
            derivative[i] += scale * (d_sfc + d_wiener) * ej;
        }
    }
    Ok((values, derivative))
}

/// Partial Fourier sum `Σ_{|n|≤M} c_n e_n(t)`.
pub fn synthesize(coeffs: &CoefficientSet, t: f64) -> Complex64 {
    coeffs.iter().map(|(n, c)| c * eval_basis(n, t)).sum()
}

/// The four remainder terms of `B_N(n) − ∫ a ē_n dt`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RemainderTerms {
    /// `1/(2N+1) ∫ ( ∫ a(s) ē_n(s) K_N(s−t) dW_s ) dW_t`
    pub a_dw_dw: Complex64,
    /// `1/(2N+1) ∫ ( ∫ D_t a(s) K_N(s−t) dt ) ē_n(s) dW_s`, the order in which the
    /// product formula produces it; for `D_t a(s)` symmetric in `(s, t)` this is
    /// the same as integrating `ds` inside and `dW_t` outside.
    pub da_ds_dw: Complex64,
    /// `1/(2N+1) ∫ ( ∫ b(s) ē_n(s) K_N(s−t) ds ) dW_t`
    pub b_ds_dw: Complex64,
    /// `1/(2N+1) ∫∫ D_t b(s) ē_n(s) K_N(s−t) ds dt`
    pub db_ds_dt: Complex64,
}

impl RemainderTerms {
    pub fn sum(&self) -> Complex64 {
        self.a_dw_dw + self.da_ds_dw + self.b_ds_dw + self.db_ds_dt
    }
}

/// Each remainder term computed directly as a (double) discrete Skorokhod
/// integral against the Dirichlet kernel table, independently of the
/// coefficient sums that define `B_N(n)`.
pub fn remainder_terms(pf: &PathFunctionals, n: i64, order: usize) -> Result<RemainderTerms> {
    if !pf.discretely_exact {
        return Err(Error::UnsupportedMode(format!(
            "{} uses a continuum closed form; the discrete decomposition does not apply",
            pf.kind
        )));
    }
    let m = pf.m();
    crate::sfc::alias_guard(m, n.unsigned_abs() as usize + order)?;
    let table = BasisTable::new(&pf.grid);
    let kern = table.dirichlet_table(order);
    let dw = pf.path.increments();
    let inv_m = 1.0 / m as f64;
    let zero = Complex64::new(0.0, 0.0);

    let en: Vec<Complex64> = table.conj_row(n);
    // Integrand of the inner dW_s integral together with its Skorokhod correction.
    let inner_w: Vec<Complex64> = (0..m)
        .map(|s| en[s] * (pf.a[s] * dw[s] - pf.da(s, s) * inv_m))
        .collect();
    let b_en: Vec<Complex64> = (0..m).map(|s| en[s] * pf.b[s]).collect();

    let mut a_outer = zero;
    let mut a_corr = zero;
    let mut da_outer = zero;
    let mut b_outer = zero;
    let mut b_corr = zero;
    let mut db = zero;
    for t in 0..m {
        let mut inner = zero;
        let mut d_inner = zero;
        let mut da_v = zero;
        let mut b_v = zero;
        let mut db_v = zero;
        for s in 0..m {
            let k = kern[(s + m - t) % m];
            inner += inner_w[s] * k;
            let da = pf.da(s, t);
            if da != 0.0 {
                let term = en[s] * (da * dw[s] * k);
                d_inner += term;
                da_v += term;
            }
            b_v += b_en[s] * k;
            let dbv = pf.db(s, t);
            if dbv != 0.0 {
                db_v += en[s] * (dbv * k);
            }
        }
        // D_t of the inner integral: derivative of the integrand plus the
        // diagonal term a_t ē_n(t) K_N(0).
        d_inner += en[t] * pf.a[t] * kern[0];
        a_outer += inner * dw[t];
        a_corr += d_inner;
        da_outer += da_v * inv_m;
        b_outer += b_v * inv_m * dw[t];
        b_corr += db_v * inv_m;
        db += db_v;
    }
    let c = 1.0 / (2 * order + 1) as f64;
    Ok(RemainderTerms {
        a_dw_dw: c * (a_outer - a_corr * inv_m),
        da_ds_dw: c * da_outer,
        b_ds_dw: c * (b_outer - b_corr * inv_m),
        db_ds_dt: c * db * inv_m * inv_m,
    })
}
