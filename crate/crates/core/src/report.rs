//! Configuration loading, CSV/JSON report emission, and the built-in
//! verification suites behind the `selftest` and `verify-multiplication`
//! commands.
//!
//! Numbers are printed in the shortest decimal form that parses back to the
//! same `f64`, so reports are byte-reproducible and lossless.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bohr::{identify_a, remainder_terms, BohrConfig};
use crate::brownian::{sample_path, SeedSpec};
use crate::catalog::{eval_functionals, true_fourier_a, DetFn, Drift, ProcessKind, ProcessSpec, TrigPoly};
use crate::error::{Error, Result};
use crate::experiment::{ExperimentConfig, ExperimentResult, IdentifyResult};
use crate::grid::{kernel_l2_identity, make_grid, BasisTable};
use crate::malliavin::{lemma_fdelta_residual, prop1_residual, prop2_residual, DiscreteFunctional};

pub const CONVERGENCE_COLUMNS: [&str; 9] =
    ["process", "n", "N", "m", "P", "seed", "mean_abs_err", "lp_err", "std_err"];

pub const IDENTIFY_COLUMNS: [&str; 14] = [
    "process", "quantity", "n", "N", "m", "P", "seed", "mean_est_re", "mean_est_im",
    "est_std_err", "mean_true_re", "mean_true_im", "true_std_err", "rms_err",
];

pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let cfg: ExperimentConfig =
        serde_json::from_str(text).map_err(|e| Error::Config(format!("config: {e}")))?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}

/// SHA-256 of the canonical JSON form of the configuration.
pub fn config_hash(cfg: &ExperimentConfig) -> String {
    let canonical = serde_json::to_vec(cfg).expect("config serializes");
    hex::encode(Sha256::digest(&canonical))
}

fn num(x: f64) -> String {
    format!("{x}")
}

pub fn write_convergence_csv<W: Write>(result: &ExperimentResult, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(CONVERGENCE_COLUMNS)?;
    for r in &result.rows {
        out.write_record([
            result.process.clone(),
            r.n.to_string(),
            r.order.to_string(),
            result.m.to_string(),
            result.paths.to_string(),
            result.seed.to_string(),
            num(r.mean_abs_err),
            num(r.lp_err),
            num(r.std_err),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn convergence_csv(result: &ExperimentResult) -> Result<String> {
    let mut buf = Vec::new();
    write_convergence_csv(result, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

/// One parsed line of a convergence CSV.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct ConvergenceCsvRow {
    pub process: String,
    pub n: i64,
    #[serde(rename = "N")]
    pub order: usize,
    pub m: usize,
    #[serde(rename = "P")]
    pub paths: usize,
    pub seed: u64,
    pub mean_abs_err: f64,
    pub lp_err: f64,
    pub std_err: f64,
}

pub fn read_convergence_csv<R: Read>(r: R) -> Result<Vec<ConvergenceCsvRow>> {
    let mut rd = csv::Reader::from_reader(r);
    let headers = rd.headers()?.clone();
    if headers.iter().ne(CONVERGENCE_COLUMNS) {
        return Err(Error::InvalidArgument(format!("unexpected header {headers:?}")));
    }
    rd.deserialize().map(|r| r.map_err(Error::from)).collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Metadata {
    pub version: String,
    pub config_hash: String,
}

impl Metadata {
    pub fn for_config(cfg: &ExperimentConfig) -> Self {
        Self { version: env!("CARGO_PKG_VERSION").to_string(), config_hash: config_hash(cfg) }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub metadata: Metadata,
    pub config: ExperimentConfig,
    pub result: ExperimentResult,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdentifyReport {
    pub metadata: Metadata,
    pub config: ExperimentConfig,
    pub result: IdentifyResult,
}

pub fn write_identify_csv<W: Write>(result: &IdentifyResult, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(IDENTIFY_COLUMNS)?;
    for r in &result.rows {
        out.write_record([
            result.process.clone(),
            r.quantity.to_string(),
            r.n.to_string(),
            result.order.to_string(),
            result.m.to_string(),
            result.paths.to_string(),
            result.seed.to_string(),
            num(r.estimate.mean.re),
            num(r.estimate.mean.im),
            num(r.estimate.std_err),
            num(r.truth.mean.re),
            num(r.truth.mean.im),
            num(r.truth.std_err),
            num(r.rms_err),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Writes `convergence.csv` and `convergence.json` into `dir`.
pub fn write_convergence_outputs(
    dir: &Path,
    cfg: &ExperimentConfig,
    result: &ExperimentResult,
) -> Result<(PathBuf, PathBuf)> {
    fs::create_dir_all(dir)?;
    let csv_path = dir.join("convergence.csv");
    let json_path = dir.join("convergence.json");
    write_convergence_csv(result, fs::File::create(&csv_path)?)?;
    let report = ConvergenceReport {
        metadata: Metadata::for_config(cfg),
        config: cfg.clone(),
        result: result.clone(),
    };
    fs::write(&json_path, serde_json::to_string_pretty(&report)?)?;
    Ok((csv_path, json_path))
}

/// Writes `identify.csv` and `identify.json` into `dir`.
pub fn write_identify_outputs(
    dir: &Path,
    cfg: &ExperimentConfig,
    result: &IdentifyResult,
) -> Result<(PathBuf, PathBuf)> {
    fs::create_dir_all(dir)?;
    let csv_path = dir.join("identify.csv");
    let json_path = dir.join("identify.json");
    write_identify_csv(result, fs::File::create(&csv_path)?)?;
    let report = IdentifyReport {
        metadata: Metadata::for_config(cfg),
        config: cfg.clone(),
        result: result.clone(),
    };
    fs::write(&json_path, serde_json::to_string_pretty(&report)?)?;
    Ok((csv_path, json_path))
}

/// A named check with its worst observed value and the bound it must respect.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub passed: bool,
}

impl Check {
    fn at_most(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self { name: name.into(), value, bound, passed: value <= bound }
    }
}

impl std::fmt::Display for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} {:<48} {:.3e} (bound {:.1e})",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.value,
            self.bound
        )
    }
}

/// Processes exercised by the multiplication checks: every catalog kind,
/// each paired with a drift.
pub fn multiplication_catalog() -> Vec<ProcessSpec> {
    let cos = DetFn::Trig(TrigPoly::cosine(1, 1.0));
    ProcessKind::ALL
        .into_iter()
        .map(|kind| ProcessSpec {
            kind,
            f: (kind == ProcessKind::Det).then(|| cos.clone()),
            drift: if kind == ProcessKind::NoncausalW1 {
                Drift::TerminalScaled { g: cos.clone() }
            } else {
                Drift::Deterministic { g: cos.clone() }
            },
        })
        .collect()
}

/// Worst residuals of both product formulas over `paths`
/// paths, for `e ∈ {e_0, e_1}`.
pub fn verify_multiplication(
    specs: &[ProcessSpec],
    paths: usize,
    mesh: usize,
    seed: u64,
) -> Result<Vec<Check>> {
    let grid = make_grid(mesh)?;
    let table = BasisTable::new(&grid);
    let es = [(0i64, table.row(0)), (1, table.row(1))];
    let mut checks = Vec::new();
    for spec in specs {
        for (n, e) in &es {
            let (mut r1, mut r2) = (0f64, 0f64);
            for i in 0..paths as u64 {
                let p = sample_path(SeedSpec::new(seed, i), &grid);
                r1 = r1.max(prop1_residual(spec, e, &p)?);
                r2 = r2.max(prop2_residual(spec, e, &p)?);
            }
            checks.push(Check::at_most(format!("product a dW, {} e_{n}", spec.kind), r1, 1e-9));
            checks.push(Check::at_most(format!("product b dt, {} e_{n}", spec.kind), r2, 1e-9));
        }
    }
    Ok(checks)
}

/// Worst integration-by-parts residual for `F ∈ {W_1, W_1² − 1, c}` and `e ∈ {e_0, e_1, e_{−3}}`.
pub fn verify_integration_by_parts(paths: usize, mesh: usize, seed: u64) -> Result<Vec<Check>> {
    let grid = make_grid(mesh)?;
    let table = BasisTable::new(&grid);
    let mut worst = [0f64; 3];
    for i in 0..paths as u64 {
        let p = sample_path(SeedSpec::new(seed, i), &grid);
        let w1 = DiscreteFunctional::terminal(&p);
        let h2 = w1.mul(&w1).add(&DiscreteFunctional::constant(Complex64::new(-1.0, 0.0), mesh));
        let c = DiscreteFunctional::constant(Complex64::new(1.75, 0.0), mesh);
        for (k, f) in [&w1, &h2, &c].into_iter().enumerate() {
            for n in [0i64, 1, -3] {
                worst[k] = worst[k].max(lemma_fdelta_residual(f, &table.row(n), &p)?);
            }
        }
    }
    Ok(["W_1", "W_1^2 - 1", "constant"]
        .iter()
        .zip(worst)
        .map(|(name, v)| Check::at_most(format!("integration by parts, F = {name}"), v, 1e-10))
        .collect())
}

/// Exact discrete identities: kernel L² norm, orthogonality, integration by
/// parts, both product formulas, and the remainder decomposition.
pub fn run_selftest() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for order in [1usize, 5, 32] {
        let grid = make_grid(4 * order + 4)?;
        let v = kernel_l2_identity(order, &grid)?;
        let want = (2 * order + 1) as f64;
        checks.push(Check::at_most(format!("kernel L2 identity, N = {order}"), (v - want).abs() / want, 1e-9));
    }

    let grid = make_grid(64)?;
    let table = BasisTable::new(&grid);
    let ones = vec![1.0; 64];
    let worst = (-63i64..=63)
        .map(|j| {
            let want = if j == 0 { 1.0 } else { 0.0 };
            (table.conj_dot_real(j, &ones) / 64.0 - want).norm()
        })
        .fold(0.0, f64::max);
    checks.push(Check::at_most("discrete orthogonality, m = 64", worst, 1e-12));

    checks.extend(verify_integration_by_parts(10, 256, 1)?);
    checks.extend(verify_multiplication(&multiplication_catalog(), 5, 256, 2)?);

    let grid = make_grid(256)?;
    let mut worst = 0f64;
    for spec in multiplication_catalog().iter().filter(|s| s.is_discretely_exact()) {
        for i in 0..3 {
            let p = sample_path(SeedSpec::new(3, i), &grid);
            let pf = eval_functionals(spec, &p)?;
            let est = identify_a(&pf, &BohrConfig::new(8, 1))?;
            for n in [0i64, 1] {
                let r = remainder_terms(&pf, n, 8)?;
                let truth = true_fourier_a(spec, &p, n)?.value;
                worst = worst.max((est.at(n) - truth - r.sum()).norm());
            }
        }
    }
    checks.push(Check::at_most("remainder decomposition, N = 8", worst, 1e-9));
    Ok(checks)
}
