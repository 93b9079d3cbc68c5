//! Monte Carlo driver: replicates identification over independent paths,
//! aggregates sample `L^p` errors per `(N, n)`, and fits decay rates.
//!
//! Paths run in parallel, but results are collected by path index and
//! reduced sequentially in that order, so the output does not depend on the
//! number of worker threads.

use std::time::{Duration, Instant};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::bohr::{recover_b_with, BohrConfig, RecoveryMode, Spectra};
use crate::brownian::{sample_path, SeedSpec};
use crate::catalog::{eval_functionals, true_fourier_a, true_fourier_b, ProcessSpec};
use crate::error::{invalid, Error, Result};
use crate::grid::{BasisTable, TimeGrid};

fn default_n_list() -> Vec<usize> {
    vec![4, 8, 16, 32, 64, 128, 256]
}
fn default_max_freq() -> usize {
    4
}
fn default_mesh() -> usize {
    4096
}
fn default_paths() -> usize {
    2000
}
fn default_p() -> f64 {
    2.0
}
fn default_band() -> [f64; 2] {
    [-0.65, -0.35]
}

/// Experiment configuration; the JSON form is the CLI config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub process: ProcessSpec,
    #[serde(default = "default_n_list")]
    pub n_list: Vec<usize>,
    #[serde(default = "default_max_freq")]
    pub max_freq: usize,
    #[serde(default = "default_mesh")]
    pub mesh: usize,
    #[serde(default = "default_paths")]
    pub paths: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_p")]
    pub p_exponent: f64,
    #[serde(default)]
    pub recovery_mode: RecoveryMode,
    /// Accepted range for fitted log-log slopes.
    #[serde(default = "default_band")]
    pub slope_band: [f64; 2],
    #[serde(default)]
    pub allow_coarse_grid: bool,
}

impl ExperimentConfig {
    pub fn new(process: ProcessSpec) -> Self {
        Self {
            process,
            n_list: default_n_list(),
            max_freq: default_max_freq(),
            mesh: default_mesh(),
            paths: default_paths(),
            seed: 0,
            p_exponent: default_p(),
            recovery_mode: RecoveryMode::default(),
            slope_band: default_band(),
            allow_coarse_grid: false,
        }
    }

    pub fn max_order(&self) -> usize {
        self.n_list.iter().copied().max().unwrap_or(0)
    }

    pub fn bohr(&self, order: usize) -> BohrConfig {
        BohrConfig {
            order,
            max_freq: self.max_freq,
            mode: self.recovery_mode,
            allow_coarse_grid: self.allow_coarse_grid,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let cfg = |msg: String| Err(Error::Config(msg));
        self.process.validate()?;
        if self.n_list.is_empty() {
            return cfg("n_list is empty".into());
        }
        if self.n_list[0] < 1 || self.n_list.windows(2).any(|w| w[0] >= w[1]) {
            return cfg(format!("n_list must be strictly increasing and positive: {:?}", self.n_list));
        }
        if self.paths < 100 {
            return cfg(format!("need at least 100 paths, got {}", self.paths));
        }
        if !(self.p_exponent > 1.0 && self.p_exponent.is_finite()) {
            return cfg(format!("p_exponent must lie in (1, inf), got {}", self.p_exponent));
        }
        if self.slope_band[0] > self.slope_band[1] {
            return cfg(format!("slope_band {:?} is empty", self.slope_band));
        }
        let grid = TimeGrid::new(self.mesh).map_err(|e| Error::Config(e.to_string()))?;
        self.bohr(self.max_order())
            .check_grid(grid.m())
            .map_err(|e| Error::Config(e.to_string()))
    }
}

/// Error statistics of `B_N(n)` against the true coefficient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRow {
    pub n: i64,
    #[serde(rename = "N")]
    pub order: usize,
    pub mean_abs_err: f64,
    pub lp_err: f64,
    pub std_err: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub slope: f64,
    pub intercept: f64,
    /// 95% confidence half-width of the slope.
    pub half_width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyFit {
    pub n: i64,
    #[serde(flatten)]
    pub fit: DecayFit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub process: String,
    pub m: usize,
    pub paths: usize,
    pub seed: u64,
    pub p_exponent: f64,
    pub n_list: Vec<usize>,
    pub max_freq: usize,
    /// Ordered by `n`, then `N`.
    pub rows: Vec<ErrorRow>,
    pub fits: Vec<FrequencyFit>,
    /// Wall time; not serialized so reports stay reproducible.
    #[serde(skip)]
    pub elapsed: Option<Duration>,
}

impl ExperimentResult {
    pub fn row(&self, n: i64, order: usize) -> Option<&ErrorRow> {
        self.rows.iter().find(|r| r.n == n && r.order == order)
    }

    pub fn fit(&self, n: i64) -> Option<&DecayFit> {
        self.fits.iter().find(|f| f.n == n).map(|f| &f.fit)
    }

    /// Frequencies whose fitted slope falls outside `band`.
    pub fn slopes_outside(&self, band: [f64; 2]) -> Vec<i64> {
        self.fits
            .iter()
            .filter(|f| !(band[0]..=band[1]).contains(&f.fit.slope))
            .map(|f| f.n)
            .collect()
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Absolute errors `|B_N(n) − truth(n)|` of one path, laid out `[N][n]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PathOutcome {
    pub path_index: u64,
    pub errors: Vec<f64>,
}

fn thread_pool(threads: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        b = b.num_threads(t.max(1));
    }
    b.build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))
}

/// Errors of every `(N, n)` on one path.
pub fn simulate_path(cfg: &ExperimentConfig, table: &BasisTable, path_index: u64) -> Result<PathOutcome> {
    let grid = TimeGrid::new(cfg.mesh)?;
    let path = sample_path(SeedSpec::new(cfg.seed, path_index), &grid);
    let pf = eval_functionals(&cfg.process, &path)?;
    let spectra = Spectra::compute(table, &pf, cfg.max_order(), cfg.max_freq)?;
    let max = cfg.max_freq as i64;
    let truths = (-max..=max)
        .map(|n| true_fourier_a(&cfg.process, &path, n).map(|t| t.value))
        .collect::<Result<Vec<_>>>()?;
    let mut errors = Vec::with_capacity(cfg.n_list.len() * truths.len());
    for &order in &cfg.n_list {
        for (n, truth) in (-max..=max).zip(&truths) {
            let e = (spectra.estimate(n, order)? - truth).norm();
            if !e.is_finite() {
                return Err(Error::NumericalFailure {
                    path_index,
                    what: format!("estimator error at N = {order}, n = {n}"),
                });
            }
            errors.push(e);
        }
    }
    Ok(PathOutcome { path_index, errors })
}

pub fn run_convergence(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    run_convergence_with_threads(cfg, None)
}

/// [`run_convergence`] on a pool of `threads` workers; the result does not
/// depend on the count.
pub fn run_convergence_with_threads(
    cfg: &ExperimentConfig,
    threads: Option<usize>,
) -> Result<ExperimentResult> {
    let start = Instant::now();
    let outcomes = simulate_paths(cfg, threads)?;
    let mut result = aggregate(cfg, &outcomes)?;
    result.elapsed = Some(start.elapsed());
    Ok(result)
}

/// Per-path outcomes for indices `0..cfg.paths`, in index order.
pub fn simulate_paths(cfg: &ExperimentConfig, threads: Option<usize>) -> Result<Vec<PathOutcome>> {
    cfg.validate()?;
    let grid = TimeGrid::new(cfg.mesh)?;
    let table = BasisTable::new(&grid);
    let pool = thread_pool(threads)?;
    pool.install(|| {
        (0..cfg.paths as u64)
            .into_par_iter()
            .map(|i| simulate_path(cfg, &table, i))
            .collect::<Result<Vec<_>>>()
    })
}

/// Reduces outcomes in the order given.
pub fn aggregate(cfg: &ExperimentConfig, outcomes: &[PathOutcome]) -> Result<ExperimentResult> {
    let width = 2 * cfg.max_freq + 1;
    let cells = cfg.n_list.len() * width;
    if outcomes.is_empty() {
        return invalid("no path outcomes to aggregate");
    }
    let mut abs = vec![CompensatedSum::default(); cells];
    let mut sq = vec![CompensatedSum::default(); cells];
    let mut pw = vec![CompensatedSum::default(); cells];
    for o in outcomes {
        if o.errors.len() != cells {
            return invalid(format!("path {} has {} cells, expected {cells}", o.path_index, o.errors.len()));
        }
        for (c, &e) in o.errors.iter().enumerate() {
            abs[c].add(e);
            sq[c].add(e * e);
            pw[c].add(e.powf(cfg.p_exponent));
        }
    }
    let p = outcomes.len() as f64;
    let max = cfg.max_freq as i64;
    let mut rows = Vec::with_capacity(cells);
    for (ni, n) in (-max..=max).enumerate() {
        for (oi, &order) in cfg.n_list.iter().enumerate() {
            let c = oi * width + ni;
            let mean = abs[c].value() / p;
            let var = ((sq[c].value() - p * mean * mean) / (p - 1.0).max(1.0)).max(0.0);
            rows.push(ErrorRow {
                n,
                order,
                mean_abs_err: mean,
                lp_err: (pw[c].value() / p).powf(1.0 / cfg.p_exponent),
                std_err: (var / p).sqrt(),
            });
        }
    }
    let mut fits = Vec::with_capacity(width);
    for n in -max..=max {
        let errs: Vec<f64> = rows.iter().filter(|r| r.n == n).map(|r| r.lp_err).collect();
        if cfg.n_list.len() >= 4 {
            fits.push(FrequencyFit { n, fit: fit_decay(&errs, &cfg.n_list)? });
        }
    }
    Ok(ExperimentResult {
        process: cfg.process.kind.to_string(),
        m: cfg.mesh,
        paths: outcomes.len(),
        seed: cfg.seed,
        p_exponent: cfg.p_exponent,
        n_list: cfg.n_list.clone(),
        max_freq: cfg.max_freq,
        rows,
        fits,
        elapsed: None,
    })
}

/// Least-squares slope of `ln(error)` against `ln(2N + 1)`.
pub fn fit_decay(errors: &[f64], n_list: &[usize]) -> Result<DecayFit> {
    if errors.len() != n_list.len() {
        return invalid(format!("{} errors for {} window orders", errors.len(), n_list.len()));
    }
    if errors.len() < 4 {
        return invalid(format!("need at least 4 points to fit a decay, got {}", errors.len()));
    }
    if let Some(e) = errors.iter().find(|e| !(**e > 0.0) || !e.is_finite()) {
        return invalid(format!("errors must be positive and finite, got {e}"));
    }
    let xs: Vec<f64> = n_list.iter().map(|&n| ((2 * n + 1) as f64).ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let dof = k - 2.0;
    let se = (ssr / dof / sxx).sqrt();
    let t = StudentsT::new(0.0, 1.0, dof)
        .map_err(|e| Error::InvalidArgument(e.to_string()))?
        .inverse_cdf(0.975);
    Ok(DecayFit { slope, intercept, half_width: t * se })
}

/// Sample mean and standard error of a complex estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleStats {
    pub mean: Complex64,
    pub std_err: f64,
}

impl SampleStats {
    pub fn from_samples(xs: &[Complex64]) -> Self {
        let p = xs.len() as f64;
        let mut re = CompensatedSum::default();
        let mut im = CompensatedSum::default();
        for x in xs {
            re.add(x.re);
            im.add(x.im);
        }
        let mean = Complex64::new(re.value() / p, im.value() / p);
        let mut ss = CompensatedSum::default();
        for x in xs {
            ss.add((x - mean).norm_sqr());
        }
        let var = ss.value() / (p - 1.0).max(1.0);
        Self { mean, std_err: (var / p).sqrt() }
    }

    /// `|mean − target| ≤ k · std_err`.
    pub fn within(&self, target: Complex64, k: f64) -> bool {
        (self.mean - target).norm() <= k * self.std_err
    }
}

/// Summary of `â_n` or `b̂_n` over paths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentifyRow {
    pub quantity: char,
    pub n: i64,
    pub estimate: SampleStats,
    pub truth: SampleStats,
    pub rms_err: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentifyResult {
    pub process: String,
    #[serde(rename = "N")]
    pub order: usize,
    pub m: usize,
    pub paths: usize,
    pub seed: u64,
    pub mode: RecoveryMode,
    pub rows: Vec<IdentifyRow>,
}

impl IdentifyResult {
    pub fn get(&self, quantity: char, n: i64) -> Option<&IdentifyRow> {
        self.rows.iter().find(|r| r.quantity == quantity && r.n == n)
    }
}

struct IdentifyOutcome {
    a_hat: Vec<Complex64>,
    a_true: Vec<Complex64>,
    b_hat: Vec<Complex64>,
    b_true: Vec<Complex64>,
}

/// Identifies `a` and recovers `b` at window order `order` on `cfg.paths` paths.
pub fn run_identification(
    cfg: &ExperimentConfig,
    order: usize,
    threads: Option<usize>,
) -> Result<IdentifyResult> {
    cfg.validate()?;
    let bohr = cfg.bohr(order);
    bohr.check_grid(cfg.mesh)?;
    let grid = TimeGrid::new(cfg.mesh)?;
    let table = BasisTable::new(&grid);
    let max = cfg.max_freq as i64;
    let run = |i: u64| -> Result<IdentifyOutcome> {
        let path = sample_path(SeedSpec::new(cfg.seed, i), &grid);
        let pf = eval_functionals(&cfg.process, &path)?;
        let spectra = Spectra::compute(&table, &pf, order, cfg.max_freq)?;
        let a_hat = spectra.estimates(order, cfg.max_freq)?;
        let b_hat = recover_b_with(&table, &pf, &spectra, &a_hat, &bohr)?;
        let a_true = (-max..=max)
            .map(|n| true_fourier_a(&cfg.process, &path, n).map(|t| t.value))
            .collect::<Result<Vec<_>>>()?;
        let b_true = (-max..=max)
            .map(|n| true_fourier_b(&cfg.process, &path, n).map(|t| t.value))
            .collect::<Result<Vec<_>>>()?;
        if a_hat.entries().iter().chain(b_hat.entries()).any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NumericalFailure { path_index: i, what: "non-finite estimate".into() });
        }
        Ok(IdentifyOutcome {
            a_hat: a_hat.entries().to_vec(),
            a_true,
            b_hat: b_hat.entries().to_vec(),
            b_true,
        })
    };
    let outcomes = thread_pool(threads)?.install(|| {
        (0..cfg.paths as u64).into_par_iter().map(run).collect::<Result<Vec<_>>>()
    })?;

    let mut rows = Vec::new();
    for (q, pick) in [
        ('a', (|o: &IdentifyOutcome| (&o.a_hat, &o.a_true)) as fn(&IdentifyOutcome) -> (&Vec<Complex64>, &Vec<Complex64>)),
        ('b', |o: &IdentifyOutcome| (&o.b_hat, &o.b_true)),
    ] {
        for (j, n) in (-max..=max).enumerate() {
            let est: Vec<Complex64> = outcomes.iter().map(|o| pick(o).0[j]).collect();
            let tru: Vec<Complex64> = outcomes.iter().map(|o| pick(o).1[j]).collect();
            let mut sq = CompensatedSum::default();
            for (e, t) in est.iter().zip(&tru) {
                sq.add((e - t).norm_sqr());
            }
            rows.push(IdentifyRow {
                quantity: q,
                n,
                estimate: SampleStats::from_samples(&est),
                truth: SampleStats::from_samples(&tru),
                rms_err: (sq.value() / est.len() as f64).sqrt(),
            });
        }
    }
    Ok(IdentifyResult {
        process: cfg.process.kind.to_string(),
        order,
        m: cfg.mesh,
        paths: cfg.paths,
        seed: cfg.seed,
        mode: cfg.recovery_mode,
        rows,
    })
}
