//! Acceptance suite. Run with `cargo test --test acceptance`; prints one
//! PASS/FAIL line per criterion and exits nonzero if any fails.

use std::fs;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_complex::Complex64;

use sfc_lab::bohr::{identify_a, remainder_terms, BohrConfig};
use sfc_lab::brownian::{sample_path, SeedSpec};
use sfc_lab::catalog::{eval_functionals, true_fourier_a, DetFn, Drift, ProcessKind, ProcessSpec, TrigPoly};
use sfc_lab::experiment::{run_convergence, run_identification, ExperimentConfig, SampleStats};
use sfc_lab::grid::{kernel_l2_identity, make_grid, BasisTable};
use sfc_lab::malliavin::{lemma_fdelta_residual, prop1_residual, prop2_residual, DiscreteFunctional};
use sfc_lab::Result;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { passed, detail })
}

fn cos1() -> DetFn {
    DetFn::Trig(TrigPoly::cosine(1, 1.0))
}

fn w1(drift: Drift) -> ProcessSpec {
    ProcessSpec { kind: ProcessKind::NoncausalW1, f: None, drift }
}

fn kernel_identity() -> Result<Outcome> {
    let mut worst = 0f64;
    for order in [1usize, 5, 32] {
        let v = kernel_l2_identity(order, &make_grid(4 * order + 4)?)?;
        let want = (2 * order + 1) as f64;
        worst = worst.max((v - want).abs() / want);
    }
    outcome(worst <= 1e-9, format!("max relative error {worst:.2e}"))
}

fn integration_by_parts() -> Result<Outcome> {
    let m = 1024;
    let grid = make_grid(m)?;
    let table = BasisTable::new(&grid);
    let es: Vec<Vec<Complex64>> = [0i64, 1, -3].iter().map(|&n| table.row(n)).collect();
    let mut worst = 0f64;
    for i in 0..100 {
        let p = sample_path(SeedSpec::new(0, i), &grid);
        let w = DiscreteFunctional::terminal(&p);
        let h2 = w.mul(&w).add(&DiscreteFunctional::constant(Complex64::new(-1.0, 0.0), m));
        let c = DiscreteFunctional::constant(Complex64::new(2.5, 0.0), m);
        for f in [&w, &h2, &c] {
            for e in &es {
                worst = worst.max(lemma_fdelta_residual(f, e, &p)?);
            }
        }
    }
    outcome(worst <= 1e-10, format!("max residual {worst:.2e}"))
}

fn multiplication_formulas() -> Result<Outcome> {
    let grid = make_grid(1024)?;
    let table = BasisTable::new(&grid);
    let es = [table.row(0), table.row(1)];
    let mut worst = 0f64;
    for kind in ProcessKind::ALL {
        let drift = if kind == ProcessKind::NoncausalW1 {
            Drift::TerminalScaled { g: cos1() }
        } else {
            Drift::Deterministic { g: cos1() }
        };
        let spec = ProcessSpec { kind, f: (kind == ProcessKind::Det).then(cos1), drift };
        for i in 0..100 {
            let p = sample_path(SeedSpec::new(1, i), &grid);
            for e in &es {
                worst = worst.max(prop1_residual(&spec, e, &p)?).max(prop2_residual(&spec, e, &p)?);
            }
        }
    }
    outcome(worst <= 1e-9, format!("max residual over 6 processes {worst:.2e}"))
}

fn bohr_mean() -> Result<Outcome> {
    let grid = make_grid(4096)?;
    let spec = ProcessSpec::constant();
    let mut ok = true;
    let mut detail = Vec::new();
    for order in [16usize, 256] {
        let mut b0 = Vec::with_capacity(2000);
        let mut b3 = Vec::with_capacity(2000);
        for i in 0..2000 {
            let pf = eval_functionals(&spec, &sample_path(SeedSpec::new(0, i), &grid))?;
            let est = identify_a(&pf, &BohrConfig::new(order, 3))?;
            b0.push(est.at(0));
            b3.push(est.at(3));
        }
        let (s0, s3) = (SampleStats::from_samples(&b0), SampleStats::from_samples(&b3));
        let pass0 = s0.within(Complex64::new(1.0, 0.0), 3.0);
        let pass3 = s3.within(Complex64::new(0.0, 0.0), 3.0);
        ok &= pass0 && pass3;
        detail.push(format!(
            "N={order}: B(0)={:.4}±{:.4} B(3)={:.4}±{:.4}",
            s0.mean.re, s0.std_err, s3.mean.norm(), s3.std_err
        ));
    }
    outcome(ok, detail.join("; "))
}

fn convergence_config(spec: ProcessSpec) -> ExperimentConfig {
    ExperimentConfig { max_freq: 2, mesh: 4096, paths: 2000, seed: 0, ..ExperimentConfig::new(spec) }
}

fn convergence_rate() -> Result<Outcome> {
    let mut ok = true;
    let mut detail = Vec::new();
    for spec in [ProcessSpec::constant(), w1(Drift::None)] {
        let cfg = convergence_config(spec);
        let res = run_convergence(&cfg)?;
        let bad = res.slopes_outside(cfg.slope_band);
        ok &= bad.is_empty();
        let slopes: Vec<String> = res.fits.iter().map(|f| format!("{:+.3}", f.fit.slope)).collect();
        detail.push(format!("{} slopes [{}]", res.process, slopes.join(" ")));
        if cfg.process.kind == ProcessKind::NoncausalW1 {
            let ratio = res.row(0, 256).expect("row").lp_err / res.row(0, 16).expect("row").lp_err;
            ok &= ratio <= 0.5;
            detail.push(format!("err(256)/err(16) = {ratio:.3}"));
        }
    }
    outcome(ok, detail.join("; "))
}

fn drift_recovery() -> Result<Outcome> {
    let cfg = ExperimentConfig {
        n_list: vec![16],
        max_freq: 1,
        mesh: 4096,
        paths: 2000,
        seed: 0,
        ..ExperimentConfig::new(w1(Drift::Deterministic { g: cos1() }))
    };
    let res = run_identification(&cfg, 16, None)?;
    let b1 = &res.get('b', 1).expect("row").estimate;
    let b0 = &res.get('b', 0).expect("row").estimate;
    let ok = b1.within(Complex64::new(0.5, 0.0), 3.0) && b0.within(Complex64::new(0.0, 0.0), 3.0);
    outcome(
        ok,
        format!(
            "b_1 = {:.17}{:+.3e}i (se {:.1e}), b_0 = {:.3e}{:+.3e}i (se {:.1e})",
            b1.mean.re, b1.mean.im, b1.std_err, b0.mean.re, b0.mean.im, b0.std_err
        ),
    )
}

fn remainder_decomposition() -> Result<Outcome> {
    let grid = make_grid(1024)?;
    let mut worst = 0f64;
    for spec in [ProcessSpec::constant(), w1(Drift::None)] {
        for i in 0..100 {
            let p = sample_path(SeedSpec::new(2, i), &grid);
            let pf = eval_functionals(&spec, &p)?;
            let est = identify_a(&pf, &BohrConfig::new(16, 1))?;
            for n in [0i64, 1] {
                let r = remainder_terms(&pf, n, 16)?;
                let truth = true_fourier_a(&spec, &p, n)?.value;
                worst = worst.max((est.at(n) - truth - r.sum()).norm());
            }
        }
    }
    outcome(worst <= 1e-9, format!("max mismatch {worst:.2e}"))
}

fn determinism() -> Result<Outcome> {
    let dir = std::env::temp_dir().join(format!("sfc-lab-acceptance-{}", std::process::id()));
    fs::create_dir_all(&dir)?;
    let cfg_path = dir.join("config.json");
    fs::write(&cfg_path, serde_json::to_string_pretty(&convergence_config(w1(Drift::None)))?)?;
    let mut csvs = Vec::new();
    for threads in ["1", "4"] {
        let out = dir.join(format!("threads{threads}"));
        let status = Command::new(env!("CARGO_BIN_EXE_sfc-lab"))
            .arg("convergence")
            .arg("--config")
            .arg(&cfg_path)
            .arg("--out")
            .arg(&out)
            .env("SFC_LAB_THREADS", threads)
            .output()?;
        if status.status.code() != Some(0) {
            let _ = fs::remove_dir_all(&dir);
            return outcome(false, format!("exit {:?}", status.status.code()));
        }
        csvs.push(fs::read(out.join("convergence.csv"))?);
    }
    let _ = fs::remove_dir_all(&dir);
    outcome(csvs[0] == csvs[1], format!("{} bytes, SFC_LAB_THREADS = 1 vs 4", csvs[0].len()))
}

type Criterion = (&'static str, Option<Duration>, fn() -> Result<Outcome>);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("kernel L2 identity", Some(Duration::from_secs(1)), kernel_identity),
        ("integration by parts", Some(Duration::from_secs(5)), integration_by_parts),
        ("multiplication formulas", Some(Duration::from_secs(30)), multiplication_formulas),
        ("Bohr mean, CONST", Some(Duration::from_secs(120)), bohr_mean),
        ("convergence rate", Some(Duration::from_secs(600)), convergence_rate),
        ("drift recovery", Some(Duration::from_secs(120)), drift_recovery),
        ("remainder decomposition", None, remainder_decomposition),
        ("determinism across thread counts", None, determinism),
    ];
    let mut failed = 0;
    for (i, (name, limit, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let (passed, detail) = match result {
            Ok(o) => match limit {
                Some(l) if elapsed > *l => (false, format!("{} (over {:?} limit)", o.detail, l)),
                _ => (o.passed, o.detail),
            },
            Err(e) => (false, format!("error: {e}")),
        };
        failed += usize::from(!passed);
        println!(
            "{} {}. {:<34} {:>8.2?}  {}",
            if passed { "PASS" } else { "FAIL" },
            i + 1,
            name,
            elapsed,
            detail
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
