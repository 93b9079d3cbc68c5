use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand};
use log::info;

use sfc_lab::experiment::{run_convergence_with_threads, run_identification, ExperimentConfig};
use sfc_lab::grid::{kernel_l2_identity, make_grid};
use sfc_lab::report::{
    load_config, multiplication_catalog, run_selftest, verify_integration_by_parts, verify_multiplication,
    write_convergence_outputs, write_identify_outputs, Check,
};
use sfc_lab::Error;

#[derive(Parser)]
#[command(name = "sfc-lab", version, about = "Identify dX = b dt + a dW from stochastic Fourier coefficients")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the Fourier coefficients of a and b at one window order.
    Identify {
        #[command(flatten)]
        run: RunArgs,
        /// Window order; defaults to the largest entry of n_list.
        #[arg(long = "N")]
        order: Option<usize>,
    },
    /// Monte Carlo error decay of the Bohr-product estimator.
    Convergence {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Check integration by parts and both product formulas path by path.
    VerifyMultiplication {
        /// Restrict the product-formula checks to the process in this config.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 100)]
        paths: usize,
        #[arg(long, default_value_t = 1024)]
        mesh: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print the discrete mean of K_N² on an m-point grid (equals 2N+1).
    KernelCheck {
        #[arg(long = "N")]
        order: usize,
        #[arg(long)]
        m: usize,
    },
    /// Run the exact discrete identities.
    Selftest,
}

#[derive(Args)]
struct RunArgs {
    /// JSON experiment configuration.
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    paths: Option<usize>,
    #[arg(long)]
    mesh: Option<usize>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

impl RunArgs {
    fn load(&self) -> sfc_lab::Result<ExperimentConfig> {
        let mut cfg = load_config(&self.config)?;
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(p) = self.paths {
            cfg.paths = p;
        }
        if let Some(m) = self.mesh {
            cfg.mesh = m;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

enum Failure {
    Usage(String),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::InvalidArgument(_) | Error::UnsupportedMode(_) | Error::Json(_) => {
                Failure::Usage(e.to_string())
            }
            other => Failure::Check(other.to_string()),
        }
    }
}

fn threads() -> Result<Option<usize>, Failure> {
    match std::env::var("SFC_LAB_THREADS") {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Failure::Usage(format!("SFC_LAB_THREADS must be a positive integer, got {v:?}"))),
        },
    }
}

fn report(checks: &[Check]) -> Result<(), Failure> {
    for c in checks {
        println!("{c}");
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    if failed > 0 {
        return Err(Failure::Check(format!("{failed} of {} checks failed", checks.len())));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::KernelCheck { order, m } => {
            let v = kernel_l2_identity(order, &make_grid(m)?)?;
            let want = (2 * order + 1) as f64;
            if (v - want).abs() <= 1e-9 * want {
                println!("{}", want);
                Ok(())
            } else {
                println!("{v}");
                Err(Failure::Check(format!("expected {want}, got {v}")))
            }
        }
        Command::Selftest => report(&run_selftest()?),
        Command::VerifyMultiplication { config, paths, mesh, seed } => {
            let specs = match config {
                Some(path) => vec![load_config(&path)?.process],
                None => multiplication_catalog(),
            };
            let mut checks = verify_integration_by_parts(paths, mesh, seed)?;
            checks.extend(verify_multiplication(&specs, paths, mesh, seed)?);
            report(&checks)
        }
        Command::Convergence { run } => {
            let cfg = run.load()?;
            let result = run_convergence_with_threads(&cfg, threads()?)?;
            let (csv, json) = write_convergence_outputs(&run.out, &cfg, &result)?;
            info!("wrote {} and {}", csv.display(), json.display());
            for f in &result.fits {
                println!(
                    "n = {:>3}  slope = {:+.4} ± {:.4}",
                    f.n, f.fit.slope, f.fit.half_width
                );
            }
            let bad = result.slopes_outside(cfg.slope_band);
            if bad.is_empty() {
                Ok(())
            } else {
                Err(Failure::Check(format!(
                    "slopes outside {:?} at n = {bad:?}",
                    cfg.slope_band
                )))
            }
        }
        Command::Identify { run, order } => {
            let cfg = run.load()?;
            let order = order.unwrap_or_else(|| cfg.max_order());
            let result = run_identification(&cfg, order, threads()?)?;
            let (csv, json) = write_identify_outputs(&run.out, &cfg, &result)?;
            info!("wrote {} and {}", csv.display(), json.display());
            for r in &result.rows {
                println!(
                    "{}_{:<3} estimate {:+.6}{:+.6}i  truth {:+.6}{:+.6}i  rms {:.3e}",
                    r.quantity,
                    r.n,
                    r.estimate.mean.re,
                    r.estimate.mean.im,
                    r.truth.mean.re,
                    r.truth.mean.im,
                    r.rms_err
                );
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("sfc-lab: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("sfc-lab: {msg}\n");
            eprintln!("{}", Cli::command().render_usage());
            ExitCode::from(2)
        }
    }
}
