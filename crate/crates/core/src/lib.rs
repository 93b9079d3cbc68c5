//! Identification of noncausal Itô processes `dX = b dt + a dW` from the
//! stochastic Fourier coefficients of `dX` in the trigonometric basis.
//!
//! | module        | contents                                                        |
//! |---------------|-----------------------------------------------------------------|
//! | [`grid`]      | time grids, `e_n(t)`, the Dirichlet kernel and its L² identity  |
//! | [`brownian`]  | seeded Brownian paths, left-point Wiener integrals              |
//! | [`catalog`]   | test processes with closed-form `X`, `D a`, Fourier truth       |
//! | [`malliavin`] | discrete divergence, integration by parts, product formulas     |
//! | [`sfc`]       | stochastic Fourier coefficients of `dX` and of `dW`             |
//! | [`bohr`]      | Bohr-product estimator, recovery of `b`, remainder terms        |
//! | [`experiment`]| Monte Carlo convergence study and decay-rate fit                |
//! | [`report`]    | JSON configuration, CSV/JSON reports, self-test suite           |
//!
//! ```
//! use sfc_lab::{bohr, brownian, catalog, grid};
//!
//! let g = grid::make_grid(512).unwrap();
//! let path = brownian::sample_path(brownian::SeedSpec::new(7, 0), &g);
//! let spec = catalog::ProcessSpec::constant();
//! let pf = catalog::eval_functionals(&spec, &path).unwrap();
//! let a_hat = bohr::identify_a(&pf, &bohr::BohrConfig::new(32, 2)).unwrap();
//! assert_eq!(a_hat.entries().len(), 5);
//! ```

pub mod bohr;
pub mod brownian;
pub mod catalog;
pub mod error;
pub mod experiment;
pub mod grid;
pub mod malliavin;
pub mod report;
pub mod sfc;

pub use error::{Error, Result};
