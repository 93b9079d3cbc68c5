use num_complex::Complex64;
use proptest::prelude::*;

use sfc_lab::bohr::{identify_a, remainder_terms, BohrConfig};
use sfc_lab::brownian::{sample_path, wiener_integral, SeedSpec};
use sfc_lab::catalog::{eval_functionals, true_fourier_a, DetFn, Drift, ProcessKind, ProcessSpec, TrigPoly};
use sfc_lab::experiment::{ErrorRow, ExperimentResult};
use sfc_lab::grid::{dirichlet_closed_form, dirichlet_kernel, make_grid, BasisTable};
use sfc_lab::malliavin::{lemma_fdelta_residual, DiscreteFunctional};
use sfc_lab::report::{convergence_csv, read_convergence_csv};

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kernel_is_real_even_and_periodic(order in 0usize..40, x in -3.0f64..3.0) {
        let k = dirichlet_kernel(order, x);
        let scale = (2 * order + 1) as f64;
        prop_assert!(k.im.abs() < 1e-9 * scale);
        prop_assert!((k - dirichlet_kernel(order, -x)).norm() < 1e-9 * scale);
        prop_assert!((k - dirichlet_kernel(order, x + 1.0)).norm() < 1e-9 * scale);
        if (x - x.round()).abs() > 1e-3 {
            prop_assert!((k.re - dirichlet_closed_form(order, x)).abs() < 1e-8 * scale);
        }
    }

    #[test]
    fn wiener_integral_is_linear(seed in any::<u64>(), alpha in -5.0f64..5.0, beta in -5.0f64..5.0, n in -6i64..6) {
        let grid = make_grid(128).unwrap();
        let table = BasisTable::new(&grid);
        let p = sample_path(SeedSpec::new(seed, 0), &grid);
        let f = table.row(n);
        let g: Vec<Complex64> = grid.left_nodes().iter().map(|&t| c(t * t)).collect();
        let mix: Vec<Complex64> = f.iter().zip(&g).map(|(a, b)| a * alpha + b * beta).collect();
        let lhs = wiener_integral(&p, &mix).unwrap();
        let rhs = wiener_integral(&p, &f).unwrap() * alpha + wiener_integral(&p, &g).unwrap() * beta;
        prop_assert!((lhs - rhs).norm() < 1e-10);
    }

    #[test]
    fn paths_are_reproducible(seed in any::<u64>(), idx in 0u64..1_000_000) {
        let grid = make_grid(64).unwrap();
        let a = sample_path(SeedSpec::new(seed, idx), &grid);
        let b = sample_path(SeedSpec::new(seed, idx), &grid);
        prop_assert_eq!(a.values(), b.values());
        let other = sample_path(SeedSpec::new(seed, idx + 1), &grid);
        prop_assert_ne!(a.values(), other.values());
    }

    #[test]
    fn integration_by_parts_holds_for_random_second_chaos(
        seed in any::<u64>(),
        coef in prop::array::uniform3(-3.0f64..3.0),
        k in 1usize..128,
        n in -5i64..5,
    ) {
        let grid = make_grid(128).unwrap();
        let table = BasisTable::new(&grid);
        let p = sample_path(SeedSpec::new(seed, 1), &grid);
        let w1 = DiscreteFunctional::terminal(&p);
        let wk = DiscreteFunctional::value_at(&p, k);
        let f = DiscreteFunctional::constant(c(coef[0]), 128)
            .add(&w1.scale(c(coef[1])))
            .add(&w1.mul(&wk).scale(c(coef[2])));
        prop_assert!(lemma_fdelta_residual(&f, &table.row(n), &p).unwrap() < 1e-9);
    }

    #[test]
    fn estimator_respects_conjugate_symmetry(seed in any::<u64>(), order in 1usize..20) {
        let grid = make_grid(512).unwrap();
        let p = sample_path(SeedSpec::new(seed, 2), &grid);
        let spec = ProcessSpec { kind: ProcessKind::NoncausalW1, f: None, drift: Drift::None };
        let pf = eval_functionals(&spec, &p).unwrap();
        let a = identify_a(&pf, &BohrConfig::new(order, 3)).unwrap();
        for n in 1..=3 {
            prop_assert!((a.at(-n) - a.at(n).conj()).norm() < 1e-10);
        }
    }

    #[test]
    fn remainder_terms_sum_to_estimator_error(seed in any::<u64>(), order in 1usize..12, n in -2i64..=2, kind in 0usize..4) {
        let cos = DetFn::Trig(TrigPoly::cosine(1, 1.0));
        let spec = match kind {
            0 => ProcessSpec::constant(),
            1 => ProcessSpec { kind: ProcessKind::NoncausalW1, f: None, drift: Drift::TerminalScaled { g: cos } },
            2 => ProcessSpec { kind: ProcessKind::NoncausalMidpoint, f: None, drift: Drift::Deterministic { g: cos } },
            _ => ProcessSpec { kind: ProcessKind::Det, f: Some(cos.clone()), drift: Drift::Deterministic { g: cos } },
        };
        let grid = make_grid(256).unwrap();
        let p = sample_path(SeedSpec::new(seed, 3), &grid);
        let pf = eval_functionals(&spec, &p).unwrap();
        let est = identify_a(&pf, &BohrConfig::new(order, 2)).unwrap().at(n);
        let truth = true_fourier_a(&spec, &p, n).unwrap().value;
        let r = remainder_terms(&pf, n, order).unwrap();
        prop_assert!((est - truth - r.sum()).norm() < 1e-9);
    }

    #[test]
    fn csv_round_trip_preserves_every_bit(
        vals in prop::collection::vec((any::<f64>(), any::<f64>(), any::<f64>()), 1..12),
        seed in any::<u64>(),
    ) {
        let rows: Vec<ErrorRow> = vals
            .iter()
            .enumerate()
            .filter(|(_, v)| v.0.is_finite() && v.1.is_finite() && v.2.is_finite())
            .map(|(i, v)| ErrorRow { n: i as i64 - 3, order: 4 << i, mean_abs_err: v.0, lp_err: v.1, std_err: v.2 })
            .collect();
        let res = ExperimentResult {
            process: "CONST".into(),
            m: 4096,
            paths: 2000,
            seed,
            p_exponent: 2.0,
            n_list: vec![4],
            max_freq: 3,
            rows: rows.clone(),
            fits: vec![],
            elapsed: None,
        };
        let parsed = read_convergence_csv(convergence_csv(&res).unwrap().as_bytes()).unwrap();
        prop_assert_eq!(parsed.len(), rows.len());
        for (p, r) in parsed.iter().zip(&rows) {
            prop_assert_eq!(p.seed, seed);
            prop_assert_eq!((p.n, p.order), (r.n, r.order));
            prop_assert_eq!(p.mean_abs_err.to_bits(), r.mean_abs_err.to_bits());
            prop_assert_eq!(p.lp_err.to_bits(), r.lp_err.to_bits());
            prop_assert_eq!(p.std_err.to_bits(), r.std_err.to_bits());
        }
    }
}
