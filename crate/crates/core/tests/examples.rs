macro_rules! example {
    ($module:ident, $file:literal, $test:ident) => {
        #[allow(dead_code)]
        mod $module {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }

        #[test]
        fn $test() {
            $module::run_example().expect(concat!($file, " should run"));
        }
    };
}

example!(kernel_identity, "kernel_identity.rs", kernel_identity_runs);
example!(brownian_paths, "brownian_paths.rs", brownian_paths_runs);
example!(catalog_functionals, "catalog_functionals.rs", catalog_functionals_runs);
example!(multiplication_formulas, "multiplication_formulas.rs", multiplication_formulas_runs);
example!(fourier_coefficients, "fourier_coefficients.rs", fourier_coefficients_runs);
example!(identify_coefficients, "identify_coefficients.rs", identify_coefficients_runs);
example!(recover_drift, "recover_drift.rs", recover_drift_runs);
