mod common;

use common::{close, rng};
use proptest::prelude::*;
use qkolmo_core::opmat::{hermitian_eigenpairs, ComplexMatrix};
use qkolmo_core::process::validate_process;
use qkolmo_core::random::{
    ginibre, random_density, random_hermitian_instrument, random_instrument, random_kraus_set, random_process,
};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn channels_preserve_trace_and_positivity(seed in any::<u64>(), d in 1usize..=4, rank in 1usize..=4) {
        let mut r = rng(seed);
        let map = random_kraus_set::<f64, _>(&mut r, d, rank);
        prop_assert!(map.completeness_defect() < 1e-10);
        let rho = random_density::<f64, _>(&mut r, d, d);
        let out = map.apply(rho.matrix());
        prop_assert!((out.trace().re - 1.0).abs() < 1e-10);
        prop_assert!(out.is_hermitian(1e-12));
        let min = *hermitian_eigenpairs(&out.hermitian_part()).unwrap().values.last().unwrap();
        prop_assert!(min > -1e-10);
    }

    #[test]
    fn adjoint_is_hilbert_schmidt_dual(seed in any::<u64>(), d in 1usize..=4, rank in 1usize..=3) {
        let mut r = rng(seed);
        let map = random_kraus_set::<f64, _>(&mut r, d, rank);
        let x = ginibre::<f64, _>(&mut r, d);
        let y = ginibre::<f64, _>(&mut r, d);
        let lhs = map.apply(&x).hs_inner(&y);
        let rhs = x.hs_inner(&map.apply_adjoint(&y));
        prop_assert!((lhs - rhs).norm() < 1e-10);
        prop_assert!(close(&map.apply_adjoint(&ComplexMatrix::identity(d)), &ComplexMatrix::identity(d), 1e-10));
    }

    #[test]
    fn instruments_sum_to_a_channel(seed in any::<u64>(), d in 1usize..=4, m in 1usize..=4) {
        let mut r = rng(seed);
        for j in [random_instrument::<f64, _>(&mut r, d, m), random_hermitian_instrument(&mut r, d, m)] {
            prop_assert!(j.completeness_defect() < 1e-9);
            let rho = random_density::<f64, _>(&mut r, d, 1);
            prop_assert!((j.total_map(rho.matrix()).trace().re - 1.0).abs() < 1e-10);
            prop_assert!(close(&j.total_adjoint(&ComplexMatrix::identity(d)), &ComplexMatrix::identity(d), 1e-9));
        }
        prop_assert!(random_hermitian_instrument::<f64, _>(&mut r, d, m).is_hermitian(1e-9));
    }

    #[test]
    fn random_processes_validate(seed in any::<u64>(), d in 1usize..=3, n in 1usize..=4, m in 2usize..=3) {
        let p = random_process::<f64, _>(&mut rng(seed), d, n, m);
        let report = validate_process(&p, 1e-9);
        prop_assert!(report.is_valid(), "{:?}", report.violations);
        prop_assert_eq!(p.n_times(), n);
    }
}
