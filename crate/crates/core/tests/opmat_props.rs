mod common;

use common::{close, rng, to_nalgebra};
use proptest::prelude::*;
use qkolmo_core::opmat::{
    abs_value, commutator, herm_eig, hermitian_eigenpairs, polar_decompose, psd_sqrt, subspace_contains, subspace_span,
    svd, ComplexMatrix,
};
use qkolmo_core::random::{ginibre, random_effect, random_unitary};

fn random_hermitian(seed: u64, d: usize) -> ComplexMatrix<f64> {
    ginibre::<f64, _>(&mut rng(seed), d).hermitian_part()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn eigenvalues_match_nalgebra(seed in any::<u64>(), d in 1usize..=5) {
        let h = random_hermitian(seed, d);
        let pairs = hermitian_eigenpairs(&h).unwrap();
        let mut oracle: Vec<f64> = to_nalgebra(&h).symmetric_eigenvalues().iter().copied().collect();
        oracle.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (a, b) in pairs.values.iter().zip(&oracle) {
            prop_assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn spectral_reconstruction(seed in any::<u64>(), d in 1usize..=5) {
        let h = random_hermitian(seed, d);
        let spec = herm_eig(&h, 1e-8).unwrap();
        prop_assert!(close(&spec.reconstruct(), &h, 1e-10));
        let sum = spec.projectors.iter().fold(ComplexMatrix::zeros(d), |a, p| &a + p);
        prop_assert!(close(&sum, &ComplexMatrix::identity(d), 1e-10));
        for p in &spec.projectors {
            prop_assert!(close(&p.matmul(p), p, 1e-10));
        }
    }

    #[test]
    fn singular_values_match_nalgebra(seed in any::<u64>(), d in 1usize..=5) {
        let x = ginibre::<f64, _>(&mut rng(seed), d);
        let ours = svd(&x).singular_values;
        let mut oracle: Vec<f64> = to_nalgebra(&x).singular_values().iter().copied().collect();
        oracle.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (a, b) in ours.iter().zip(&oracle) {
            prop_assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn polar_factors(seed in any::<u64>(), d in 1usize..=4, rank in 0usize..=4) {
        let mut r = rng(seed);
        // Rank-deficient inputs exercise the kernel completion.
        let g = ginibre::<f64, _>(&mut r, d);
        let proj = ComplexMatrix::diag(&(0..d).map(|k| if k < rank { 1.0 } else { 0.0 }).collect::<Vec<_>>());
        let x = g.matmul(&proj);
        let pd = polar_decompose(&x);
        let v = &pd.unitary;
        prop_assert!(close(&v.adjoint().matmul(v), &ComplexMatrix::identity(d), 1e-10));
        prop_assert!(close(&v.matmul(&pd.modulus), &x, 1e-10));
        prop_assert!(pd.modulus.is_hermitian(1e-10));
    }

    #[test]
    fn abs_value_two_routes(seed in any::<u64>(), d in 1usize..=4) {
        let x = ginibre::<f64, _>(&mut rng(seed), d);
        let via_svd = abs_value(&x);
        let via_sqrt = psd_sqrt(&x.adjoint().matmul(&x), 1e-10).unwrap();
        prop_assert!(close(&via_svd, &via_sqrt, 1e-8));
        prop_assert!(close(&via_svd.matmul(&via_svd), &x.adjoint().matmul(&x), 1e-9));
    }

    #[test]
    fn psd_sqrt_squares_back(seed in any::<u64>(), d in 1usize..=4) {
        let e = random_effect::<f64, _>(&mut rng(seed), d);
        let s = psd_sqrt(&e, 1e-12).unwrap();
        prop_assert!(close(&s.matmul(&s), &e, 1e-10));
    }

    #[test]
    fn commutator_identities(seed in any::<u64>(), d in 1usize..=4) {
        let mut r = rng(seed);
        let a = ginibre::<f64, _>(&mut r, d);
        let b = ginibre::<f64, _>(&mut r, d);
        let c = commutator(&a, &b).unwrap();
        // [A,B]† = [B†,A†] and [A,B] = −[B,A]
        prop_assert!(close(&c.adjoint(), &commutator(&b.adjoint(), &a.adjoint()).unwrap(), 1e-10));
        prop_assert!(close(&c, &-commutator(&b, &a).unwrap(), 1e-12));
        prop_assert!(c.trace().norm() < 1e-10);
        let u = random_unitary::<f64, _>(&mut r, d);
        prop_assert!(commutator(&u, &u.adjoint()).unwrap().norm() < 1e-10);
    }

    #[test]
    fn subspace_self_containment(seed in any::<u64>(), d in 1usize..=3, k in 1usize..=5) {
        let mut r = rng(seed);
        let ops: Vec<_> = (0..k).map(|_| ginibre::<f64, _>(&mut r, d)).collect();
        let s = subspace_span(&ops, 1e-9).unwrap();
        prop_assert_eq!(s.len(), k.min(d * d));
        prop_assert!(s.gram_defect() < 1e-10);
        let (ok, res) = subspace_contains(&s, &s, 1e-9).unwrap();
        prop_assert!(ok && res < 1e-9);
        for op in &ops {
            prop_assert!(close(&s.project(op), op, 1e-9));
        }
    }
}

#[test]
fn random_unitaries_are_unitary() {
    let mut r = rng(7);
    for d in 1..=6 {
        let u = random_unitary::<f64, _>(&mut r, d);
        assert!(close(&u.matmul(&u.adjoint()), &ComplexMatrix::identity(d), 1e-12));
    }
}
