mod common;

use common::{classical_process, fixed_basis_process, rng};
use proptest::prelude::*;
use qkolmo_core::classicality::{
    analyze, check_kolmogorov, check_lueders_fixed_point, AnalysisConfig, AuditStatus, FlagKind,
};
use qkolmo_core::opmat::ComplexMatrix;
use qkolmo_core::random::{
    commuting_instrument, random_basis, random_effect, random_hermitian_instrument, random_process,
};
use qkolmo_core::{Criterion, MarkovProcess};
use rand::Rng;

fn process_for(seed: u64, classical: bool) -> MarkovProcess<f64> {
    let mut r = rng(seed);
    let d = r.gen_range(2..=3);
    let n = r.gen_range(2..=3);
    let m = r.gen_range(2..=3);
    if classical {
        classical_process(&mut r, d, n, m)
    } else {
        random_process(&mut r, d, n, m)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn implication_lattice(seed in any::<u64>(), classical in any::<bool>()) {
        let p = process_for(seed, classical);
        let report = analyze(&p, &AnalysisConfig::default()).unwrap();
        let violations: Vec<_> = report.audit_violations().collect();
        prop_assert!(violations.is_empty(), "{violations:?}");
        let get = |c| report.result(c).unwrap();
        let (comm, abs, kol) = (get(Criterion::Commutators), get(Criterion::Absolute), get(Criterion::Kolmogorov));
        for i in 1..=p.n_times() {
            if comm.passed_at(i) {
                prop_assert!(abs.passed_at(i) && kol.passed_at(i));
            }
            if abs.passed_at(i) {
                prop_assert!(kol.passed_at(i));
            }
            if !kol.passed_at(i) {
                prop_assert!(!comm.passed_at(i));
            }
        }
        if classical {
            prop_assert!(comm.passed() && kol.passed());
        }
    }

    #[test]
    fn lueders_equivalence(seed in any::<u64>(), d in 2usize..=3, m in 1usize..=3, commuting in any::<bool>()) {
        let mut r = rng(seed);
        let (j, q) = if commuting {
            // Shared eigenbasis: fixed point and commuting.
            let basis = random_basis(&mut r, d);
            let j = commuting_instrument(&mut r, &basis, m);
            let q = basis.iter().fold(ComplexMatrix::zeros(d), |acc, b| {
                &acc + &ComplexMatrix::projector(b).scale_real(r.gen::<f64>())
            });
            (j, q)
        } else {
            (random_hermitian_instrument(&mut r, d, m), random_effect(&mut r, d))
        };
        let res = check_lueders_fixed_point(&j, &q, 1e-9).unwrap();
        prop_assert_eq!(res.consistent(), Some(true));
        if commuting {
            prop_assert!(res.fixed_point);
        }
    }

    #[test]
    fn inclusion_rule_audit(seed in any::<u64>()) {
        let p = process_for(seed, true);
        let report = analyze(&p, &AnalysisConfig::default()).unwrap();
        let comm = report.result(Criterion::Commutators).unwrap();
        for e in report.audit.iter().filter(|e| e.rule.contains("inclusion")) {
            prop_assert!(e.status != AuditStatus::Violated, "{e:?}");
            if e.status == AuditStatus::Held {
                prop_assert!(comm.passed_at(e.time.unwrap()));
            }
        }
    }

    #[test]
    fn ncgd_matches_kolmogorov(seed in any::<u64>()) {
        let mut r = rng(seed);
        let d = r.gen_range(2..=3);
        let n = r.gen_range(3..=4);
        let (p, basis) = fixed_basis_process(&mut r, d, n);
        let cfg = AnalysisConfig { fixed_basis: Some(basis), ..AnalysisConfig::default() };
        let report = analyze(&p, &cfg).unwrap();
        prop_assert!(report.audit_clean(), "{:?}", report.audit_violations().collect::<Vec<_>>());
        let ncgd = report.result(Criterion::Ncgd).unwrap();
        let kol = report.result(Criterion::Kolmogorov).unwrap();
        if !ncgd.has_flag(FlagKind::UnreachablePair) {
            for i in 2..n {
                prop_assert_eq!(ncgd.passed_at(i), kol.passed_at(i));
            }
        }
    }

    #[test]
    fn operational_cross_check(seed in any::<u64>(), classical in any::<bool>()) {
        let p = process_for(seed, classical);
        let r = check_kolmogorov(&p, 1e-9);
        prop_assert!(r.cross_check_defect.unwrap() < 1e-9);
        for rec in &r.records {
            let signed = rec.signed.unwrap();
            prop_assert!((rec.operational.unwrap() - signed).abs() < 1e-9);
            prop_assert!((rec.commutator_form.unwrap() + signed).abs() < 1e-9);
        }
    }
}
