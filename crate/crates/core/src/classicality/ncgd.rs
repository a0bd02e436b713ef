use num_complex::Complex;

use crate::classicality::{CheckResult, ContextRecord, Criterion};
use crate::error::{Error, Result};
use crate::opmat::{hermitian_eigenpairs, orthonormality_defect, ComplexMatrix, Ket};
use crate::process::{Instrument, MarkovProcess};
use crate::scalar::Real;

/// Rank-1 projective instrument `{|b_k⟩⟨b_k|}` labelled `"0"`, `"1"`, …;
/// its total map is the completely dephasing map in that basis.
pub fn dephasing_instrument<T: Real>(dim: usize, basis: &[Ket<T>], tol: T) -> Result<Instrument<T>> {
    check_basis(dim, basis, tol)?;
    Instrument::projective(basis)
}

fn check_basis<T: Real>(dim: usize, basis: &[Ket<T>], tol: T) -> Result<()> {
    if basis.len() != dim {
        return Err(Error::DimensionMismatch {
            context: "basis size".into(),
            expected: dim,
            found: basis.len(),
        });
    }
    if let Some(v) = basis.iter().find(|v| v.len() != dim) {
        return Err(Error::DimensionMismatch {
            context: "basis vector".into(),
            expected: dim,
            found: v.len(),
        });
    }
    let defect = orthonormality_defect(basis);
    if defect > tol {
        return Err(Error::NotOrthonormal {
            defect: defect.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(())
}

/// For every time, the basis index measured by each outcome. Fails unless
/// every instrument consists of exactly the rank-1 projectors `|b⟩⟨b|` of
/// `basis` (up to a phase per Kraus operator).
pub fn fixed_basis_map<T: Real>(p: &MarkovProcess<T>, basis: &[Ket<T>], tol: T) -> Result<Vec<Vec<usize>>> {
    check_basis(p.dim(), basis, tol)?;
    let projectors: Vec<_> = basis.iter().map(|b| ComplexMatrix::projector(b)).collect();
    let mut maps = Vec::with_capacity(p.n_times());
    for t in 1..=p.n_times() {
        let j = p.instrument(t);
        let fail = |reason: String| Error::NotFixedBasisProjective { time: t, reason };
        if j.len() != p.dim() {
            return Err(fail(format!("{} outcomes for dimension {}", j.len(), p.dim())));
        }
        let mut used = vec![false; basis.len()];
        let mut map = Vec::with_capacity(j.len());
        for (label, k) in j.elements() {
            let kk = k.adjoint().matmul(k);
            let kkd = k.matmul(&k.adjoint());
            let hit = projectors
                .iter()
                .position(|pb| (&kk - pb).norm() <= tol && (&kkd - pb).norm() <= tol)
                .ok_or_else(|| fail(format!("outcome '{label}' is not a basis projector")))?;
            if used[hit] {
                return Err(fail(format!("basis vector {hit} measured twice")));
            }
            used[hit] = true;
            map.push(hit);
        }
        maps.push(map);
    }
    Ok(maps)
}

/// Reads the basis off the first instrument (top eigenvector of each
/// `K†K`) and verifies it against every instrument.
pub fn infer_fixed_basis<T: Real>(p: &MarkovProcess<T>, tol: T) -> Result<Vec<Ket<T>>> {
    let j = p.instrument(1);
    let mut basis = Vec::with_capacity(j.len());
    for (_, k) in j.elements() {
        let pairs = hermitian_eigenpairs(&k.adjoint().matmul(k))?;
        basis.push(pairs.vectors[0].clone());
    }
    let inferred = fix_phases(basis);
    fixed_basis_map(p, &inferred, tol).map_err(|e| match e {
        Error::NotOrthonormal { .. } | Error::DimensionMismatch { .. } => Error::NotFixedBasisProjective {
            time: 1,
            reason: "Kraus operators are not rank-1 projectors onto an orthonormal basis".into(),
        },
        other => other,
    })?;
    Ok(inferred)
}

/// Fixes each vector's phase so its largest entry is real positive.
fn fix_phases<T: Real>(basis: Vec<Ket<T>>) -> Vec<Ket<T>> {
    basis
        .into_iter()
        .map(|v| {
            let lead = v.iter().copied().fold(Complex::new(T::zero(), T::zero()), |a, z| {
                if z.norm() > a.norm() + T::epsilon() {
                    z
                } else {
                    a
                }
            });
            let n = lead.norm();
            if n > T::zero() {
                let phase = lead.conj() / n;
                v.into_iter().map(|z| z * phase).collect()
            } else {
                v
            }
        })
        .collect()
}

/// `|⟨b|Λ_{i+1:i}∘Δ∘Λ_{i:i-1}[|a⟩⟨a|]|b⟩ − ⟨b|Λ_{i+1:i}∘Λ_{i:i-1}[|a⟩⟨a|]|b⟩|`
/// for every `2 ≤ i ≤ n−1` and basis pair `(a, b)`.
pub fn check_ncgd<T: Real>(p: &MarkovProcess<T>, basis: &[Ket<T>], eps: T) -> Result<CheckResult<T>> {
    let maps = fixed_basis_map(p, basis, eps.max(T::default_tol()))?;
    let dephase = Instrument::projective(basis)?;
    let label_of = |t: usize, b: usize| {
        let m = maps[t - 1].iter().position(|&x| x == b).expect("bijective map");
        p.instrument(t).label(m).to_string()
    };
    let mut records = Vec::new();
    for i in 2..p.n_times() {
        let before = p.map_after(i - 1);
        let after = p.map_after(i);
        for (a, va) in basis.iter().enumerate() {
            let mid = before.apply(&ComplexMatrix::projector(va));
            let dephased = after.apply(&dephase.total_map(&mid));
            let direct = after.apply(&mid);
            for (b, vb) in basis.iter().enumerate() {
                let lhs = dephased.expectation(vb, vb).re;
                let rhs = direct.expectation(vb, vb).re;
                let mut rec = ContextRecord::new(
                    i,
                    vec![label_of(i - 1, a)],
                    None,
                    vec![label_of(i + 1, b)],
                    (lhs - rhs).abs(),
                );
                rec.lhs = Some(lhs);
                rec.rhs = Some(rhs);
                records.push(rec);
            }
        }
    }
    Ok(CheckResult::from_records(Criterion::Ncgd, eps, records, Vec::new()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opmat::{basis_ket, named};
    use crate::process::{DensityMatrix, KrausSet};
    use crate::scalar::cplx;

    fn comp(d: usize) -> Vec<Ket<f64>> {
        (0..d).map(|k| basis_ket(d, k)).collect()
    }

    fn three_step(l21: ComplexMatrix<f64>, l32: ComplexMatrix<f64>) -> MarkovProcess<f64> {
        let z = Instrument::projective(&comp(2)).unwrap();
        MarkovProcess::new(
            DensityMatrix::maximally_mixed(2),
            vec![KrausSet::unitary(l21), KrausSet::unitary(l32)],
            vec![z.clone(), z.clone(), z],
        )
        .unwrap()
    }

    #[test]
    fn dephasing_examples() {
        let j = dephasing_instrument(2, &comp(2), 1e-12).unwrap();
        assert_eq!(j.kraus(0), &named::proj(2, 0));
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let xb = vec![vec![cplx(s, 0.0), cplx(s, 0.0)], vec![cplx(s, 0.0), cplx(-s, 0.0)]];
        let j = dephasing_instrument(2, &xb, 1e-12).unwrap();
        assert!((j.kraus(0) - &named::plus()).norm() < 1e-15);
        assert!((j.kraus(1) - &named::minus()).norm() < 1e-15);
        let j = dephasing_instrument(3, &comp(3), 1e-12).unwrap();
        assert_eq!(j.len(), 3);
        assert!(j.completeness_defect() < 1e-15);
        let bad = vec![basis_ket(2, 0), basis_ket(2, 0)];
        assert!(matches!(
            dephasing_instrument(2, &bad, 1e-12),
            Err(Error::NotOrthonormal { .. })
        ));
    }

    #[test]
    fn rotation_then_hadamard_is_ncgd_with_both_sides_half() {
        let l21 = ComplexMatrix::from_rows(vec![
            vec![cplx(1.0, 0.0), cplx(1.0, 0.0)],
            vec![cplx(0.0, 1.0), cplx(0.0, -1.0)],
        ])
        .unwrap()
        .scale_real(std::f64::consts::FRAC_1_SQRT_2);
        let r = check_ncgd(&three_step(l21, named::hadamard()), &comp(2), 1e-9).unwrap();
        assert!(r.passed());
        assert_eq!(r.records.len(), 4);
        for rec in &r.records {
            assert!((rec.lhs.unwrap() - 0.5).abs() < 1e-12);
            assert!((rec.rhs.unwrap() - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_dynamics_is_ncgd() {
        let id = ComplexMatrix::identity(2);
        assert!(check_ncgd(&three_step(id.clone(), id), &comp(2), 1e-9)
            .unwrap()
            .passed());
    }

    #[test]
    fn hadamard_twice_is_not_ncgd() {
        let r = check_ncgd(&three_step(named::hadamard(), named::hadamard()), &comp(2), 1e-9).unwrap();
        assert!(r.failed());
        for rec in &r.records {
            let delta = if rec.history == rec.future { 1.0 } else { 0.0 };
            assert!((rec.lhs.unwrap() - 0.5).abs() < 1e-12);
            assert!((rec.rhs.unwrap() - delta).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_non_fixed_basis() {
        let h = KrausSet::unitary(named::hadamard());
        let z = Instrument::projective(&comp(2)).unwrap();
        let x = Instrument::new(vec![("+".into(), named::plus()), ("-".into(), named::minus())]).unwrap();
        let p = MarkovProcess::new(
            DensityMatrix::maximally_mixed(2),
            vec![h.clone(), h],
            vec![z.clone(), x, z],
        )
        .unwrap();
        assert!(matches!(
            check_ncgd(&p, &comp(2), 1e-9),
            Err(Error::NotFixedBasisProjective { time: 2, .. })
        ));
        assert!(infer_fixed_basis(&p, 1e-9).is_err());
    }

    #[test]
    fn infers_basis_with_phases() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let xb = vec![vec![cplx(s, 0.0), cplx(s, 0.0)], vec![cplx(-s, 0.0), cplx(s, 0.0)]];
        let j = Instrument::new(vec![
            ("u".into(), named::minus::<f64>().scale(cplx(0.0, 1.0))),
            ("d".into(), named::plus()),
        ])
        .unwrap();
        let p = MarkovProcess::new(
            DensityMatrix::maximally_mixed(2),
            vec![KrausSet::identity(2)],
            vec![j.clone(), j],
        )
        .unwrap();
        let basis = infer_fixed_basis(&p, 1e-9).unwrap();
        assert_eq!(fixed_basis_map(&p, &basis, 1e-9).unwrap(), vec![vec![0, 1], vec![0, 1]]);
        assert!(fixed_basis_map(&p, &xb, 1e-9).is_ok());
    }
}
