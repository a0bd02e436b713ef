use num_complex::Complex;

use crate::classicality::{CheckResult, ContextRecord, Criterion, Flag, FlagKind};
use crate::error::{mismatch, Error, Result};
use crate::opmat::{herm_eig, subspace_contains, subspace_span, ComplexMatrix, OperatorSubspace};
use crate::process::{DensityMatrix, MarkovProcess};
use crate::scalar::Real;
use crate::stats::ContextTables;
use crate::Tolerances;

/// `d²` pure states spanning all operators: `|k⟩`, `(|k⟩+|l⟩)/√2` and
/// `(|k⟩+i|l⟩)/√2` for `k < l`.
pub fn default_initial_set<T: Real>(dim: usize) -> Vec<DensityMatrix<T>> {
    let ket = |entries: &[(usize, Complex<T>)]| {
        let mut v = vec![Complex::new(T::zero(), T::zero()); dim];
        for &(k, z) in entries {
            v[k] = z;
        }
        DensityMatrix::pure(&v).expect("non-zero vector")
    };
    let one = Complex::new(T::one(), T::zero());
    let i = Complex::new(T::zero(), T::one());
    let mut set: Vec<_> = (0..dim).map(|k| ket(&[(k, one)])).collect();
    for k in 0..dim {
        for l in k + 1..dim {
            set.push(ket(&[(k, one), (l, one)]));
            set.push(ket(&[(k, one), (l, i)]));
        }
    }
    set
}

/// `ℍ_i`: span of every conditioned state `ρ̃_i(h)` reachable from any state
/// in `initial_set`; `ℍ_1` is the span of `initial_set` itself.
pub fn compute_h<T: Real>(
    p: &MarkovProcess<T>,
    i: usize,
    initial_set: &[DensityMatrix<T>],
    rank_tol: T,
) -> Result<OperatorSubspace<T>> {
    p.check_time(i)?;
    if initial_set.is_empty() {
        return Err(Error::Empty("initial state set"));
    }
    let mut states = Vec::new();
    for rho in initial_set {
        if rho.dim() != p.dim() {
            return Err(mismatch("initial state set", p.dim(), rho.dim()));
        }
        if i == 1 {
            states.push(rho.matrix().clone());
        } else {
            let tables = ContextTables::new(&p.with_initial(rho.clone())?);
            states.extend(tables.histories(i).iter().map(|(_, r)| r.clone()));
        }
    }
    subspace_span(&states, rank_tol)
}

pub(crate) struct FutureProjectors<T> {
    pub subspace: OperatorSubspace<T>,
    pub degenerate: bool,
    pub vanishing: usize,
    /// Smallest spacing between distinct eigenvalues over all `Q_i`
    /// (1 if every `Q_i` is a multiple of the identity).
    pub min_gap: T,
}

/// `𝔽_i`: span of the spectral projectors of every non-vanishing `Q_i(f)`,
/// and whether any of those `Q_i` is degenerate.
pub fn compute_f<T: Real>(
    p: &MarkovProcess<T>,
    i: usize,
    degeneracy_tol: T,
    rank_tol: T,
) -> Result<(OperatorSubspace<T>, bool)> {
    let fp = future_projectors(p, &ContextTables::new(p), i, degeneracy_tol, rank_tol)?;
    Ok((fp.subspace, fp.degenerate))
}

pub(crate) fn future_projectors<T: Real>(
    p: &MarkovProcess<T>,
    tables: &ContextTables<T>,
    i: usize,
    degeneracy_tol: T,
    rank_tol: T,
) -> Result<FutureProjectors<T>> {
    if i == 0 || i >= p.n_times() {
        return Err(Error::InvalidTime {
            time: i,
            n: p.n_times().saturating_sub(1),
        });
    }
    let mut projectors = Vec::new();
    let mut degenerate = false;
    let mut vanishing = 0;
    let mut min_gap = T::one();
    for (_, q) in tables.futures(i) {
        if q.norm() < rank_tol {
            vanishing += 1;
            continue;
        }
        let spec = herm_eig(&q.hermitian_part(), degeneracy_tol)?;
        degenerate |= !spec.is_nondegenerate();
        for w in spec.eigenvalues.windows(2) {
            min_gap = min_gap.min(w[0] - w[1]);
        }
        projectors.extend(spec.projectors);
    }
    if projectors.is_empty() {
        projectors.push(ComplexMatrix::zeros(p.dim()));
    }
    Ok(FutureProjectors {
        subspace: subspace_span(&projectors, rank_tol)?,
        degenerate,
        vanishing,
        min_gap,
    })
}

/// `𝔽_i ⊆ ℍ_i` at a single time `i < n`.
pub fn check_inclusion<T: Real>(
    p: &MarkovProcess<T>,
    i: usize,
    initial_set: &[DensityMatrix<T>],
    tol: &Tolerances<T>,
) -> Result<CheckResult<T>> {
    let tables = ContextTables::new(p);
    let (rec, flags) = inclusion_at(p, &tables, i, initial_set, tol)?;
    Ok(CheckResult::from_records(
        Criterion::Inclusion,
        tol.eps,
        vec![rec],
        flags,
    ))
}

/// `𝔽_i ⊆ ℍ_i` at every time `1 ≤ i < n`.
pub fn check_inclusion_all<T: Real>(
    p: &MarkovProcess<T>,
    initial_set: &[DensityMatrix<T>],
    tol: &Tolerances<T>,
) -> Result<CheckResult<T>> {
    let tables = ContextTables::new(p);
    let mut records = Vec::new();
    let mut flags = Vec::new();
    for i in 1..p.n_times() {
        let (rec, f) = inclusion_at(p, &tables, i, initial_set, tol)?;
        records.push(rec);
        flags.extend(f);
    }
    Ok(CheckResult::from_records(Criterion::Inclusion, tol.eps, records, flags))
}

fn inclusion_at<T: Real>(
    p: &MarkovProcess<T>,
    tables: &ContextTables<T>,
    i: usize,
    initial_set: &[DensityMatrix<T>],
    tol: &Tolerances<T>,
) -> Result<(ContextRecord<T>, Vec<Flag>)> {
    let fp = future_projectors(p, tables, i, tol.degeneracy, tol.rank)?;
    let h = compute_h(p, i, initial_set, tol.rank)?;
    let (_, residual) = subspace_contains(&h, &fp.subspace, tol.eps)?;
    let mut flags = Vec::new();
    if fp.degenerate {
        flags.push(Flag {
            kind: FlagKind::DegenerateQ,
            time: Some(i),
            note: "some Q_i is degenerate; the inclusion ⇒ commutators audit does not apply".into(),
        });
    }
    if fp.vanishing > 0 {
        flags.push(Flag {
            kind: FlagKind::VanishingFuture,
            time: Some(i),
            note: format!("{} future(s) with Q_i = 0 ignored", fp.vanishing),
        });
    }
    if !p.instrument(i).is_hermitian(tol.eps) {
        flags.push(Flag {
            kind: FlagKind::NonHermitianKraus,
            time: Some(i),
            note: "instrument has non-Hermitian Kraus operators".into(),
        });
    }
    let mut rec = ContextRecord::new(i, Vec::new(), None, Vec::new(), residual);
    rec.lhs = Some(T::lit(fp.subspace.len() as f64));
    rec.rhs = Some(T::lit(h.len() as f64));
    Ok((rec, flags))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opmat::{basis_ket, named};
    use crate::process::{Instrument, KrausSet};
    use crate::scalar::cplx;

    fn z() -> Instrument<f64> {
        Instrument::projective(&[basis_ket(2, 0), basis_ket(2, 1)]).unwrap()
    }

    fn ex4() -> MarkovProcess<f64> {
        let h = KrausSet::unitary(named::hadamard());
        let x = Instrument::new(vec![("+".into(), named::plus()), ("-".into(), named::minus())]).unwrap();
        MarkovProcess::new(
            DensityMatrix::pure(&basis_ket(2, 0)).unwrap(),
            vec![h.clone(), h],
            vec![z(), x, z()],
        )
        .unwrap()
    }

    fn ex6() -> MarkovProcess<f64> {
        let l21 = ComplexMatrix::from_rows(vec![
            vec![cplx(1.0, 0.0), cplx(1.0, 0.0)],
            vec![cplx(0.0, 1.0), cplx(0.0, -1.0)],
        ])
        .unwrap()
        .scale_real(std::f64::consts::FRAC_1_SQRT_2);
        MarkovProcess::new(
            DensityMatrix::maximally_mixed(2),
            vec![KrausSet::unitary(l21), KrausSet::unitary(named::hadamard())],
            vec![z(), z(), z()],
        )
        .unwrap()
    }

    fn span(ms: &[ComplexMatrix<f64>]) -> OperatorSubspace<f64> {
        subspace_span(ms, 1e-9).unwrap()
    }

    fn same(a: &OperatorSubspace<f64>, b: &OperatorSubspace<f64>) -> bool {
        a.len() == b.len() && subspace_contains(a, b, 1e-9).unwrap().0 && subspace_contains(b, a, 1e-9).unwrap().0
    }

    #[test]
    fn default_set_spans_everything() {
        let set = default_initial_set::<f64>(3);
        assert_eq!(set.len(), 9);
        let ms: Vec<_> = set.iter().map(|r| r.matrix().clone()).collect();
        assert_eq!(span(&ms).len(), 9);
    }

    #[test]
    fn h_examples() {
        let set = default_initial_set::<f64>(2);
        let h = compute_h(&ex4(), 2, &set, 1e-9).unwrap();
        assert!(same(&h, &span(&[named::plus(), named::minus()])));
        let h = compute_h(&ex6(), 2, &set, 1e-9).unwrap();
        assert!(same(&h, &span(&[named::plus_i(), named::minus_i()])));
        let one = [DensityMatrix::maximally_mixed(2)];
        assert_eq!(compute_h(&ex4(), 1, &one, 1e-9).unwrap().len(), 1);
        assert!(matches!(compute_h(&ex4(), 1, &[], 1e-9), Err(Error::Empty(_))));
    }

    #[test]
    fn f_examples() {
        let (f, degenerate) = compute_f(&ex4(), 2, 1e-8, 1e-9).unwrap();
        assert!(same(&f, &span(&[named::plus(), named::minus()])));
        assert!(!degenerate);
        let (f, _) = compute_f(&ex6(), 2, 1e-8, 1e-9).unwrap();
        assert!(same(&f, &span(&[named::plus(), named::minus()])));

        let p = MarkovProcess::new(
            DensityMatrix::maximally_mixed(2),
            vec![KrausSet::identity(2)],
            vec![z(), Instrument::trivial(2)],
        )
        .unwrap();
        let (f, degenerate) = compute_f(&p, 1, 1e-8, 1e-9).unwrap();
        assert!(degenerate);
        assert_eq!(f.len(), 1);
        assert!(compute_f(&p, 2, 1e-8, 1e-9).is_err());
    }

    #[test]
    fn inclusion_examples() {
        let set = default_initial_set::<f64>(2);
        let tol = Tolerances::default();
        assert!(check_inclusion(&ex4(), 2, &set, &tol).unwrap().passed());
        let r = check_inclusion(&ex6(), 2, &set, &tol).unwrap();
        assert!(r.failed());
        assert!((r.max_residual - 1.0).abs() < 1e-9);
        // ℍ_1 is everything for the default set.
        assert!(check_inclusion(&ex6(), 1, &set, &tol).unwrap().passed());
    }
}
