use num_complex::Complex;

use super::matrix::ComplexMatrix;
use super::spectral::hermitian_eigenpairs;
use crate::error::{mismatch, Error, Result};
use crate::scalar::Real;

/// Operator subspace with a basis orthonormal under `⟨A,B⟩ = tr(A†B)`.
#[derive(Debug, Clone)]
pub struct OperatorSubspace<T> {
    dim: usize,
    basis: Vec<ComplexMatrix<T>>,
}

impl<T: Real> OperatorSubspace<T> {
    /// Whole operator space on `C^dim`, spanned by matrix units.
    pub fn full(dim: usize) -> Self {
        let basis = (0..dim * dim)
            .map(|k| {
                let mut m = ComplexMatrix::zeros(dim);
                m[(k / dim, k % dim)] = Complex::new(T::one(), T::zero());
                m
            })
            .collect();
        Self { dim, basis }
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> &[ComplexMatrix<T>] {
        &self.basis
    }

    /// Number of basis elements.
    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    /// Orthogonal projection of `m` onto the subspace.
    pub fn project(&self, m: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        self.basis
            .iter()
            .fold(ComplexMatrix::zeros(self.dim), |acc, b| &acc + &b.scale(b.hs_inner(m)))
    }

    /// `m` minus its projection, re-orthogonalised once.
    fn residual(&self, m: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        let mut r = m.clone();
        for _ in 0..2 {
            for b in &self.basis {
                r = &r - &b.scale(b.hs_inner(&r));
            }
        }
        r
    }

    pub fn gram_defect(&self) -> T {
        let mut worst = T::zero();
        for (i, a) in self.basis.iter().enumerate() {
            for (j, b) in self.basis.iter().enumerate() {
                let target = if i == j { T::one() } else { T::zero() };
                worst = worst.max((a.hs_inner(b) - Complex::new(target, T::zero())).norm());
            }
        }
        worst
    }
}

/// Orthonormal basis of the complex span of `ops` by modified Gram–Schmidt
/// with one re-orthogonalisation pass; components of norm below `rank_tol`
/// are discarded.
pub fn subspace_span<T: Real>(ops: &[ComplexMatrix<T>], rank_tol: T) -> Result<OperatorSubspace<T>> {
    let first = ops.first().ok_or(Error::Empty("operator list"))?;
    let dim = first.dim();
    let mut space = OperatorSubspace { dim, basis: Vec::new() };
    for op in ops {
        if op.dim() != dim {
            return Err(mismatch("subspace_span", dim, op.dim()));
        }
        if space.basis.len() == dim * dim {
            break;
        }
        let r = space.residual(op);
        let n = r.norm();
        if n >= rank_tol {
            space.basis.push(r.scale_real(T::one() / n));
        }
    }
    Ok(space)
}

/// Whether `inner ⊆ outer`. The residual is the largest Hilbert–Schmidt norm
/// left after projecting a unit element of `inner` onto `outer` (the sine of
/// the largest principal angle), so it does not depend on either basis.
pub fn subspace_contains<T: Real>(
    outer: &OperatorSubspace<T>,
    inner: &OperatorSubspace<T>,
    tol: T,
) -> Result<(bool, T)> {
    if outer.dim != inner.dim {
        return Err(mismatch("subspace_contains", outer.dim, inner.dim));
    }
    if inner.basis.is_empty() {
        return Ok((true, T::zero()));
    }
    let residuals: Vec<_> = inner.basis.iter().map(|b| outer.residual(b)).collect();
    let k = residuals.len();
    let gram = ComplexMatrix::from_fn(k, |a, b| residuals[a].hs_inner(&residuals[b]));
    let top = hermitian_eigenpairs(&gram.hermitian_part())?
        .values
        .first()
        .copied()
        .unwrap_or_else(T::zero);
    let residual = top.max(T::zero()).sqrt();
    Ok((residual < tol, residual))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opmat::{named, paulis};

    #[test]
    fn dependent_operators_collapse() {
        let id = ComplexMatrix::<f64>::identity(2);
        let s = subspace_span(&[id.clone(), id.scale_real(2.0)], 1e-9).unwrap();
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn plus_minus_projectors_span_two() {
        // Gram matrix oracle: ⟨P+,P+⟩ = ⟨P-,P-⟩ = 1, ⟨P+,P-⟩ = 0 → rank 2
        let p = named::plus::<f64>();
        let m = named::minus::<f64>();
        assert!((p.hs_inner(&m).norm()) < 1e-15);
        assert!((p.hs_inner(&p).re - 1.0).abs() < 1e-15);
        let s = subspace_span(&[p, m], 1e-9).unwrap();
        assert_eq!(s.len(), 2);
        assert!(s.gram_defect() < 1e-12);
    }

    #[test]
    fn paulis_and_identity_span_everything() {
        let [x, y, z] = paulis::<f64>();
        let s = subspace_span(&[x, y, z, ComplexMatrix::identity(2)], 1e-9).unwrap();
        assert_eq!(s.len(), 4);
    }

    #[test]
    fn containment_examples() {
        let plus = subspace_span(&[named::plus::<f64>()], 1e-9).unwrap();
        let (ok, res) = subspace_contains(&OperatorSubspace::full(2), &plus, 1e-9).unwrap();
        assert!(ok && res < 1e-15);

        let pm = subspace_span(&[named::plus::<f64>(), named::minus()], 1e-9).unwrap();
        assert!(subspace_contains(&pm, &pm, 1e-9).unwrap().0);

        let pmi = subspace_span(&[named::plus_i(), named::minus_i()], 1e-9).unwrap();
        let (ok, res) = subspace_contains(&pmi, &pm, 1e-9).unwrap();
        assert!(!ok);
        assert!((res - 1.0).abs() < 1e-12);
        assert!(!subspace_contains(&pm, &pmi, 1e-9).unwrap().0);
    }

    #[test]
    fn errors() {
        assert!(matches!(subspace_span::<f64>(&[], 1e-9), Err(Error::Empty(_))));
        let a = OperatorSubspace::<f64>::full(2);
        let b = OperatorSubspace::<f64>::full(3);
        assert!(subspace_contains(&a, &b, 1e-9).is_err());
    }
}
