//! Hermitian spectral analysis, square roots, singular values and the polar
//! decomposition.
//!
//! Both factorizations are cyclic Jacobi methods. The matrices handled here
//! are small (d ≤ 16) and Jacobi gives eigen/singular vectors that are
//! orthonormal to working precision, which the projector and polar
//! invariants depend on.

use num_complex::Complex;
use num_traits::{One, Zero};

use super::matrix::{inner, ket_norm, ComplexMatrix, Ket};
use crate::error::{Error, Result};
use crate::scalar::{real, Real};

const MAX_SWEEPS: usize = 100;

/// Eigenpairs of a Hermitian matrix, eigenvalues sorted descending.
#[derive(Debug, Clone)]
pub struct Eigenpairs<T> {
    pub values: Vec<T>,
    pub vectors: Vec<Ket<T>>,
}

/// Spectral decomposition `H = Σ_μ λ_μ P_μ` with distinct (grouped) eigenvalues.
#[derive(Debug, Clone)]
pub struct HermitianSpectrum<T> {
    /// Strictly descending cluster eigenvalues.
    pub eigenvalues: Vec<T>,
    /// Orthogonal projector onto each cluster's eigenspace.
    pub projectors: Vec<ComplexMatrix<T>>,
    /// Rank of each projector.
    pub multiplicities: Vec<usize>,
}

impl<T: Real> HermitianSpectrum<T> {
    pub fn is_nondegenerate(&self) -> bool {
        self.multiplicities.iter().all(|&m| m == 1)
    }

    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        let dim = self.projectors.first().map_or(0, |p| p.dim());
        self.eigenvalues
            .iter()
            .zip(&self.projectors)
            .fold(ComplexMatrix::zeros(dim), |acc, (&l, p)| &acc + &p.scale_real(l))
    }
}

fn check_hermitian<T: Real>(h: &ComplexMatrix<T>) -> Result<()> {
    let defect = h.hermitian_defect();
    if defect > T::default_tol() * T::one().max(h.norm()) {
        return Err(Error::NotHermitian {
            defect: defect.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(())
}

/// Eigenpairs of a Hermitian matrix by the cyclic complex Jacobi method.
pub fn hermitian_eigenpairs<T: Real>(h: &ComplexMatrix<T>) -> Result<Eigenpairs<T>> {
    check_hermitian(h)?;
    let d = h.dim();
    let mut a = h.hermitian_part();
    let mut v = ComplexMatrix::<T>::identity(d);
    let eps = T::epsilon();

    for _ in 0..MAX_SWEEPS {
        let off: T = (0..d)
            .flat_map(|p| ((p + 1)..d).map(move |q| (p, q)))
            .map(|(p, q)| a[(p, q)].norm_sqr())
            .sum();
        let diag: T = (0..d).map(|i| a[(i, i)].re * a[(i, i)].re).sum();
        if off.sqrt() <= eps * eps.sqrt() * diag.sqrt() || off <= T::min_positive_value() {
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= T::min_positive_value() {
                    continue;
                }
                // phase e^{iφ} of a_pq; conjugating by diag(1, e^{-iφ}) makes it real
                let phase = apq / mag;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let zeta = (aqq - app) / (mag + mag);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                let ph_c = phase.conj();
                // columns: p' = c p − s e^{-iφ} q,  q' = s p + c e^{-iφ} q
                for k in 0..d {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * c - akq * ph_c * s;
                    a[(k, q)] = akp * s + akq * ph_c * c;
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * c - vkq * ph_c * s;
                    v[(k, q)] = vkp * s + vkq * ph_c * c;
                }
                // rows: p' = c p − s e^{iφ} q,  q' = s p + c e^{iφ} q
                for k in 0..d {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * c - aqk * phase * s;
                    a[(q, k)] = apk * s + aqk * phase * c;
                }
                a[(p, q)] = Complex::zero();
                a[(q, p)] = Complex::zero();
                a[(p, p)] = real(a[(p, p)].re);
                a[(q, q)] = real(a[(q, q)].re);
            }
        }
    }

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| {
        a[(j, j)]
            .re
            .partial_cmp(&a[(i, i)].re)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(Eigenpairs {
        values: order.iter().map(|&i| a[(i, i)].re).collect(),
        vectors: order.iter().map(|&i| v.column(i)).collect(),
    })
}

/// Spectral decomposition with eigenvalues closer than `degeneracy_tol`
/// (measured from the largest member of a cluster) merged into one projector.
pub fn herm_eig<T: Real>(h: &ComplexMatrix<T>, degeneracy_tol: T) -> Result<HermitianSpectrum<T>> {
    let pairs = hermitian_eigenpairs(h)?;
    let d = h.dim();
    let mut spectrum = HermitianSpectrum {
        eigenvalues: Vec::new(),
        projectors: Vec::new(),
        multiplicities: Vec::new(),
    };
    let mut start = 0;
    while start < d {
        let head = pairs.values[start];
        let mut end = start + 1;
        while end < d && head - pairs.values[end] < degeneracy_tol {
            end += 1;
        }
        let count = end - start;
        let mean = pairs.values[start..end].iter().copied().sum::<T>() / T::lit(count as f64);
        let projector = pairs.vectors[start..end]
            .iter()
            .fold(ComplexMatrix::zeros(d), |acc, v| &acc + &ComplexMatrix::projector(v));
        spectrum.eigenvalues.push(mean);
        spectrum.projectors.push(projector);
        spectrum.multiplicities.push(count);
        start = end;
    }
    Ok(spectrum)
}

/// Principal square root of a PSD matrix. Eigenvalues in `[-tol, 0)` are
/// clamped to zero; anything more negative is an error.
pub fn psd_sqrt<T: Real>(p: &ComplexMatrix<T>, tol: T) -> Result<ComplexMatrix<T>> {
    let pairs = hermitian_eigenpairs(p)?;
    if let Some(&min) = pairs.values.last() {
        if min < -tol {
            return Err(Error::NotPositive {
                min_eigenvalue: min.to_f64().unwrap_or(f64::NAN),
            });
        }
    }
    Ok(pairs
        .values
        .iter()
        .zip(&pairs.vectors)
        .fold(ComplexMatrix::zeros(p.dim()), |acc, (&l, v)| {
            &acc + &ComplexMatrix::projector(v).scale_real(l.max(T::zero()).sqrt())
        }))
}

/// `X = Σ_k σ_k u_k w_k†` with `U`, `W` unitary and σ descending.
#[derive(Debug, Clone)]
pub struct Svd<T> {
    pub singular_values: Vec<T>,
    /// Left singular vectors, completed to an orthonormal basis.
    pub left: Vec<Ket<T>>,
    /// Right singular vectors.
    pub right: Vec<Ket<T>>,
}

/// Singular value decomposition by one-sided (Hestenes) Jacobi rotations.
#[allow(clippy::needless_range_loop)] // the rotation updates vectors p and q together
pub fn svd<T: Real>(x: &ComplexMatrix<T>) -> Svd<T> {
    let d = x.dim();
    let eps = T::epsilon();
    let mut cols: Vec<Ket<T>> = (0..d).map(|j| x.column(j)).collect();
    let mut right: Vec<Ket<T>> = (0..d)
        .map(|j| {
            (0..d)
                .map(|i| if i == j { Complex::one() } else { Complex::zero() })
                .collect()
        })
        .collect();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..d {
            for q in (p + 1)..d {
                let alpha = inner(&cols[p], &cols[p]).re;
                let beta = inner(&cols[q], &cols[q]).re;
                let gamma = inner(&cols[p], &cols[q]);
                let mag = gamma.norm();
                if mag <= eps * (alpha * beta).sqrt() || mag <= T::min_positive_value() {
                    continue;
                }
                rotated = true;
                let ph_c = (gamma / mag).conj();
                let zeta = (beta - alpha) / (mag + mag);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                for vecs in [&mut cols, &mut right] {
                    for k in 0..d {
                        let vp = vecs[p][k];
                        let vq = vecs[q][k] * ph_c;
                        vecs[p][k] = vp * c - vq * s;
                        vecs[q][k] = vp * s + vq * c;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<T> = cols.iter().map(|c| ket_norm(c)).collect();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap_or(std::cmp::Ordering::Equal));
    let singular_values: Vec<T> = order.iter().map(|&i| norms[i]).collect();
    let right: Vec<Ket<T>> = order.iter().map(|&i| right[i].clone()).collect();

    let largest = singular_values.first().copied().unwrap_or_else(T::zero);
    let cutoff = largest * eps * T::lit(8.0 * d as f64);
    let mut left: Vec<Ket<T>> = Vec::with_capacity(d);
    for (&i, &sigma) in order.iter().zip(&singular_values) {
        if sigma > cutoff && sigma > T::min_positive_value() {
            left.push(cols[i].iter().map(|&z| z / sigma).collect());
        }
    }
    complete_basis(&mut left, d);
    Svd {
        singular_values,
        left,
        right,
    }
}

/// Extends an orthonormal family to a basis of `C^d` by orthogonalising
/// computational basis vectors in index order.
fn complete_basis<T: Real>(family: &mut Vec<Ket<T>>, d: usize) {
    while family.len() < d {
        let residuals: Vec<Ket<T>> = (0..d)
            .map(|j| {
                let mut r: Ket<T> = (0..d)
                    .map(|i| if i == j { Complex::one() } else { Complex::zero() })
                    .collect();
                for _ in 0..2 {
                    for u in family.iter() {
                        let c = inner(u, &r);
                        for (rk, uk) in r.iter_mut().zip(u) {
                            *rk -= c * uk;
                        }
                    }
                }
                r
            })
            .collect();
        let norms: Vec<T> = residuals.iter().map(|r| ket_norm(r)).collect();
        let best = norms.iter().copied().fold(T::zero(), T::max);
        let pick = norms
            .iter()
            .position(|&n| n >= best * T::lit(0.5))
            .expect("some residual attains the maximum");
        let n = norms[pick];
        family.push(residuals[pick].iter().map(|&z| z / n).collect());
    }
}

/// `|X| = √(X†X)`, assembled from the SVD as `W Σ W†`.
pub fn abs_value<T: Real>(x: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let f = svd(x);
    modulus_from_svd(&f, x.dim())
}

fn modulus_from_svd<T: Real>(f: &Svd<T>, d: usize) -> ComplexMatrix<T> {
    f.singular_values
        .iter()
        .zip(&f.right)
        .fold(ComplexMatrix::zeros(d), |acc, (&s, w)| {
            &acc + &ComplexMatrix::projector(w).scale_real(s)
        })
}

/// Factors `X = V·M`, `V` unitary and `M = |X|`.
#[derive(Debug, Clone)]
pub struct Polar<T> {
    pub unitary: ComplexMatrix<T>,
    pub modulus: ComplexMatrix<T>,
}

/// Polar decomposition. On singular `X` the unitary is completed on the
/// kernel by pairing leftover left and right singular vectors in order.
pub fn polar_decompose<T: Real>(x: &ComplexMatrix<T>) -> Polar<T> {
    let d = x.dim();
    let f = svd(x);
    let unitary = f
        .left
        .iter()
        .zip(&f.right)
        .fold(ComplexMatrix::zeros(d), |acc, (u, w)| {
            &acc + &ComplexMatrix::outer(u, w)
        });
    Polar {
        unitary,
        modulus: modulus_from_svd(&f, d),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opmat::{commutator, paulis};
    use crate::scalar::cplx;

    fn close(a: &ComplexMatrix<f64>, b: &ComplexMatrix<f64>, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn diagonal_with_degenerate_pair() {
        let h = ComplexMatrix::diag(&[2.0f64, 2.0, 1.0]);
        let s = herm_eig(&h, 1e-9).unwrap();
        assert_eq!(s.eigenvalues.len(), 2);
        assert!((s.eigenvalues[0] - 2.0).abs() < 1e-12);
        assert!((s.eigenvalues[1] - 1.0).abs() < 1e-12);
        assert_eq!(s.multiplicities, vec![2, 1]);
        assert!(close(&s.projectors[0], &ComplexMatrix::diag(&[1.0, 1.0, 0.0]), 1e-12));
        assert!(close(&s.projectors[1], &ComplexMatrix::diag(&[0.0, 0.0, 1.0]), 1e-12));
        assert!(!s.is_nondegenerate());
    }

    #[test]
    fn sigma_x_spectrum_is_plus_minus() {
        let [x, _, _] = paulis::<f64>();
        let s = herm_eig(&x, 1e-9).unwrap();
        assert!((s.eigenvalues[0] - 1.0).abs() < 1e-12);
        assert!((s.eigenvalues[1] + 1.0).abs() < 1e-12);
        // hand diagonalisation: |±⟩⟨±| = ½[[1, ±1], [±1, 1]]
        let plus = ComplexMatrix::from_real(2, &[0.5, 0.5, 0.5, 0.5]);
        let minus = ComplexMatrix::from_real(2, &[0.5, -0.5, -0.5, 0.5]);
        assert!(close(&s.projectors[0], &plus, 1e-12));
        assert!(close(&s.projectors[1], &minus, 1e-12));
    }

    #[test]
    fn identity_has_single_cluster() {
        let s = herm_eig(&ComplexMatrix::<f64>::identity(3), 1e-9).unwrap();
        assert_eq!(s.eigenvalues.len(), 1);
        assert!(close(&s.projectors[0], &ComplexMatrix::identity(3), 1e-12));
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::<f64>::from_real(2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(herm_eig(&m, 1e-9), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn sqrt_examples() {
        let r = psd_sqrt(&ComplexMatrix::<f64>::diag(&[4.0, 9.0]), 1e-9).unwrap();
        assert!(close(&r, &ComplexMatrix::diag(&[2.0, 3.0]), 1e-12));
        let r = psd_sqrt(&ComplexMatrix::<f64>::identity(2), 1e-9).unwrap();
        assert!(close(&r, &ComplexMatrix::identity(2), 1e-12));
        let r = psd_sqrt(&ComplexMatrix::<f64>::scaled_identity(2, 0.25), 1e-9).unwrap();
        assert!(close(&r, &ComplexMatrix::scaled_identity(2, 0.5), 1e-12));
    }

    #[test]
    fn sqrt_clamps_noise_but_rejects_negative() {
        let r = psd_sqrt(&ComplexMatrix::<f64>::diag(&[1.0, -1e-12]), 1e-9).unwrap();
        assert!(close(&r, &ComplexMatrix::diag(&[1.0, 0.0]), 1e-12));
        assert!(matches!(
            psd_sqrt(&ComplexMatrix::<f64>::diag(&[1.0, -0.1]), 1e-9),
            Err(Error::NotPositive { .. })
        ));
    }

    #[test]
    fn abs_value_examples() {
        let a = abs_value(&ComplexMatrix::<f64>::diag(&[1.0, -2.0]));
        assert!(close(&a, &ComplexMatrix::diag(&[1.0, 2.0]), 1e-12));

        let h = ComplexMatrix::<f64>::from_real(2, &[1.0, 1.0, 1.0, -1.0]).scale_real(0.5f64.sqrt());
        assert!(close(&abs_value(&h), &ComplexMatrix::identity(2), 1e-12));

        // X = [|0⟩⟨0|, |+⟩⟨+|] = ½[[0,1],[-1,0]]; X†X = ¼·1 by hand
        let p0 = ComplexMatrix::<f64>::diag(&[1.0, 0.0]);
        let plus = ComplexMatrix::from_real(2, &[0.5, 0.5, 0.5, 0.5]);
        let x = commutator(&p0, &plus).unwrap();
        assert!(close(&abs_value(&x), &ComplexMatrix::scaled_identity(2, 0.5), 1e-12));
    }

    #[test]
    fn polar_examples() {
        let h = ComplexMatrix::<f64>::from_real(2, &[1.0, 1.0, 1.0, -1.0]).scale_real(0.5f64.sqrt());
        let p = polar_decompose(&h);
        assert!(close(&p.unitary, &h, 1e-12));
        assert!(close(&p.modulus, &ComplexMatrix::identity(2), 1e-12));

        let p = polar_decompose(&ComplexMatrix::<f64>::diag(&[-3.0, 2.0]));
        assert!(close(&p.unitary, &ComplexMatrix::diag(&[-1.0, 1.0]), 1e-12));
        assert!(close(&p.modulus, &ComplexMatrix::diag(&[3.0, 2.0]), 1e-12));

        let [_, y, _] = paulis::<f64>();
        let x = y.scale(cplx(0.0, 0.5));
        let p = polar_decompose(&x);
        assert!(close(&p.unitary.matmul(&p.modulus), &x, 1e-12));
        assert!(close(
            &p.unitary.adjoint().matmul(&p.unitary),
            &ComplexMatrix::identity(2),
            1e-12
        ));
        assert!(close(&p.unitary, &y.scale(cplx(0.0, 1.0)), 1e-12));
        assert!(close(&p.modulus, &ComplexMatrix::scaled_identity(2, 0.5), 1e-12));
    }

    #[test]
    fn polar_completes_kernel_of_zero_and_rank_one() {
        let p = polar_decompose(&ComplexMatrix::<f64>::zeros(3));
        assert!(close(&p.unitary, &ComplexMatrix::identity(3), 1e-12));
        assert!(close(&p.modulus, &ComplexMatrix::zeros(3), 1e-12));

        let x = ComplexMatrix::<f64>::from_real(2, &[0.0, 1.0, 0.0, 0.0]);
        let p = polar_decompose(&x);
        assert!(close(&p.unitary.matmul(&p.modulus), &x, 1e-12));
        assert!(close(
            &p.unitary.adjoint().matmul(&p.unitary),
            &ComplexMatrix::identity(2),
            1e-12
        ));
    }
}
