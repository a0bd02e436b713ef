//! Complex operator algebra: matrices, Hermitian spectra, square roots,
//! the polar decomposition and Hilbert–Schmidt operator subspaces.

mod matrix;
mod spectral;
mod subspace;

pub use matrix::{adjoint, basis_ket, commutator, inner, ket_norm, orthonormality_defect, ComplexMatrix, Ket};
pub use spectral::{
    abs_value, herm_eig, hermitian_eigenpairs, polar_decompose, psd_sqrt, svd, Eigenpairs, HermitianSpectrum, Polar,
    Svd,
};
pub use subspace::{subspace_contains, subspace_span, OperatorSubspace};

use crate::scalar::{cplx, Real};

/// `[σ_x, σ_y, σ_z]`
pub fn paulis<T: Real>() -> [ComplexMatrix<T>; 3] {
    let z = cplx(0.0, 0.0);
    let one = cplx(1.0, 0.0);
    let i = cplx(0.0, 1.0);
    [
        ComplexMatrix::from_fn(2, |r, c| if r != c { one } else { z }),
        ComplexMatrix::from_fn(2, |r, c| match (r, c) {
            (0, 1) => -i,
            (1, 0) => i,
            _ => z,
        }),
        ComplexMatrix::diag(&[T::one(), -T::one()]),
    ]
}

/// Frequently used qubit operators.
pub mod named {
    use super::*;

    pub fn hadamard<T: Real>() -> ComplexMatrix<T> {
        ComplexMatrix::from_real(2, &[1.0, 1.0, 1.0, -1.0]).scale_real(T::FRAC_1_SQRT_2())
    }

    fn qubit_projector<T: Real>(a: (f64, f64), b: (f64, f64)) -> ComplexMatrix<T> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        ComplexMatrix::projector(&[cplx(a.0 * s, a.1 * s), cplx(b.0 * s, b.1 * s)])
    }

    /// `|+⟩⟨+|`
    pub fn plus<T: Real>() -> ComplexMatrix<T> {
        qubit_projector((1.0, 0.0), (1.0, 0.0))
    }

    /// `|−⟩⟨−|`
    pub fn minus<T: Real>() -> ComplexMatrix<T> {
        qubit_projector((1.0, 0.0), (-1.0, 0.0))
    }

    /// `|+i⟩⟨+i|` with `|±i⟩ = (|0⟩ ± i|1⟩)/√2`
    pub fn plus_i<T: Real>() -> ComplexMatrix<T> {
        qubit_projector((1.0, 0.0), (0.0, 1.0))
    }

    /// `|−i⟩⟨−i|`
    pub fn minus_i<T: Real>() -> ComplexMatrix<T> {
        qubit_projector((1.0, 0.0), (0.0, -1.0))
    }

    /// Computational-basis projector `|k⟩⟨k|`.
    pub fn proj<T: Real>(dim: usize, k: usize) -> ComplexMatrix<T> {
        ComplexMatrix::projector(&basis_ket(dim, k))
    }
}
