use serde::Serialize;

use crate::error::{mismatch, Error, Result};
use crate::opmat::{hermitian_eigenpairs, ComplexMatrix};
use crate::process::Instrument;
use crate::scalar::Real;

/// Fixed-point and commutation status of one effect under one instrument.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LuedersResult<T> {
    /// `‖𝒦†[Q] − Q‖ < ε`
    pub fixed_point: bool,
    /// every `‖[K^{(a)}, Q]‖ < ε`
    pub commuting: bool,
    pub fixed_point_residual: T,
    /// `‖[K^{(a)}, Q]‖` in outcome order.
    pub commutator_residuals: Vec<T>,
    /// All Kraus operators Hermitian, so the two verdicts must agree.
    pub hermitian_kraus: bool,
}

impl<T: Real> LuedersResult<T> {
    pub fn max_commutator(&self) -> T {
        self.commutator_residuals.iter().fold(T::zero(), |m, &x| m.max(x))
    }

    /// `Some(agree)` when the equivalence applies, `None` otherwise.
    pub fn consistent(&self) -> Option<bool> {
        self.hermitian_kraus.then_some(self.fixed_point == self.commuting)
    }
}

pub fn check_lueders_fixed_point<T: Real>(j: &Instrument<T>, q: &ComplexMatrix<T>, eps: T) -> Result<LuedersResult<T>> {
    if j.dim() != q.dim() {
        return Err(mismatch("Lüders check", j.dim(), q.dim()));
    }
    let defect = q.hermitian_defect();
    if defect > eps {
        return Err(Error::NotHermitian {
            defect: defect.to_f64().unwrap_or(f64::NAN),
        });
    }
    let min = hermitian_eigenpairs(q)?.values.last().copied().unwrap_or_else(T::zero);
    if min < -eps {
        return Err(Error::NotPositive {
            min_eigenvalue: min.to_f64().unwrap_or(f64::NAN),
        });
    }
    let fixed_point_residual = (&j.total_adjoint(q) - q).norm();
    let commutator_residuals: Vec<T> = j
        .elements()
        .iter()
        .map(|(_, k)| (&k.matmul(q) - &q.matmul(k)).norm())
        .collect();
    Ok(LuedersResult {
        fixed_point: fixed_point_residual < eps,
        commuting: commutator_residuals.iter().all(|&c| c < eps),
        fixed_point_residual,
        commutator_residuals,
        hermitian_kraus: j.is_hermitian(eps),
    })
}
