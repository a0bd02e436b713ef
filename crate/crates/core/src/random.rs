//! Random states, channels, instruments and processes for property tests
//! and benchmarks.
//!
//! Every generator takes the RNG explicitly so callers control seeding.

use num_complex::Complex;
use rand::Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::error::Result;
use crate::opmat::{hermitian_eigenpairs, inner, ket_norm, psd_sqrt, ComplexMatrix, Ket};
use crate::process::{DensityMatrix, Instrument, KrausSet, MarkovProcess};
use crate::scalar::Real;

fn gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Complex<T> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex::new(T::lit(re), T::lit(im))
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre<T: Real, R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix<T> {
    ComplexMatrix::from_fn(dim, |_, _| gaussian(rng))
}

/// Random vector with i.i.d. complex Gaussian entries, normalized.
pub fn random_ket<T: Real, R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Ket<T> {
    loop {
        let v: Ket<T> = (0..dim).map(|_| gaussian(rng)).collect();
        let n = ket_norm(&v);
        if n > T::lit(1e-3) {
            return v.into_iter().map(|z| z / n).collect();
        }
    }
}

/// Haar-random orthonormal basis (Gram–Schmidt on Gaussian vectors).
pub fn random_basis<T: Real, R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<Ket<T>> {
    let mut basis: Vec<Ket<T>> = Vec::with_capacity(dim);
    while basis.len() < dim {
        let mut v: Ket<T> = (0..dim).map(|_| gaussian(rng)).collect();
        // Two passes keep the basis orthonormal to working precision.
        for _ in 0..2 {
            for b in &basis {
                let c = inner(b, &v);
                for (x, y) in v.iter_mut().zip(b) {
                    *x -= c * y;
                }
            }
        }
        let n = ket_norm(&v);
        if n > T::lit(1e-3) {
            basis.push(v.into_iter().map(|z| z / n).collect());
        }
    }
    basis
}

/// Haar-random unitary; its columns are [`random_basis`].
pub fn random_unitary<T: Real, R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix<T> {
    let basis = random_basis(rng, dim);
    ComplexMatrix::from_fn(dim, |i, j| basis[j][i])
}

pub fn random_pure<T: Real, R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DensityMatrix<T> {
    DensityMatrix::pure(&random_ket(rng, dim)).expect("normalized ket")
}

/// Induced-measure random state `GG†/tr(GG†)` with `G` a `dim × rank` Ginibre matrix.
pub fn random_density<T: Real, R: Rng + ?Sized>(rng: &mut R, dim: usize, rank: usize) -> DensityMatrix<T> {
    let rank = rank.clamp(1, dim);
    let g = ComplexMatrix::from_fn(dim, |_, j| {
        if j < rank {
            gaussian(rng)
        } else {
            Complex::new(T::zero(), T::zero())
        }
    });
    let m = g.matmul(&g.adjoint());
    let tr = m.trace().re;
    DensityMatrix::from_engine(m.hermitian_part().scale_real(T::one() / tr))
}

/// `S^{-1/2}` for a positive-definite `S`.
fn inverse_sqrt<T: Real>(s: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    let pairs = hermitian_eigenpairs(s)?;
    Ok(pairs
        .values
        .iter()
        .zip(&pairs.vectors)
        .fold(ComplexMatrix::zeros(s.dim()), |acc, (&l, v)| {
            &acc + &ComplexMatrix::projector(v).scale_real(T::one() / l.sqrt())
        }))
}

/// `count` Ginibre operators `G_ℓ` renormalized to `G_ℓ S^{-1/2}` with `S = Σ G_ℓ†G_ℓ`.
fn normalized_family<T: Real, R: Rng + ?Sized>(rng: &mut R, dim: usize, count: usize) -> Vec<ComplexMatrix<T>> {
    loop {
        let gs: Vec<_> = (0..count).map(|_| ginibre::<T, R>(rng, dim)).collect();
        let s = gs
            .iter()
            .fold(ComplexMatrix::zeros(dim), |acc, g| &acc + &g.adjoint().matmul(g));
        if let Ok(inv) = inverse_sqrt(&s.hermitian_part()) {
            if inv.is_finite() {
                return gs.iter().map(|g| g.matmul(&inv)).collect();
            }
        }
    }
}

/// Random CPTP map with `rank` Kraus operators.
pub fn random_kraus_set<T: Real, R: Rng + ?Sized>(rng: &mut R, dim: usize, rank: usize) -> KrausSet<T> {
    KrausSet::new(normalized_family(rng, dim, rank.max(1))).expect("non-empty Kraus family")
}

fn labelled<T>(ops: Vec<ComplexMatrix<T>>) -> Vec<(String, ComplexMatrix<T>)> {
    ops.into_iter().enumerate().map(|(a, k)| (a.to_string(), k)).collect()
}

/// Generic instrument: one random Kraus operator per outcome.
pub fn random_instrument<T: Real, R: Rng + ?Sized>(rng: &mut R, dim: usize, outcomes: usize) -> Instrument<T> {
    Instrument::new(labelled(normalized_family(rng, dim, outcomes.max(1)))).expect("valid instrument")
}

/// Instrument with positive Kraus operators `K_a = (S^{-1/2} G_a†G_a S^{-1/2})^{1/2}`.
pub fn random_hermitian_instrument<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    outcomes: usize,
) -> Instrument<T> {
    let ops = normalized_family::<T, R>(rng, dim, outcomes.max(1))
        .into_iter()
        .map(|k| psd_sqrt(&k.adjoint().matmul(&k).hermitian_part(), T::lit(1e-6)).expect("PSD effect"))
        .collect();
    Instrument::new(labelled(ops)).expect("valid instrument")
}

/// Random probability vector, uniform on the simplex.
pub fn random_distribution<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<f64> {
    let xs: Vec<f64> = (0..len).map(|_| rng.sample::<f64, _>(Exp1) + 1e-12).collect();
    let s: f64 = xs.iter().sum();
    xs.into_iter().map(|x| x / s).collect()
}

/// Positive Kraus operators `K_a = U diag(√p_a) U†` sharing the eigenbasis
/// `basis`, so they all commute.
pub fn commuting_instrument<T: Real, R: Rng + ?Sized>(rng: &mut R, basis: &[Ket<T>], outcomes: usize) -> Instrument<T> {
    let dim = basis.len();
    let m = outcomes.max(1);
    let columns: Vec<Vec<f64>> = (0..dim).map(|_| random_distribution(rng, m)).collect();
    let ops = (0..m)
        .map(|a| {
            basis.iter().enumerate().fold(ComplexMatrix::zeros(dim), |acc, (k, b)| {
                &acc + &ComplexMatrix::projector(b).scale_real(T::lit(columns[k][a].sqrt()))
            })
        })
        .collect();
    Instrument::new(labelled(ops)).expect("valid instrument")
}

pub fn random_commuting_instrument<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    outcomes: usize,
) -> Instrument<T> {
    let basis = random_basis(rng, dim);
    commuting_instrument(rng, &basis, outcomes)
}

/// Rank-1 projective instrument in a Haar-random basis.
pub fn random_projective<T: Real, R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Instrument<T> {
    Instrument::projective(&random_basis(rng, dim)).expect("valid basis")
}

/// Classical stochastic map on the basis: Kraus operators `√P(b|a) |b⟩⟨a|`
/// with each column of `P` uniform on the simplex.
pub fn random_classical_channel<T: Real, R: Rng + ?Sized>(rng: &mut R, basis: &[Ket<T>]) -> KrausSet<T> {
    let dim = basis.len();
    let mut ops = Vec::with_capacity(dim * dim);
    for a in basis {
        let column = random_distribution(rng, dim);
        for (b, p) in basis.iter().zip(column) {
            ops.push(ComplexMatrix::outer(b, a).scale_real(T::lit(p.sqrt())));
        }
    }
    KrausSet::new(ops).expect("non-empty Kraus family")
}

/// Complete dephasing in `basis` followed by a Haar-random unitary.
pub fn dephase_then_unitary<T: Real, R: Rng + ?Sized>(rng: &mut R, basis: &[Ket<T>]) -> KrausSet<T> {
    let u = random_unitary(rng, basis.len());
    KrausSet::new(basis.iter().map(|b| u.matmul(&ComplexMatrix::projector(b))).collect()).expect("non-empty")
}

/// Haar-random unitary followed by complete dephasing in `basis`.
pub fn unitary_then_dephase<T: Real, R: Rng + ?Sized>(rng: &mut R, basis: &[Ket<T>]) -> KrausSet<T> {
    let u = random_unitary(rng, basis.len());
    KrausSet::new(basis.iter().map(|b| ComplexMatrix::projector(b).matmul(&u)).collect()).expect("non-empty")
}

/// Random effect `0 ≤ E ≤ 1`.
pub fn random_effect<T: Real, R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix<T> {
    let basis = random_basis(rng, dim);
    basis.iter().fold(ComplexMatrix::zeros(dim), |acc, b| {
        &acc + &ComplexMatrix::projector(b).scale_real(T::lit(rng.gen::<f64>()))
    })
}

/// Random `n`-time process on dimension `dim`: random mixed initial state,
/// dynamics of random Kraus rank and generic instruments with `2..=max_outcomes`
/// outcomes.
pub fn random_process<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    n: usize,
    max_outcomes: usize,
) -> MarkovProcess<T> {
    let rank = rng.gen_range(1..=dim);
    let rho = random_density(rng, dim, rank);
    let dynamics = (1..n)
        .map(|_| {
            let r = rng.gen_range(1..=dim);
            random_kraus_set(rng, dim, r)
        })
        .collect();
    let instruments = (0..n)
        .map(|_| {
            let m = rng.gen_range(2..=max_outcomes.max(2));
            random_instrument(rng, dim, m)
        })
        .collect();
    MarkovProcess::new(rho, dynamics, instruments).expect("consistent dimensions")
}

/// Process diagonal in a random basis: commuting positive instruments with
/// `1..=max_outcomes` outcomes and classical stochastic dynamics.
pub fn random_classical_process<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    n: usize,
    max_outcomes: usize,
) -> MarkovProcess<T> {
    let basis = random_basis(rng, dim);
    let rank = rng.gen_range(1..=dim);
    let rho = random_density(rng, dim, rank);
    let dynamics = (1..n).map(|_| random_classical_channel(rng, &basis)).collect();
    let instruments = (0..n)
        .map(|_| {
            let m = rng.gen_range(1..=max_outcomes.max(1));
            commuting_instrument(rng, &basis, m)
        })
        .collect();
    MarkovProcess::new(rho, dynamics, instruments).expect("consistent dimensions")
}

/// Rank-1 projective measurements in one random basis at every time (labels
/// `b<k>`, outcome order shuffled per time), a full-rank initial state, and
/// dynamics drawn at random between generic channels and dephase-then-unitary
/// maps. Returns the basis alongside the process.
pub fn random_fixed_basis_process<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    n: usize,
) -> (MarkovProcess<T>, Vec<Ket<T>>) {
    let basis = random_basis(rng, dim);
    let rho = random_density(rng, dim, dim);
    let dynamics = (1..n)
        .map(|_| {
            if rng.gen_bool(0.5) {
                dephase_then_unitary(rng, &basis)
            } else {
                let r = rng.gen_range(1..=dim);
                random_kraus_set(rng, dim, r)
            }
        })
        .collect();
    let instruments = (0..n)
        .map(|_| {
            let mut order: Vec<usize> = (0..dim).collect();
            for k in (1..dim).rev() {
                order.swap(k, rng.gen_range(0..=k));
            }
            Instrument::new(
                order
                    .iter()
                    .map(|&k| (format!("b{k}"), ComplexMatrix::projector(&basis[k])))
                    .collect(),
            )
            .expect("distinct labels")
        })
        .collect();
    (
        MarkovProcess::new(rho, dynamics, instruments).expect("consistent dimensions"),
        basis,
    )
}
