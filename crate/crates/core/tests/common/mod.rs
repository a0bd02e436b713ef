#![allow(dead_code)]

use nalgebra::DMatrix;
use qkolmo_core::opmat::{ComplexMatrix, Ket};
use qkolmo_core::random::{random_classical_process, random_fixed_basis_process};
use qkolmo_core::MarkovProcess;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn to_nalgebra(m: &ComplexMatrix<f64>) -> DMatrix<nalgebra::Complex<f64>> {
    let d = m.dim();
    DMatrix::from_fn(d, d, |i, j| {
        let z = m[(i, j)];
        nalgebra::Complex::new(z.re, z.im)
    })
}

pub fn close(a: &ComplexMatrix<f64>, b: &ComplexMatrix<f64>, tol: f64) -> bool {
    (a - b).norm() <= tol
}

pub fn classical_process(rng: &mut ChaCha8Rng, d: usize, n: usize, max_outcomes: usize) -> MarkovProcess<f64> {
    random_classical_process(rng, d, n, max_outcomes)
}

pub fn fixed_basis_process(rng: &mut ChaCha8Rng, d: usize, n: usize) -> (MarkovProcess<f64>, Vec<Ket<f64>>) {
    random_fixed_basis_process(rng, d, n)
}
