//! Reference computations that share no code with the statistics engine.
#![allow(dead_code)]

use nalgebra::{Complex, DMatrix};
use qkolmo_core::{ComplexMatrix, MarkovProcess};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type NMat = DMatrix<Complex<f64>>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn to_na(m: &ComplexMatrix<f64>) -> NMat {
    let d = m.dim();
    DMatrix::from_fn(d, d, |i, j| {
        let z = m[(i, j)];
        Complex::new(z.re, z.im)
    })
}

/// Joint probability of `outcomes` (indices, one per entry of `measure_at`)
/// as `Σ_paths tr(A ρ A†)`, where each path fixes one Kraus operator of
/// every dynamical map and `A` is the full operator product along it.
/// Unmeasured times contribute the identity.
pub fn path_oracle(p: &MarkovProcess<f64>, measure_at: &[usize], outcomes: &[usize]) -> f64 {
    let n = p.n_times();
    let d = p.dim();
    let rho = to_na(p.initial().matrix());
    let maps: Vec<Vec<NMat>> = p
        .dynamics()
        .iter()
        .map(|k| k.operators().iter().map(to_na).collect())
        .collect();
    let probes: Vec<NMat> = (1..=n)
        .map(|t| match measure_at.iter().position(|&s| s == t) {
            Some(k) => to_na(p.instrument(t).kraus(outcomes[k])),
            None => NMat::identity(d, d),
        })
        .collect();
    let mut total = 0.0;
    let mut path = vec![0usize; maps.len()];
    loop {
        let mut a = probes[0].clone();
        for t in 1..n {
            a = &probes[t] * &maps[t - 1][path[t - 1]] * a;
        }
        total += (&a * &rho * a.adjoint()).trace().re;
        // Odometer over Kraus indices.
        let mut k = 0;
        while k < path.len() {
            path[k] += 1;
            if path[k] < maps[k].len() {
                break;
            }
            path[k] = 0;
            k += 1;
        }
        if k == path.len() {
            return total;
        }
    }
}

/// `|X| = V Σ V†` from the singular value decomposition `X = U Σ V†`.
pub fn abs_oracle(x: &NMat) -> NMat {
    let svd = x.clone().svd(true, true);
    let v_t = svd.v_t.expect("requested");
    let sigma = NMat::from_diagonal(&svd.singular_values.map(|s| Complex::new(s, 0.0)));
    v_t.adjoint() * sigma * v_t
}

pub fn commutator(a: &NMat, b: &NMat) -> NMat {
    a * b - b * a
}

/// `Σ_a K_a† Q K_a`.
pub fn heisenberg(kraus: &[NMat], q: &NMat) -> NMat {
    kraus
        .iter()
        .fold(NMat::zeros(q.nrows(), q.ncols()), |acc, k| acc + k.adjoint() * q * k)
}
