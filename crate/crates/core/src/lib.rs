//! Simulation of finite-dimensional Markovian multi-time quantum processes
//! and numerical classicality diagnostics.
//!
//! A process is an initial state, a CPTP map between consecutive probing
//! times and one instrument per time, each outcome carrying a single Kraus
//! operator. [`stats`] evaluates the multi-time statistics, and
//! [`classicality`] checks Kolmogorov consistency together with the various
//! commutativity criteria, the `𝔽 ⊆ ℍ` inclusion and the NCGD condition.
//!
//! Times are 1-based everywhere in the public API.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the
//! aliases at the crate root fix the scalar to `f64`.
//!
//! ```
//! use qkolmo_core::classicality::{analyze, AnalysisConfig};
//! use qkolmo_core::opmat::{basis_ket, named};
//! use qkolmo_core::stats::full_distribution;
//! use qkolmo_core::{Criterion, DensityMatrix, Instrument, KrausSet, Process};
//!
//! # fn main() -> qkolmo_core::Result<()> {
//! let x = Instrument::new(vec![("+".into(), named::plus()), ("-".into(), named::minus())])?;
//! let z = Instrument::projective(&[basis_ket(2, 0), basis_ket(2, 1)])?;
//! let p = Process::new(DensityMatrix::pure(&basis_ket(2, 0))?, vec![KrausSet::identity(2)], vec![x, z])?;
//!
//! let dist = full_distribution(&p, &[2])?; // skip t1
//! assert!((dist.get(&["0"]).unwrap() - 1.0).abs() < 1e-12);
//! let report = analyze(&p, &AnalysisConfig::default())?;
//! assert!(report.result(Criterion::Kolmogorov).unwrap().failed());
//! # Ok(())
//! # }
//! ```

pub mod classicality;
pub mod error;
pub mod opmat;
pub mod process;
#[cfg(feature = "random")]
pub mod random;
pub mod scalar;
pub mod stats;

pub use error::{Error, Result};
pub use scalar::{cplx, Real};

pub use classicality::{analyze, AnalysisConfig, CheckResult, ClassicalityReport, Criterion};
pub use opmat::{ComplexMatrix, OperatorSubspace};
pub use process::{DensityMatrix, Instrument, KrausSet, MarkovProcess, OutcomeSequence};
pub use stats::JointDistribution;

pub type CMatrix = ComplexMatrix<f64>;
pub type CMatrixF32 = ComplexMatrix<f32>;
pub type Complex64 = num_complex::Complex<f64>;
pub type State = DensityMatrix<f64>;
pub type Channel = KrausSet<f64>;
pub type Measurement = Instrument<f64>;
pub type Process = MarkovProcess<f64>;
pub type ProcessF32 = MarkovProcess<f32>;
pub type Distribution = JointDistribution<f64>;
pub type Report = ClassicalityReport<f64>;
pub type Subspace = OperatorSubspace<f64>;

/// Tolerances shared by the statistics engine and the checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances<T> {
    /// Verdict threshold and validation tolerance.
    pub eps: T,
    /// Eigenvalues closer than this are grouped into one projector.
    pub degeneracy: T,
    /// Components below this norm are discarded when spanning subspaces.
    pub rank: T,
}

impl<T: Real> Tolerances<T> {
    pub fn with_eps(eps: T) -> Self {
        Self { eps, ..Self::default() }
    }
}

impl<T: Real> Default for Tolerances<T> {
    fn default() -> Self {
        let eps = T::default_tol();
        Self {
            eps,
            degeneracy: eps * T::lit(10.0),
            rank: eps,
        }
    }
}
