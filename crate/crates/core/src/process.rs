//! States, CPTP maps, single-Kraus instruments and the assembled Markovian
//! multi-time process.
//!
//! Times are 1-based throughout: a process probed at `n` times has
//! instruments `𝒥_1 … 𝒥_n` and dynamics `Λ_{2:1} … Λ_{n:n-1}`.

use num_complex::Complex;

use crate::error::{mismatch, Error, Result};
use crate::opmat::{hermitian_eigenpairs, ket_norm, ComplexMatrix};
use crate::scalar::Real;

/// Possibly subnormalised density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T> {
    mat: ComplexMatrix<T>,
    normalized: bool,
}

impl<T: Real> DensityMatrix<T> {
    /// Normalised state: Hermitian, PSD and unit trace within `tol`.
    pub fn new(mat: ComplexMatrix<T>, tol: T) -> Result<Self> {
        Self::checked(mat, tol, true)
    }

    /// Subnormalised state: trace in `[0, 1 + tol]`.
    pub fn subnormalized(mat: ComplexMatrix<T>, tol: T) -> Result<Self> {
        Self::checked(mat, tol, false)
    }

    fn checked(mat: ComplexMatrix<T>, tol: T, normalized: bool) -> Result<Self> {
        if !mat.is_finite() {
            return Err(Error::NonFinite);
        }
        let defect = mat.hermitian_defect();
        if defect > tol {
            return Err(Error::NotHermitian {
                defect: defect.to_f64().unwrap_or(f64::NAN),
            });
        }
        let min = hermitian_eigenpairs(&mat)?
            .values
            .last()
            .copied()
            .unwrap_or_else(T::zero);
        if min < -tol {
            return Err(Error::NotPositive {
                min_eigenvalue: min.to_f64().unwrap_or(f64::NAN),
            });
        }
        let tr = mat.trace().re;
        let ok = if normalized {
            (tr - T::one()).abs() <= tol
        } else {
            tr >= -tol && tr <= T::one() + tol
        };
        if !ok {
            return Err(Error::BadTrace {
                trace: tr.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Self { mat, normalized })
    }

    /// Wraps a matrix produced by the engine without re-checking positivity.
    pub(crate) fn from_engine(mat: ComplexMatrix<T>) -> Self {
        Self { mat, normalized: false }
    }

    /// `|ψ⟩⟨ψ|` for the normalised direction of `psi`.
    pub fn pure(psi: &[Complex<T>]) -> Result<Self> {
        let n = ket_norm(psi);
        if psi.is_empty() || n <= T::zero() || !n.is_finite() {
            return Err(Error::Empty("state vector"));
        }
        let v: Vec<Complex<T>> = psi.iter().map(|&z| z / n).collect();
        Ok(Self {
            mat: ComplexMatrix::projector(&v),
            normalized: true,
        })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            mat: ComplexMatrix::scaled_identity(dim, T::one() / T::lit(dim as f64)),
            normalized: true,
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix<T> {
        self.mat
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn trace(&self) -> T {
        self.mat.trace().re
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }
}

/// CPTP map in Kraus form, `Λ[ρ] = Σ_ℓ L_ℓ ρ L_ℓ†`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet<T> {
    ops: Vec<ComplexMatrix<T>>,
}

impl<T: Real> KrausSet<T> {
    /// Requires a non-empty list of equally sized operators. Completeness is
    /// checked by [`validate_process`] so that invalid maps can be reported.
    pub fn new(ops: Vec<ComplexMatrix<T>>) -> Result<Self> {
        let dim = ops.first().ok_or(Error::Empty("Kraus operators"))?.dim();
        for op in &ops {
            if op.dim() != dim {
                return Err(mismatch("Kraus set", dim, op.dim()));
            }
        }
        Ok(Self { ops })
    }

    pub fn identity(dim: usize) -> Self {
        Self::unitary(ComplexMatrix::identity(dim))
    }

    pub fn unitary(u: ComplexMatrix<T>) -> Self {
        Self { ops: vec![u] }
    }

    pub fn operators(&self) -> &[ComplexMatrix<T>] {
        &self.ops
    }

    pub fn dim(&self) -> usize {
        self.ops[0].dim()
    }

    /// `‖Σ L†L − 1‖`
    pub fn completeness_defect(&self) -> T {
        completeness_defect(self.ops.iter())
    }

    /// `Σ_ℓ L ρ L†`; panics on dimension mismatch.
    pub fn apply(&self, rho: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        self.ops
            .iter()
            .fold(ComplexMatrix::zeros(rho.dim()), |acc, l| &acc + &l.sandwich(rho))
    }

    /// `Σ_ℓ L† Q L`; panics on dimension mismatch.
    pub fn apply_adjoint(&self, q: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        self.ops
            .iter()
            .fold(ComplexMatrix::zeros(q.dim()), |acc, l| &acc + &l.adjoint_sandwich(q))
    }
}

fn completeness_defect<'a, T: Real + 'a>(ops: impl Iterator<Item = &'a ComplexMatrix<T>>) -> T {
    let mut dim = 0;
    let mut sum: Option<ComplexMatrix<T>> = None;
    for k in ops {
        dim = k.dim();
        let term = k.adjoint().matmul(k);
        sum = Some(match sum {
            Some(s) => &s + &term,
            None => term,
        });
    }
    match sum {
        Some(s) => (&s - &ComplexMatrix::identity(dim)).norm(),
        None => T::infinity(),
    }
}

/// Instrument whose every outcome is a single Kraus operator.
#[derive(Debug, Clone, PartialEq)]
pub struct Instrument<T> {
    elements: Vec<(String, ComplexMatrix<T>)>,
}

impl<T: Real> Instrument<T> {
    /// Outcomes keep their declared order; labels must be unique.
    pub fn new(elements: Vec<(String, ComplexMatrix<T>)>) -> Result<Self> {
        let dim = elements.first().ok_or(Error::Empty("instrument outcomes"))?.1.dim();
        for (i, (label, k)) in elements.iter().enumerate() {
            if k.dim() != dim {
                return Err(mismatch(format!("instrument outcome '{label}'"), dim, k.dim()));
            }
            if elements[..i].iter().any(|(l, _)| l == label) {
                return Err(Error::DuplicateOutcome(label.clone()));
            }
        }
        Ok(Self { elements })
    }

    /// Single-outcome instrument `{1}` (labelled `"id"`).
    pub fn trivial(dim: usize) -> Self {
        Self {
            elements: vec![("id".to_string(), ComplexMatrix::identity(dim))],
        }
    }

    /// Rank-1 projective measurement `{|b_k⟩⟨b_k|}` labelled `"0"`, `"1"`, ….
    pub fn projective(basis: &[Vec<Complex<T>>]) -> Result<Self> {
        Self::new(
            basis
                .iter()
                .enumerate()
                .map(|(k, b)| (k.to_string(), ComplexMatrix::projector(b)))
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.elements[0].1.dim()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.elements.iter().map(|(l, _)| l.as_str())
    }

    pub fn elements(&self) -> &[(String, ComplexMatrix<T>)] {
        &self.elements
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.elements.iter().position(|(l, _)| l == label)
    }

    pub fn label(&self, idx: usize) -> &str {
        &self.elements[idx].0
    }

    pub fn kraus(&self, idx: usize) -> &ComplexMatrix<T> {
        &self.elements[idx].1
    }

    /// `‖Σ_m K†K − 1‖`
    pub fn completeness_defect(&self) -> T {
        completeness_defect(self.elements.iter().map(|(_, k)| k))
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.elements.iter().all(|(_, k)| k.is_hermitian(tol))
    }

    /// `𝒦[ρ] = Σ_m K_m ρ K_m†`; panics on dimension mismatch.
    pub fn total_map(&self, rho: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        self.elements
            .iter()
            .fold(ComplexMatrix::zeros(rho.dim()), |acc, (_, k)| &acc + &k.sandwich(rho))
    }

    /// `𝒦†[Q] = Σ_m K_m† Q K_m`; panics on dimension mismatch.
    pub fn total_adjoint(&self, q: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        self.elements.iter().fold(ComplexMatrix::zeros(q.dim()), |acc, (_, k)| {
            &acc + &k.adjoint_sandwich(q)
        })
    }
}

/// Markovian process probed at `n` times (initial state, `n − 1` maps,
/// `n` instruments).
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovProcess<T> {
    initial: DensityMatrix<T>,
    dynamics: Vec<KrausSet<T>>,
    instruments: Vec<Instrument<T>>,
}

impl<T: Real> MarkovProcess<T> {
    pub fn new(initial: DensityMatrix<T>, dynamics: Vec<KrausSet<T>>, instruments: Vec<Instrument<T>>) -> Result<Self> {
        if instruments.is_empty() {
            return Err(Error::Empty("instruments"));
        }
        if dynamics.len() + 1 != instruments.len() {
            return Err(Error::LengthMismatch {
                instruments: instruments.len(),
                dynamics: dynamics.len(),
            });
        }
        let dim = initial.dim();
        for (t, j) in instruments.iter().enumerate() {
            if j.dim() != dim {
                return Err(mismatch(format!("instrument at time {}", t + 1), dim, j.dim()));
            }
        }
        for (t, l) in dynamics.iter().enumerate() {
            if l.dim() != dim {
                return Err(mismatch(format!("dynamics {}→{}", t + 1, t + 2), dim, l.dim()));
            }
        }
        Ok(Self {
            initial,
            dynamics,
            instruments,
        })
    }

    pub fn dim(&self) -> usize {
        self.initial.dim()
    }

    /// Number of probing times `n`.
    pub fn n_times(&self) -> usize {
        self.instruments.len()
    }

    pub fn initial(&self) -> &DensityMatrix<T> {
        &self.initial
    }

    pub fn dynamics(&self) -> &[KrausSet<T>] {
        &self.dynamics
    }

    pub fn instruments(&self) -> &[Instrument<T>] {
        &self.instruments
    }

    /// Instrument `𝒥_t`, `t` in `1..=n`.
    pub fn instrument(&self, t: usize) -> &Instrument<T> {
        &self.instruments[t - 1]
    }

    /// Map `Λ_{t+1:t}` applied after the measurement at time `t`, `t` in `1..n`.
    pub fn map_after(&self, t: usize) -> &KrausSet<T> {
        &self.dynamics[t - 1]
    }

    pub fn check_time(&self, t: usize) -> Result<()> {
        if t == 0 || t > self.n_times() {
            return Err(Error::InvalidTime {
                time: t,
                n: self.n_times(),
            });
        }
        Ok(())
    }

    /// Same dynamics and instruments with a different initial state.
    pub fn with_initial(&self, initial: DensityMatrix<T>) -> Result<Self> {
        Self::new(initial, self.dynamics.clone(), self.instruments.clone())
    }

    /// The process restricted to its first `k` times.
    pub fn truncated(&self, k: usize) -> Result<Self> {
        if k == 0 || k > self.n_times() {
            return Err(Error::InvalidTime {
                time: k,
                n: self.n_times(),
            });
        }
        Self::new(
            self.initial.clone(),
            self.dynamics[..k - 1].to_vec(),
            self.instruments[..k].to_vec(),
        )
    }
}

/// Outcomes recorded at strictly increasing (1-based) times.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OutcomeSequence {
    entries: Vec<(usize, String)>,
}

impl OutcomeSequence {
    pub fn new(entries: Vec<(usize, String)>) -> Result<Self> {
        if entries.iter().any(|(t, _)| *t == 0) {
            return Err(Error::InvalidSequence("times are 1-based".into()));
        }
        if entries.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::InvalidSequence("times must be strictly increasing".into()));
        }
        Ok(Self { entries })
    }

    /// Consecutive times starting at `first`.
    pub fn from_labels<S: AsRef<str>>(first: usize, labels: &[S]) -> Result<Self> {
        Self::new(
            labels
                .iter()
                .enumerate()
                .map(|(k, l)| (first + k, l.as_ref().to_string()))
                .collect(),
        )
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn entries(&self) -> &[(usize, String)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn times(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|(t, _)| *t)
    }

    pub fn labels(&self) -> Vec<String> {
        self.entries.iter().map(|(_, l)| l.clone()).collect()
    }

    /// Outcome indices, checking that the sequence covers exactly `times`.
    pub fn resolve<T: Real>(&self, p: &MarkovProcess<T>, times: std::ops::RangeInclusive<usize>) -> Result<Vec<usize>> {
        let expected: Vec<usize> = times.collect();
        let got: Vec<usize> = self.times().collect();
        if expected != got {
            return Err(Error::InvalidSequence(format!(
                "expected outcomes at times {expected:?}, got {got:?}"
            )));
        }
        self.entries
            .iter()
            .map(|(t, label)| {
                p.check_time(*t)?;
                p.instrument(*t).index_of(label).ok_or_else(|| Error::UnknownOutcome {
                    time: *t,
                    label: label.clone(),
                })
            })
            .collect()
    }
}

/// Which component of a process violates which requirement.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub component: Component,
    pub kind: ViolationKind,
    /// Size of the defect (norm, eigenvalue or trace deviation).
    pub magnitude: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    InitialState,
    /// `Λ_{t+1:t}`, identified by the earlier time `t`.
    Dynamics(usize),
    Instrument(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    NotTracePreserving,
    IncompleteInstrument,
    NotHermitian,
    NotPositive,
    BadTrace,
    NonFinite,
}

impl std::fmt::Display for Component {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Component::InitialState => write!(f, "initial state"),
            Component::Dynamics(t) => write!(f, "dynamics {}→{}", t, t + 1),
            Component::Instrument(t) => write!(f, "instrument at time {t}"),
        }
    }
}

impl std::fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ViolationKind::NotTracePreserving => "Σ L†L ≠ 1 (not trace preserving)",
            ViolationKind::IncompleteInstrument => "Σ K†K ≠ 1 (instrument incomplete)",
            ViolationKind::NotHermitian => "not Hermitian",
            ViolationKind::NotPositive => "not positive semi-definite",
            ViolationKind::BadTrace => "trace ≠ 1",
            ViolationKind::NonFinite => "non-finite entries",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    /// Per time: whether every Kraus operator of `𝒥_t` is Hermitian.
    pub hermitian_instruments: Vec<bool>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn all_hermitian(&self) -> bool {
        self.hermitian_instruments.iter().all(|&h| h)
    }
}

/// Checks the numerical requirements the engine relies on and reports
/// every violation found.
pub fn validate_process<T: Real>(p: &MarkovProcess<T>, eps: T) -> ValidationReport {
    let mut violations = Vec::new();
    let mut push = |component, kind, magnitude: T| {
        violations.push(Violation {
            component,
            kind,
            magnitude: magnitude.to_f64().unwrap_or(f64::NAN),
        })
    };

    let rho = p.initial.matrix();
    if !rho.is_finite() {
        push(Component::InitialState, ViolationKind::NonFinite, T::infinity());
    } else {
        let defect = rho.hermitian_defect();
        if defect > eps {
            push(Component::InitialState, ViolationKind::NotHermitian, defect);
        } else if let Ok(pairs) = hermitian_eigenpairs(rho) {
            let min = pairs.values.last().copied().unwrap_or_else(T::zero);
            if min < -eps {
                push(Component::InitialState, ViolationKind::NotPositive, min);
            }
        }
        let tr = rho.trace();
        if (tr.re - T::one()).abs() > eps || tr.im.abs() > eps {
            push(
                Component::InitialState,
                ViolationKind::BadTrace,
                (tr - Complex::new(T::one(), T::zero())).norm(),
            );
        }
    }

    for (k, l) in p.dynamics.iter().enumerate() {
        if l.ops.iter().any(|m| !m.is_finite()) {
            push(Component::Dynamics(k + 1), ViolationKind::NonFinite, T::infinity());
            continue;
        }
        let defect = l.completeness_defect();
        if defect > eps {
            push(Component::Dynamics(k + 1), ViolationKind::NotTracePreserving, defect);
        }
    }

    let mut hermitian_instruments = Vec::with_capacity(p.n_times());
    for (k, j) in p.instruments.iter().enumerate() {
        if j.elements.iter().any(|(_, m)| !m.is_finite()) {
            push(Component::Instrument(k + 1), ViolationKind::NonFinite, T::infinity());
            hermitian_instruments.push(false);
            continue;
        }
        let defect = j.completeness_defect();
        if defect > eps {
            push(
                Component::Instrument(k + 1),
                ViolationKind::IncompleteInstrument,
                defect,
            );
        }
        hermitian_instruments.push(j.is_hermitian(eps));
    }

    ValidationReport {
        violations,
        hermitian_instruments,
    }
}

pub fn apply_map<T: Real>(map: &KrausSet<T>, rho: &DensityMatrix<T>) -> Result<DensityMatrix<T>> {
    if map.dim() != rho.dim() {
        return Err(mismatch("apply_map", map.dim(), rho.dim()));
    }
    Ok(DensityMatrix {
        mat: map.apply(rho.matrix()),
        normalized: rho.normalized,
    })
}

pub fn apply_adjoint_map<T: Real>(map: &KrausSet<T>, q: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    if map.dim() != q.dim() {
        return Err(mismatch("apply_adjoint_map", map.dim(), q.dim()));
    }
    Ok(map.apply_adjoint(q))
}

pub fn instrument_total_adjoint<T: Real>(instrument: &Instrument<T>, q: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    if instrument.dim() != q.dim() {
        return Err(mismatch("instrument_total_adjoint", instrument.dim(), q.dim()));
    }
    Ok(instrument.total_adjoint(q))
}
