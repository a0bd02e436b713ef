//! Built-in processes reproducing the worked examples, with their expected
//! verdicts.

use std::fmt;
use std::str::FromStr;

use qkolmo_core::classicality::{analyze, AnalysisConfig, Verdict};
use qkolmo_core::opmat::{basis_ket, named, ComplexMatrix, Ket};
use qkolmo_core::{cplx, Criterion, DensityMatrix, Instrument, KrausSet, MarkovProcess, Report};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScenarioId {
    LuedersEx1,
    WeakCommEx2,
    AbsCommEx3,
    InclusionEx4,
    SkippingEx5,
    NcgdEx6,
}

impl ScenarioId {
    pub const ALL: [ScenarioId; 6] = [
        ScenarioId::LuedersEx1,
        ScenarioId::WeakCommEx2,
        ScenarioId::AbsCommEx3,
        ScenarioId::InclusionEx4,
        ScenarioId::SkippingEx5,
        ScenarioId::NcgdEx6,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioId::LuedersEx1 => "lueders-ex1",
            ScenarioId::WeakCommEx2 => "weak-comm-ex2",
            ScenarioId::AbsCommEx3 => "abs-comm-ex3",
            ScenarioId::InclusionEx4 => "inclusion-ex4",
            ScenarioId::SkippingEx5 => "skipping-ex5",
            ScenarioId::NcgdEx6 => "ncgd-ex6",
        }
    }

    pub fn summary(self) -> &'static str {
        match self {
            ScenarioId::LuedersEx1 => {
                "non-Hermitian qutrit instrument: invariant effects without commuting Kraus operators"
            }
            ScenarioId::WeakCommEx2 => "weak commutativity holds, Kolmogorov consistency fails",
            ScenarioId::AbsCommEx3 => "Kolmogorov consistency holds, absolute commutativity fails",
            ScenarioId::InclusionEx4 => "z, x, z measurements with Hadamard dynamics: everything holds",
            ScenarioId::SkippingEx5 => "4-level coarse measurements: invasiveness detected only two steps later",
            ScenarioId::NcgdEx6 => "NCGD dynamics in the computational basis without inclusion or commutativity",
        }
    }

    /// File name of the shipped process file.
    pub fn file_name(self) -> String {
        format!("{}.json", self.name())
    }
}

impl fmt::Display for ScenarioId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error(
    "unknown scenario '{0}' (known: lueders-ex1, weak-comm-ex2, abs-comm-ex3, inclusion-ex4, skipping-ex5, ncgd-ex6)"
)]
pub struct UnknownScenario(pub String);

impl FromStr for ScenarioId {
    type Err = UnknownScenario;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ScenarioId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| UnknownScenario(s.to_string()))
    }
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub id: ScenarioId,
    pub process: MarkovProcess<f64>,
    pub fixed_basis: Option<Vec<Ket<f64>>>,
    /// Expected verdict of every criterion under the default configuration.
    pub expected: Vec<(Criterion, Verdict)>,
}

impl Scenario {
    pub fn config(&self) -> AnalysisConfig<f64> {
        AnalysisConfig {
            fixed_basis: self.fixed_basis.clone(),
            ..AnalysisConfig::default()
        }
    }

    pub fn expected(&self, c: Criterion) -> Verdict {
        self.expected
            .iter()
            .find(|(k, _)| *k == c)
            .map(|(_, v)| *v)
            .expect("every criterion has an expectation")
    }
}

fn z_labelled(dim: usize, labels: &[&str]) -> Instrument<f64> {
    Instrument::new(
        labels
            .iter()
            .enumerate()
            .map(|(k, l)| (l.to_string(), named::proj(dim, k)))
            .collect(),
    )
    .expect("distinct labels")
}

fn x_instrument() -> Instrument<f64> {
    Instrument::new(vec![("+".into(), named::plus()), ("-".into(), named::minus())]).expect("distinct labels")
}

/// The five Kraus operators of the non-Hermitian qutrit instrument.
pub fn ex1_kraus() -> Vec<ComplexMatrix<f64>> {
    let s2 = 2f64.sqrt();
    let s10 = 10f64.sqrt();
    vec![
        ComplexMatrix::from_real(3, &[s2, 0., -1., 0., 0., 0., 0., 0., 0.]).scale_real(0.5),
        ComplexMatrix::from_real(3, &[0., 0., 0., 0., -s10, 2. * s10, 0., 0., 0.]).scale_real(0.1),
        ComplexMatrix::from_real(3, &[0., 0., 0., 0., s2, 0., 0., 0., 0.]).scale_real(0.5),
        ComplexMatrix::from_real(3, &[0., 0., 0., 0., 4. * s10, 2. * s10, 0., 0., 0.]).scale_real(0.05),
        ComplexMatrix::from_real(3, &[s2, 0., 1., 0., 0., 0., 0., 0., 0.]).scale_real(0.5),
    ]
}

/// `Q⁽¹⁾ = diag(1, 0, ½)` and `Q⁽²⁾ = diag(0, 1, ½)`.
pub fn ex1_effects() -> [ComplexMatrix<f64>; 2] {
    [
        ComplexMatrix::diag(&[1.0, 0.0, 0.5]),
        ComplexMatrix::diag(&[0.0, 1.0, 0.5]),
    ]
}

/// Measures the qutrit instrument, then the effects `Q⁽¹⁾, Q⁽²⁾` through
/// their Lüders instrument `{√Q⁽ᵇ⁾}`.
fn lueders_ex1() -> MarkovProcess<f64> {
    let j1 = Instrument::new(
        ex1_kraus()
            .into_iter()
            .enumerate()
            .map(|(a, k)| ((a + 1).to_string(), k))
            .collect(),
    )
    .expect("distinct labels");
    let h = 0.5f64.sqrt();
    let j2 = Instrument::new(vec![
        ("1".into(), ComplexMatrix::diag(&[1.0, 0.0, h])),
        ("2".into(), ComplexMatrix::diag(&[0.0, 1.0, h])),
    ])
    .expect("distinct labels");
    MarkovProcess::new(
        DensityMatrix::maximally_mixed(3),
        vec![KrausSet::identity(3)],
        vec![j1, j2],
    )
    .expect("consistent")
}

fn two_step(initial: DensityMatrix<f64>) -> MarkovProcess<f64> {
    MarkovProcess::new(
        initial,
        vec![KrausSet::identity(2)],
        vec![x_instrument(), z_labelled(2, &["+", "-"])],
    )
    .expect("consistent")
}

fn inclusion_ex4() -> MarkovProcess<f64> {
    let h = KrausSet::unitary(named::hadamard());
    let z = z_labelled(2, &["0", "1"]);
    MarkovProcess::new(
        DensityMatrix::pure(&basis_ket(2, 0)).expect("unit vector"),
        vec![h.clone(), h],
        vec![z.clone(), x_instrument(), z],
    )
    .expect("consistent")
}

/// `Π₁₂`, `Π₃₄` on four levels; level `k` is basis index `k − 1`.
pub fn ex5_instrument() -> Instrument<f64> {
    let pi = |a: usize, b: usize| &named::proj(4, a) + &named::proj(4, b);
    Instrument::new(vec![("1".into(), pi(0, 1)), ("2".into(), pi(2, 3))]).expect("distinct labels")
}

pub fn ex5_dynamics() -> [KrausSet<f64>; 2] {
    let e = |i: usize, j: usize| ComplexMatrix::outer(&basis_ket(4, i - 1), &basis_ket(4, j - 1));
    let l21 = KrausSet::new(vec![&e(1, 1) + &e(2, 4), &e(2, 2) + &e(4, 3)]).expect("non-empty");
    let l32 = KrausSet::new(vec![
        (&e(3, 1) + &e(3, 2)).scale_real(0.5f64.sqrt()),
        &(&(&e(1, 1) - &e(1, 2)) - &(&e(2, 1) - &e(2, 2))).scale_real(0.5) + &(&e(3, 3) + &e(4, 4)),
    ])
    .expect("non-empty");
    [l21, l32]
}

/// Three-time 4-level process from an initial state with `ρ₁₄ ≠ 0`.
pub fn skipping_ex5_from(initial: DensityMatrix<f64>) -> MarkovProcess<f64> {
    let j = ex5_instrument();
    MarkovProcess::new(initial, ex5_dynamics().to_vec(), vec![j.clone(), j.clone(), j]).expect("consistent")
}

/// Fixed initial state for the built-in scenario: `|ψ⟩ = (|1⟩+|2⟩+|3⟩+|4⟩)/2`,
/// so `ρ₁₄ = ¼`.
fn skipping_ex5() -> MarkovProcess<f64> {
    skipping_ex5_from(DensityMatrix::pure(&[cplx(0.5, 0.0); 4]).expect("unit vector"))
}

pub fn ex6_rotation() -> ComplexMatrix<f64> {
    ComplexMatrix::from_rows(vec![
        vec![cplx(1.0, 0.0), cplx(1.0, 0.0)],
        vec![cplx(0.0, 1.0), cplx(0.0, -1.0)],
    ])
    .expect("square")
    .scale_real(0.5f64.sqrt())
}

fn ncgd_ex6() -> MarkovProcess<f64> {
    let z = z_labelled(2, &["0", "1"]);
    MarkovProcess::new(
        DensityMatrix::maximally_mixed(2),
        vec![KrausSet::unitary(ex6_rotation()), KrausSet::unitary(named::hadamard())],
        vec![z.clone(), z.clone(), z],
    )
    .expect("consistent")
}

pub fn scenario(id: ScenarioId) -> Scenario {
    use Criterion::*;
    use Verdict::{Fail, NotApplicable as NA, Pass};
    let (process, fixed_basis, table) = match id {
        ScenarioId::LuedersEx1 => (lueders_ex1(), None, [Pass, Fail, Pass, Fail, Pass, NA]),
        ScenarioId::WeakCommEx2 => (
            two_step(DensityMatrix::pure(&basis_ket(2, 0)).expect("unit vector")),
            None,
            [Fail, Fail, Pass, Fail, Pass, NA],
        ),
        ScenarioId::AbsCommEx3 => {
            let s = 0.5f64.sqrt();
            let plus_i = [cplx(s, 0.0), cplx(0.0, s)];
            (
                two_step(DensityMatrix::pure(&plus_i).expect("unit vector")),
                None,
                [Pass, Fail, Fail, Fail, Pass, NA],
            )
        }
        ScenarioId::InclusionEx4 => (inclusion_ex4(), None, [Pass, Pass, Pass, Pass, Pass, NA]),
        ScenarioId::SkippingEx5 => (skipping_ex5(), None, [Fail, Fail, Pass, Fail, Fail, NA]),
        ScenarioId::NcgdEx6 => (
            ncgd_ex6(),
            Some((0..2).map(|k| basis_ket(2, k)).collect()),
            [Pass, Fail, Fail, Fail, Fail, Pass],
        ),
    };
    let criteria = [Kolmogorov, Commutators, Weak, Absolute, Inclusion, Ncgd];
    Scenario {
        id,
        process,
        fixed_basis,
        expected: criteria.into_iter().zip(table).collect(),
    }
}

pub fn run_scenario(id: ScenarioId) -> Report {
    let s = scenario(id);
    analyze(&s.process, &s.config()).expect("built-in scenarios are well formed")
}
