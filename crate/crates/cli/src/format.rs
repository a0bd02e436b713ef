//! JSON process-file format.
//!
//! Complex entries are either a plain number or a `[re, im]` pair; matrices
//! are row-major nested arrays, a named shorthand, or `{"scale": s, "matrix": m}`.
//! See `scenarios/SCHEMA.md` for the full description.

use std::fmt;

use indexmap::IndexMap;
use num_complex::Complex64;
use qkolmo_core::opmat::{basis_ket, named, paulis, ComplexMatrix, Ket};
use qkolmo_core::{DensityMatrix, Instrument, KrausSet, MarkovProcess};
use serde::{Deserialize, Serialize};

/// A complex number: `0.5` or `[0.5, -1.0]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

impl Entry {
    pub fn value(self) -> Complex64 {
        match self {
            Entry::Real(re) => Complex64::new(re, 0.0),
            Entry::Complex([re, im]) => Complex64::new(re, im),
        }
    }

    fn from_value(z: Complex64) -> Self {
        if z.im == 0.0 {
            Entry::Real(z.re)
        } else {
            Entry::Complex([z.re, z.im])
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixSpec {
    Named(String),
    Dense(Vec<Vec<Entry>>),
    Scaled { scale: Entry, matrix: Box<MatrixSpec> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateSpec {
    /// `"ket0"`, `"plus"`, `"maximally_mixed"`, …
    Named(String),
    Pure {
        pure: Vec<Entry>,
    },
    Density {
        density: MatrixSpec,
    },
}

/// An instrument outcome: one Kraus operator. The `{"kraus": [...]}` form
/// exists only so that multi-Kraus elements get a clear diagnostic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OutcomeSpec {
    Single(MatrixSpec),
    Multi { kraus: Vec<MatrixSpec> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub kraus: Vec<MatrixSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstrumentSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub outcomes: IndexMap<String, OutcomeSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BasisSpec {
    /// Only `"computational"` is recognised.
    Named(String),
    Vectors(Vec<Vec<Entry>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProcessFile {
    pub dimension: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub initial_state: StateSpec,
    #[serde(default)]
    pub dynamics: Vec<DynamicsSpec>,
    pub instruments: Vec<InstrumentSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_set: Option<Vec<StateSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_basis: Option<BasisSpec>,
}

/// A parsed and validated process file.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedProcess {
    pub process: MarkovProcess<f64>,
    pub initial_set: Option<Vec<DensityMatrix<f64>>>,
    pub fixed_basis: Option<Vec<Ket<f64>>>,
    pub description: Option<String>,
}

/// One problem found in a process file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    /// Which matrix, e.g. `instruments[1] 'x' outcome '+'`.
    pub location: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("invalid process ({} problem(s)):\n{}", .0.len(), .0.iter().map(|d| format!("  - {d}")).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<Diagnostic>),
}

/// Matrix shorthands. `proj<k>` is `|k⟩⟨k|`; the qubit names are the usual
/// gates, Paulis and `|±⟩`, `|±i⟩` projectors.
pub fn named_matrix(name: &str, dim: usize) -> Result<ComplexMatrix<f64>, String> {
    let qubit = |m: ComplexMatrix<f64>| {
        if dim == 2 {
            Ok(m)
        } else {
            Err(format!("'{name}' is a qubit shorthand but the dimension is {dim}"))
        }
    };
    let [x, y, z] = paulis::<f64>();
    match name {
        "identity" => Ok(ComplexMatrix::identity(dim)),
        "zero" => Ok(ComplexMatrix::zeros(dim)),
        "hadamard" => qubit(named::hadamard()),
        "x" | "pauli_x" => qubit(x),
        "y" | "pauli_y" => qubit(y),
        "z" | "pauli_z" => qubit(z),
        "plus" => qubit(named::plus()),
        "minus" => qubit(named::minus()),
        "plus_i" => qubit(named::plus_i()),
        "minus_i" => qubit(named::minus_i()),
        _ => match name.strip_prefix("proj").map(str::parse::<usize>) {
            Some(Ok(k)) if k < dim => Ok(named::proj(dim, k)),
            Some(Ok(k)) => Err(format!("'{name}' needs dimension > {k}, found {dim}")),
            _ => Err(format!("unknown matrix shorthand '{name}'")),
        },
    }
}

fn named_state(name: &str, dim: usize) -> Result<ComplexMatrix<f64>, String> {
    if name == "maximally_mixed" {
        return Ok(ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64));
    }
    if let Some(k) = name.strip_prefix("ket").and_then(|s| s.parse::<usize>().ok()) {
        return if k < dim {
            Ok(named::proj(dim, k))
        } else {
            Err(format!("'{name}' needs dimension > {k}, found {dim}"))
        };
    }
    match name {
        "plus" | "minus" | "plus_i" | "minus_i" => named_matrix(name, dim),
        _ => Err(format!("unknown state shorthand '{name}'")),
    }
}

fn dense(rows: &[Vec<Entry>], dim: usize) -> Result<ComplexMatrix<f64>, String> {
    if rows.len() != dim {
        return Err(format!("expected {dim}×{dim} matrix, found {} rows", rows.len()));
    }
    if let Some((r, row)) = rows.iter().enumerate().find(|(_, row)| row.len() != dim) {
        return Err(format!(
            "expected {dim}×{dim} matrix, row {r} has {} entries",
            row.len()
        ));
    }
    let m = ComplexMatrix::from_fn(dim, |i, j| rows[i][j].value());
    if !m.is_finite() {
        return Err("non-finite entry".into());
    }
    Ok(m)
}

fn build_matrix(spec: &MatrixSpec, dim: usize) -> Result<ComplexMatrix<f64>, String> {
    match spec {
        MatrixSpec::Named(name) => named_matrix(name, dim),
        MatrixSpec::Dense(rows) => dense(rows, dim),
        MatrixSpec::Scaled { scale, matrix } => {
            let s = scale.value();
            if !(s.re.is_finite() && s.im.is_finite()) {
                return Err("non-finite scale".into());
            }
            Ok(build_matrix(matrix, dim)?.scale(s))
        }
    }
}

fn build_ket(entries: &[Entry], dim: usize) -> Result<Ket<f64>, String> {
    if entries.len() != dim {
        return Err(format!("expected {dim} amplitudes, found {}", entries.len()));
    }
    let v: Ket<f64> = entries.iter().map(|e| e.value()).collect();
    if v.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err("non-finite amplitude".into());
    }
    Ok(v)
}

fn build_state(spec: &StateSpec, dim: usize, tol: f64) -> Result<DensityMatrix<f64>, String> {
    match spec {
        StateSpec::Named(name) => DensityMatrix::new(named_state(name, dim)?, tol).map_err(|e| e.to_string()),
        StateSpec::Pure { pure } => DensityMatrix::pure(&build_ket(pure, dim)?).map_err(|e| e.to_string()),
        StateSpec::Density { density } => {
            DensityMatrix::new(build_matrix(density, dim)?, tol).map_err(|e| e.to_string())
        }
    }
}

fn named_suffix(name: &Option<String>) -> String {
    name.as_ref().map(|n| format!(" '{n}'")).unwrap_or_default()
}

/// Parses and validates a process file. Every problem is reported, not just
/// the first one.
pub fn parse_process(text: &str, tol: f64) -> Result<ParsedProcess, ParseError> {
    let file: ProcessFile = serde_json::from_str(text)?;
    file.build(tol)
}

impl ProcessFile {
    pub fn build(&self, tol: f64) -> Result<ParsedProcess, ParseError> {
        let d = self.dimension;
        let mut diags = Vec::new();
        let mut diag = |location: String, message: String| diags.push(Diagnostic { location, message });
        if d == 0 {
            diag("dimension".into(), "must be positive".into());
            return Err(ParseError::Invalid(diags));
        }

        let initial = build_state(&self.initial_state, d, tol)
            .map_err(|e| diag("initial_state".into(), e))
            .ok();

        let mut dynamics = Vec::with_capacity(self.dynamics.len());
        for (k, spec) in self.dynamics.iter().enumerate() {
            let loc = format!("dynamics[{k}]{}", named_suffix(&spec.name));
            if spec.kraus.is_empty() {
                diag(loc, "no Kraus operators".into());
                continue;
            }
            let ops: Vec<_> = spec
                .kraus
                .iter()
                .enumerate()
                .filter_map(|(l, m)| {
                    build_matrix(m, d)
                        .map_err(|e| diag(format!("{loc} kraus[{l}]"), e))
                        .ok()
                })
                .collect();
            if ops.len() != spec.kraus.len() {
                continue;
            }
            let map = KrausSet::new(ops).expect("non-empty, same dimension");
            let defect = map.completeness_defect();
            if defect > tol {
                diag(loc, format!("Σ L†L ≠ 1 (not trace preserving, defect {defect:.3e})"));
                continue;
            }
            dynamics.push(map);
        }

        let mut instruments = Vec::with_capacity(self.instruments.len());
        for (k, spec) in self.instruments.iter().enumerate() {
            let loc = format!("instruments[{k}]{}", named_suffix(&spec.name));
            if spec.outcomes.is_empty() {
                diag(loc, "no outcomes".into());
                continue;
            }
            let mut elements = Vec::with_capacity(spec.outcomes.len());
            for (label, outcome) in &spec.outcomes {
                let oloc = format!("{loc} outcome '{label}'");
                let m = match outcome {
                    OutcomeSpec::Single(m) => m,
                    OutcomeSpec::Multi { kraus } if kraus.len() == 1 => &kraus[0],
                    OutcomeSpec::Multi { kraus } => {
                        diag(
                            oloc,
                            format!("{} Kraus operators; each outcome must have exactly one", kraus.len()),
                        );
                        continue;
                    }
                };
                match build_matrix(m, d) {
                    Ok(m) => elements.push((label.clone(), m)),
                    Err(e) => diag(oloc, e),
                }
            }
            if elements.len() != spec.outcomes.len() {
                continue;
            }
            let j = Instrument::new(elements).expect("labels are unique map keys");
            let defect = j.completeness_defect();
            if defect > tol {
                diag(loc, format!("Σ K†K ≠ 1 (instrument incomplete, defect {defect:.3e})"));
                continue;
            }
            instruments.push(j);
        }

        if self.instruments.is_empty() {
            diag("instruments".into(), "at least one instrument is required".into());
        } else if self.dynamics.len() + 1 != self.instruments.len() {
            diag(
                "dynamics".into(),
                format!(
                    "{} instrument(s) need exactly {} dynamical map(s), found {}",
                    self.instruments.len(),
                    self.instruments.len() - 1,
                    self.dynamics.len()
                ),
            );
        }

        let initial_set = self.initial_set.as_ref().map(|set| {
            set.iter()
                .enumerate()
                .filter_map(|(k, s)| {
                    build_state(s, d, tol)
                        .map_err(|e| diag(format!("initial_set[{k}]"), e))
                        .ok()
                })
                .collect::<Vec<_>>()
        });
        if matches!(&initial_set, Some(s) if s.is_empty()) {
            diag("initial_set".into(), "must not be empty".into());
        }

        let fixed_basis = match &self.fixed_basis {
            None => None,
            Some(BasisSpec::Named(name)) if name == "computational" => Some((0..d).map(|k| basis_ket(d, k)).collect()),
            Some(BasisSpec::Named(name)) => {
                diag("fixed_basis".into(), format!("unknown basis '{name}'"));
                None
            }
            Some(BasisSpec::Vectors(vs)) => {
                let kets: Vec<Ket<f64>> = vs
                    .iter()
                    .enumerate()
                    .filter_map(|(k, v)| build_ket(v, d).map_err(|e| diag(format!("fixed_basis[{k}]"), e)).ok())
                    .collect();
                if kets.len() != d {
                    diag(
                        "fixed_basis".into(),
                        format!("expected {d} vectors, found {}", vs.len()),
                    );
                }
                Some(kets)
            }
        };

        if !diags.is_empty() {
            return Err(ParseError::Invalid(diags));
        }
        let process = MarkovProcess::new(initial.expect("no diagnostics"), dynamics, instruments).map_err(|e| {
            ParseError::Invalid(vec![Diagnostic {
                location: "process".into(),
                message: e.to_string(),
            }])
        })?;
        Ok(ParsedProcess {
            process,
            initial_set,
            fixed_basis,
            description: self.description.clone(),
        })
    }

    /// Dense encoding of a process; parsing it back gives the same matrices.
    pub fn from_process(
        p: &MarkovProcess<f64>,
        initial_set: Option<&[DensityMatrix<f64>]>,
        fixed_basis: Option<&[Ket<f64>]>,
    ) -> Self {
        let state = |rho: &DensityMatrix<f64>| StateSpec::Density {
            density: encode_matrix(rho.matrix()),
        };
        Self {
            dimension: p.dim(),
            description: None,
            initial_state: state(p.initial()),
            dynamics: p
                .dynamics()
                .iter()
                .map(|l| DynamicsSpec {
                    name: None,
                    kraus: l.operators().iter().map(encode_matrix).collect(),
                })
                .collect(),
            instruments: p
                .instruments()
                .iter()
                .map(|j| InstrumentSpec {
                    name: None,
                    outcomes: j
                        .elements()
                        .iter()
                        .map(|(label, k)| (label.clone(), OutcomeSpec::Single(encode_matrix(k))))
                        .collect(),
                })
                .collect(),
            initial_set: initial_set.map(|s| s.iter().map(state).collect()),
            fixed_basis: fixed_basis.map(|b| {
                BasisSpec::Vectors(
                    b.iter()
                        .map(|v| v.iter().map(|&z| Entry::from_value(z)).collect())
                        .collect(),
                )
            }),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("process files always serialize")
    }
}

fn encode_matrix(m: &ComplexMatrix<f64>) -> MatrixSpec {
    MatrixSpec::Dense(
        m.rows()
            .map(|row| row.iter().map(|&z| Entry::from_value(z)).collect())
            .collect(),
    )
}
