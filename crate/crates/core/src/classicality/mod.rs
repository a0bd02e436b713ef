//! Classicality diagnostics for Markovian multi-time processes.
//!
//! Each check evaluates a residual per context (time, history, outcome,
//! future) and passes iff the largest residual is below `ε`. [`analyze`]
//! runs every check and audits the implications between them.

mod audit;
mod checks;
mod inclusion;
mod lueders;
mod ncgd;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::scalar::Real;

pub use audit::{analyze, AnalysisConfig, AuditEntry, AuditStatus, ClassicalityReport, LuedersRecord, ReportMetadata};
pub use checks::{check_absolute_commutativity, check_commutators, check_kolmogorov, check_weak_commutativity};
pub use inclusion::{check_inclusion, check_inclusion_all, compute_f, compute_h, default_initial_set};
pub use lueders::{check_lueders_fixed_point, LuedersResult};
pub use ncgd::{check_ncgd, dephasing_instrument, fixed_basis_map, infer_fixed_basis};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    Kolmogorov,
    Commutators,
    Weak,
    Absolute,
    Inclusion,
    Ncgd,
}

impl Criterion {
    pub const ALL: [Criterion; 6] = [
        Criterion::Kolmogorov,
        Criterion::Commutators,
        Criterion::Weak,
        Criterion::Absolute,
        Criterion::Inclusion,
        Criterion::Ncgd,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Criterion::Kolmogorov => "kolmogorov",
            Criterion::Commutators => "commutators",
            Criterion::Weak => "weak",
            Criterion::Absolute => "absolute",
            Criterion::Inclusion => "inclusion",
            Criterion::Ncgd => "ncgd",
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Criterion {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Criterion::ALL
            .into_iter()
            .find(|c| c.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                let names: Vec<_> = Criterion::ALL.iter().map(|c| c.as_str()).collect();
                format!("unknown criterion '{s}' (expected one of {})", names.join(", "))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    NotApplicable,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::NotApplicable => "N/A",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FlagKind {
    /// `tr ρ̃ < ε`; the context's residual is defined as 0.
    UnreachableContext,
    /// `Q_i` vanishes; ignored when building `𝔽_i`.
    VanishingFuture,
    /// Some `Q_i` has a repeated eigenvalue.
    DegenerateQ,
    NonHermitianKraus,
    /// NCGD pair never reached with enough weight to be seen by the
    /// consistency conditions.
    UnreachablePair,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Flag {
    pub kind: FlagKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time: Option<usize>,
    pub note: String,
}

/// Residual of one check in one context.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContextRecord<T> {
    pub time: usize,
    /// Outcome labels at times `1..i` (for NCGD: the outcome at `i − 1`).
    pub history: Vec<String>,
    /// Outcome at time `i`, when the residual depends on it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outcome: Option<String>,
    /// Outcome labels at times `i+1..=n` (for NCGD: the outcome at `i + 1`).
    pub future: Vec<String>,
    pub residual: T,
    /// Kolmogorov: `tr[ρ̃ (𝒦†[Q] − Q)]` before taking the magnitude.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub signed: Option<T>,
    /// Kolmogorov: `Σ_m tr(ρ̃ K†[K, Q])`, evaluated independently.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub commutator_form: Option<T>,
    /// Kolmogorov: marginal with `t_i` measured minus distribution with `t_i` skipped.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub operational: Option<T>,
    /// NCGD: population with the dephasing inserted.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lhs: Option<T>,
    /// NCGD: population without the dephasing.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rhs: Option<T>,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub unreachable: bool,
}

impl<T: Real> ContextRecord<T> {
    pub(crate) fn new(
        time: usize,
        history: Vec<String>,
        outcome: Option<String>,
        future: Vec<String>,
        residual: T,
    ) -> Self {
        Self {
            time,
            history,
            outcome,
            future,
            residual,
            signed: None,
            commutator_form: None,
            operational: None,
            lhs: None,
            rhs: None,
            unreachable: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult<T> {
    pub criterion: Criterion,
    pub eps: T,
    pub verdict: Verdict,
    pub max_residual: T,
    pub records: Vec<ContextRecord<T>>,
    pub flags: Vec<Flag>,
    /// Kolmogorov: largest gap between the algebraic and operational residuals.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cross_check_defect: Option<T>,
    /// Why the check does not apply.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl<T: Real> CheckResult<T> {
    pub(crate) fn from_records(criterion: Criterion, eps: T, records: Vec<ContextRecord<T>>, flags: Vec<Flag>) -> Self {
        let max_residual = records.iter().fold(T::zero(), |m, r| m.max(r.residual));
        Self {
            criterion,
            eps,
            verdict: if max_residual < eps {
                Verdict::Pass
            } else {
                Verdict::Fail
            },
            max_residual,
            records,
            flags,
            cross_check_defect: None,
            reason: None,
        }
    }

    pub(crate) fn not_applicable(criterion: Criterion, eps: T, reason: String) -> Self {
        Self {
            criterion,
            eps,
            verdict: Verdict::NotApplicable,
            max_residual: T::zero(),
            records: Vec::new(),
            flags: Vec::new(),
            cross_check_defect: None,
            reason: Some(reason),
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn failed(&self) -> bool {
        self.verdict == Verdict::Fail
    }

    pub fn records_at(&self, time: usize) -> impl Iterator<Item = &ContextRecord<T>> {
        self.records.iter().filter(move |r| r.time == time)
    }

    /// Largest residual among the records at `time` (0 if there are none).
    pub fn max_at(&self, time: usize) -> T {
        self.records_at(time).fold(T::zero(), |m, r| m.max(r.residual))
    }

    pub fn passed_at(&self, time: usize) -> bool {
        self.max_at(time) < self.eps
    }

    pub fn has_flag(&self, kind: FlagKind) -> bool {
        self.flags.iter().any(|f| f.kind == kind)
    }
}
