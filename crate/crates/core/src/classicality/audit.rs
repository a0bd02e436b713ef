use serde::Serialize;

use super::checks::{
    absolute_from_tables, commutators_from_tables, kolmogorov_from_tables, kolmogorov_with_cross_check,
    weak_from_tables,
};
use super::inclusion::{check_inclusion_all, default_initial_set, future_projectors};
use super::lueders::{check_lueders_fixed_point, LuedersResult};
use super::ncgd::{check_ncgd, fixed_basis_map, infer_fixed_basis};
use super::{CheckResult, Criterion, Flag, FlagKind, Verdict};
use crate::error::Result;
use crate::opmat::{herm_eig, ComplexMatrix, Ket};
use crate::process::{DensityMatrix, MarkovProcess};
use crate::scalar::Real;
use crate::stats::{q_operator, ContextTables};
use crate::Tolerances;

#[derive(Debug, Clone)]
pub struct AnalysisConfig<T> {
    pub tol: Tolerances<T>,
    /// Criteria reported in [`ClassicalityReport::results`]; the audit
    /// always evaluates all of them.
    pub criteria: Vec<Criterion>,
    /// States spanning `ℍ_1`; defaults to [`default_initial_set`].
    pub initial_set: Option<Vec<DensityMatrix<T>>>,
    /// Basis for the NCGD check; inferred from the instruments when absent.
    pub fixed_basis: Option<Vec<Ket<T>>>,
    pub audit: bool,
}

impl<T: Real> Default for AnalysisConfig<T> {
    fn default() -> Self {
        Self {
            tol: Tolerances::default(),
            criteria: Criterion::ALL.to_vec(),
            initial_set: None,
            fixed_basis: None,
            audit: true,
        }
    }
}

impl<T: Real> AnalysisConfig<T> {
    pub fn with_eps(eps: T) -> Self {
        Self {
            tol: Tolerances::with_eps(eps),
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportMetadata<T> {
    pub dim: usize,
    pub n_times: usize,
    /// Outcome labels per time.
    pub outcomes: Vec<Vec<String>>,
    pub hermitian_instruments: Vec<bool>,
    pub eps: T,
    pub degeneracy_tol: T,
    pub rank_tol: T,
    pub initial_set_size: usize,
    /// `"declared"`, `"inferred"` or absent when no fixed basis applies.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fixed_basis: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LuedersRecord<T> {
    pub time: usize,
    pub future: Vec<String>,
    #[serde(flatten)]
    pub result: LuedersResult<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AuditStatus {
    Held,
    Violated,
    /// The rule's hypothesis is not met, so there is nothing to check.
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditEntry {
    pub rule: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time: Option<usize>,
    pub status: AuditStatus,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassicalityReport<T> {
    pub metadata: ReportMetadata<T>,
    pub results: Vec<CheckResult<T>>,
    pub lueders: Vec<LuedersRecord<T>>,
    pub audit: Vec<AuditEntry>,
}

impl<T: Real> ClassicalityReport<T> {
    pub fn result(&self, c: Criterion) -> Option<&CheckResult<T>> {
        self.results.iter().find(|r| r.criterion == c)
    }

    pub fn audit_violations(&self) -> impl Iterator<Item = &AuditEntry> {
        self.audit.iter().filter(|e| e.status == AuditStatus::Violated)
    }

    pub fn audit_clean(&self) -> bool {
        self.audit_violations().next().is_none()
    }

    /// No selected check failed (not-applicable checks do not count).
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|r| !r.failed())
    }
}

/// Runs every check and audits the implications between them.
///
/// Errors only arise from a malformed configuration (initial states or a
/// fixed basis of the wrong dimension).
pub fn analyze<T: Real>(p: &MarkovProcess<T>, cfg: &AnalysisConfig<T>) -> Result<ClassicalityReport<T>> {
    let tol = cfg.tol;
    let eps = tol.eps;
    let tables = ContextTables::new(p);
    let initial_set = cfg.initial_set.clone().unwrap_or_else(|| default_initial_set(p.dim()));

    let kolmogorov = kolmogorov_with_cross_check(p, &tables, eps);
    let commutators = commutators_from_tables(p, &tables, eps);
    let weak = weak_from_tables(p, &tables, eps);
    let absolute = absolute_from_tables(p, &tables, eps);
    let inclusion = check_inclusion_all(p, &initial_set, &tol)?;

    let basis_tol = eps.max(T::default_tol());
    let (basis, basis_source) = match &cfg.fixed_basis {
        Some(b) => (Some(b.clone()), Some("declared")),
        None => match infer_fixed_basis(p, basis_tol) {
            Ok(b) => (Some(b), Some("inferred")),
            Err(_) => (None, None),
        },
    };
    let mut ncgd = match &basis {
        Some(b) => match check_ncgd(p, b, eps) {
            Ok(r) => r,
            Err(e) => CheckResult::not_applicable(Criterion::Ncgd, eps, e.to_string()),
        },
        None => CheckResult::not_applicable(
            Criterion::Ncgd,
            eps,
            "instruments are not rank-1 projective in a common basis".into(),
        ),
    };

    let mut lueders = Vec::new();
    for i in 1..=p.n_times() {
        for (f, q) in tables.futures(i) {
            let result = check_lueders_fixed_point(p.instrument(i), &q.hermitian_part(), eps)?;
            lueders.push(LuedersRecord {
                time: i,
                future: super::checks::labels(p, i + 1, f),
                result,
            });
        }
    }

    let mut audit = Vec::new();
    if cfg.audit {
        let ctx = AuditContext {
            p,
            tables: &tables,
            tol,
            slack: T::lit(8.0) * max_outcomes(p) * eps,
            kolmogorov: &kolmogorov,
            commutators: &commutators,
            weak: &weak,
            absolute: &absolute,
            inclusion: &inclusion,
        };
        ctx.cross_check(&mut audit);
        ctx.lattice(&mut audit);
        ctx.inclusion_rule(&initial_set, &mut audit);
        ctx.lueders(&lueders, &mut audit);
        if let (Some(b), Verdict::Pass | Verdict::Fail) = (&basis, ncgd.verdict) {
            ctx.ncgd(b, &mut ncgd, &mut audit);
        }
    }

    let ncgd_applicable = ncgd.verdict != Verdict::NotApplicable;
    let mut all = vec![kolmogorov, commutators, weak, absolute, inclusion, ncgd];
    let mut selected: Vec<Criterion> = cfg.criteria.clone();
    selected.sort();
    selected.dedup();
    all.retain(|r| selected.contains(&r.criterion));

    let metadata = ReportMetadata {
        dim: p.dim(),
        n_times: p.n_times(),
        outcomes: p
            .instruments()
            .iter()
            .map(|j| j.labels().map(str::to_string).collect())
            .collect(),
        hermitian_instruments: p.instruments().iter().map(|j| j.is_hermitian(eps)).collect(),
        eps,
        degeneracy_tol: tol.degeneracy,
        rank_tol: tol.rank,
        initial_set_size: initial_set.len(),
        fixed_basis: basis_source.filter(|_| ncgd_applicable).map(str::to_string),
    };

    Ok(ClassicalityReport {
        metadata,
        results: all,
        lueders,
        audit,
    })
}

fn max_outcomes<T: Real>(p: &MarkovProcess<T>) -> T {
    T::lit(p.instruments().iter().map(|j| j.len()).max().unwrap_or(1) as f64)
}

fn fmt<T: Real>(x: T) -> String {
    format!("{:.3e}", x.to_f64().unwrap_or(f64::NAN))
}

fn entry(rule: &str, time: Option<usize>, status: AuditStatus, note: impl Into<String>) -> AuditEntry {
    AuditEntry {
        rule: rule.to_string(),
        time,
        status,
        note: note.into(),
    }
}

fn bounded<T: Real>(rule: &str, time: usize, name: &str, value: T, bound: T) -> AuditEntry {
    let status = if value <= bound {
        AuditStatus::Held
    } else {
        AuditStatus::Violated
    };
    entry(
        rule,
        Some(time),
        status,
        format!("{name} = {} ≤ {}", fmt(value), fmt(bound)),
    )
}

struct AuditContext<'a, T: Real> {
    p: &'a MarkovProcess<T>,
    tables: &'a ContextTables<T>,
    tol: Tolerances<T>,
    slack: T,
    kolmogorov: &'a CheckResult<T>,
    commutators: &'a CheckResult<T>,
    weak: &'a CheckResult<T>,
    absolute: &'a CheckResult<T>,
    inclusion: &'a CheckResult<T>,
}

impl<T: Real> AuditContext<'_, T> {
    fn m(&self) -> T {
        max_outcomes(self.p)
    }

    /// `8·m·d·√(max(δ, ε) / min(gap, 1))`: how far from commuting a
    /// near-fixed point may be, given the residual `δ` and spectral gap.
    fn quadratic_bound(&self, delta: T, gap: T) -> T {
        let d = T::lit(self.p.dim() as f64);
        T::lit(8.0) * self.m() * d * (delta.max(self.tol.eps) / gap.min(T::one())).sqrt()
    }

    fn cross_check(&self, out: &mut Vec<AuditEntry>) {
        let rule = "kolmogorov algebraic = operational";
        let defect = self.kolmogorov.cross_check_defect.unwrap_or_else(T::zero);
        let form = self
            .kolmogorov
            .records
            .iter()
            .map(|r| (r.signed.unwrap_or_else(T::zero) + r.commutator_form.unwrap_or_else(T::zero)).abs())
            .fold(T::zero(), T::max);
        let worst = defect.max(form);
        let status = if worst <= self.slack {
            AuditStatus::Held
        } else {
            AuditStatus::Violated
        };
        out.push(entry(
            rule,
            None,
            status,
            format!(
                "operational defect {}, commutator-form defect {} (bound {})",
                fmt(defect),
                fmt(form),
                fmt(self.slack)
            ),
        ));
    }

    fn lattice(&self, out: &mut Vec<AuditEntry>) {
        let m = self.m();
        let two = T::lit(2.0);
        for i in 1..=self.p.n_times() {
            let comm = self.commutators.max_at(i);
            let abs = self.absolute.max_at(i);
            let kol = self.kolmogorov.max_at(i);
            let weak = self.weak.max_at(i);

            let rules: [(&str, bool, &str, &str, T, T); 4] = [
                (
                    "commutators ⇒ absolute",
                    self.commutators.passed_at(i),
                    "commutators",
                    "absolute",
                    abs,
                    comm + self.slack,
                ),
                (
                    "commutators ⇒ kolmogorov",
                    self.commutators.passed_at(i),
                    "commutators",
                    "kolmogorov",
                    kol,
                    m * comm + self.slack,
                ),
                (
                    "absolute ⇒ kolmogorov",
                    self.absolute.passed_at(i),
                    "absolute",
                    "kolmogorov",
                    kol,
                    m * (two * abs).sqrt() + self.slack,
                ),
                (
                    "absolute ⇒ weak",
                    self.absolute.passed_at(i),
                    "absolute",
                    "weak",
                    weak,
                    (two * abs).sqrt() + self.slack,
                ),
            ];
            for (rule, antecedent, aname, cname, value, bound) in rules {
                if antecedent {
                    out.push(bounded(rule, i, cname, value, bound));
                } else {
                    out.push(entry(
                        rule,
                        Some(i),
                        AuditStatus::Skipped,
                        format!("{aname} fails at t{i}"),
                    ));
                }
            }
        }
    }

    fn inclusion_rule(&self, initial_set: &[DensityMatrix<T>], out: &mut Vec<AuditEntry>) {
        let rule = "hermitian ∧ non-degenerate ∧ inclusion ∧ kolmogorov(S) ⇒ commutators";
        let eps = self.tol.eps;
        let mut over_set: Option<Vec<CheckResult<T>>> = None;
        for i in 1..self.p.n_times() {
            let skip = |note: String| entry(rule, Some(i), AuditStatus::Skipped, note);
            if !self.p.instrument(i).is_hermitian(eps) {
                out.push(skip(format!("non-Hermitian Kraus operators at t{i}")));
                continue;
            }
            let fp = match future_projectors(self.p, self.tables, i, self.tol.degeneracy, self.tol.rank) {
                Ok(fp) => fp,
                Err(e) => {
                    out.push(skip(e.to_string()));
                    continue;
                }
            };
            if fp.degenerate {
                out.push(skip(format!("degenerate Q at t{i}")));
                continue;
            }
            if !self.inclusion.passed_at(i) {
                out.push(skip(format!("𝔽 ⊄ ℍ at t{i}")));
                continue;
            }
            let runs = over_set.get_or_insert_with(|| {
                initial_set
                    .iter()
                    .filter_map(|rho| self.p.with_initial(rho.clone()).ok())
                    .map(|q| kolmogorov_from_tables(&q, &ContextTables::new(&q), eps))
                    .collect()
            });
            let delta = runs.iter().map(|r| r.max_at(i)).fold(T::zero(), T::max);
            if delta >= eps {
                out.push(skip(format!(
                    "kolmogorov fails at t{i} for some initial state in S (max {})",
                    fmt(delta)
                )));
                continue;
            }
            let bound = self.quadratic_bound(delta, fp.min_gap);
            let comm = self.commutators.max_at(i);
            out.push(bounded(rule, i, "commutators", comm, bound));
        }
    }

    fn lueders(&self, records: &[LuedersRecord<T>], out: &mut Vec<AuditEntry>) {
        let rule = "lueders: fixed point ⇔ commuting (Hermitian Kraus)";
        let eps = self.tol.eps;
        for i in 1..=self.p.n_times() {
            if !self.p.instrument(i).is_hermitian(eps) {
                out.push(entry(
                    rule,
                    Some(i),
                    AuditStatus::Skipped,
                    format!("non-Hermitian Kraus operators at t{i}"),
                ));
                continue;
            }
            let mut bad = 0;
            let mut total = 0;
            let mut fixed = 0;
            for (rec, (_, q)) in records.iter().filter(|r| r.time == i).zip(self.tables.futures(i)) {
                total += 1;
                let r = &rec.result;
                let comm = r.max_commutator();
                let mut ok = true;
                if r.commuting {
                    ok &= r.fixed_point_residual <= self.m() * comm + self.slack;
                }
                if r.fixed_point {
                    fixed += 1;
                    let gap = spectral_gap(q, self.tol.degeneracy);
                    ok &= comm <= self.quadratic_bound(r.fixed_point_residual, gap);
                }
                if !ok {
                    bad += 1;
                }
            }
            let status = if bad == 0 {
                AuditStatus::Held
            } else {
                AuditStatus::Violated
            };
            out.push(entry(
                rule,
                Some(i),
                status,
                format!("{total} future(s), {fixed} fixed point(s), {bad} inconsistent"),
            ));
        }
    }

    fn ncgd(&self, basis: &[Ket<T>], ncgd: &mut CheckResult<T>, out: &mut Vec<AuditEntry>) {
        let rule = "ncgd ⇔ kolmogorov (t2..t(n-1))";
        let eps = self.tol.eps;
        let maps = match fixed_basis_map(self.p, basis, eps.max(T::default_tol())) {
            Ok(m) => m,
            Err(_) => return,
        };
        let d = basis.len();
        let n = self.p.n_times();
        for i in 2..n {
            // NCGD residual r(a, b), in record order a-major.
            let r: Vec<T> = ncgd.records_at(i).map(|rec| rec.residual).collect();
            let mut reach = vec![T::zero(); d * d];
            let mut worst = T::zero();
            let kol: Vec<T> = self.kolmogorov.records_at(i).map(|rec| rec.residual).collect();
            let mut cursor = 0;
            for (h, rho) in self.tables.histories(i) {
                let a = maps[i - 2][*h.last().expect("i ≥ 2")];
                let w_h = rho.trace().re;
                for (f, _) in self.tables.futures(i) {
                    let b = maps[i][f[0]];
                    let q_next = q_operator(self.p, i + 1, &f[1..]);
                    let w_f = q_next.expectation(&basis[b], &basis[b]).re;
                    let weight = w_h * w_f;
                    reach[a * d + b] = reach[a * d + b].max(weight);
                    let predicted = weight * r[a * d + b];
                    let observed = kol[cursor];
                    let gap = if observed == T::zero() && w_h < eps {
                        T::zero()
                    } else {
                        (observed - predicted).abs()
                    };
                    worst = worst.max(gap);
                    cursor += 1;
                }
            }
            let mut unseen = 0;
            for a in 0..d {
                for b in 0..d {
                    let res = r[a * d + b];
                    if res >= eps && reach[a * d + b] * res < eps {
                        unseen += 1;
                        ncgd.flags.push(Flag {
                            kind: FlagKind::UnreachablePair,
                            time: Some(i),
                            note: format!("basis pair ({a}, {b}) violates NCGD but is never reached"),
                        });
                    }
                }
            }
            let agree = ncgd.passed_at(i) == self.kolmogorov.passed_at(i);
            let status = if worst <= self.slack && (agree || unseen > 0) {
                AuditStatus::Held
            } else {
                AuditStatus::Violated
            };
            out.push(entry(
                rule,
                Some(i),
                status,
                format!(
                    "weighted-identity defect {}, verdicts {}, {unseen} unreachable pair(s)",
                    fmt(worst),
                    if agree { "agree" } else { "differ" }
                ),
            ));
        }
    }
}

/// Smallest spacing between distinct eigenvalues (1 if there is only one).
fn spectral_gap<T: Real>(q: &ComplexMatrix<T>, degeneracy_tol: T) -> T {
    match herm_eig(&q.hermitian_part(), degeneracy_tol) {
        Ok(spec) => spec.eigenvalues.windows(2).map(|w| w[0] - w[1]).fold(T::one(), T::min),
        Err(_) => T::one(),
    }
}
