use crate::classicality::{CheckResult, ContextRecord, Criterion, Flag, FlagKind};
use crate::opmat::{abs_value, ComplexMatrix};
use crate::process::MarkovProcess;
use crate::scalar::Real;
use crate::stats::{full_distribution, marginalize, ContextTables};

pub(crate) fn labels<T: Real>(p: &MarkovProcess<T>, first: usize, idx: &[usize]) -> Vec<String> {
    idx.iter()
        .enumerate()
        .map(|(k, &m)| p.instrument(first + k).label(m).to_string())
        .collect()
}

fn unreachable_flags(counts: &[(usize, usize)]) -> Vec<Flag> {
    counts
        .iter()
        .filter(|(_, c)| *c > 0)
        .map(|&(time, c)| Flag {
            kind: FlagKind::UnreachableContext,
            time: Some(time),
            note: format!("{c} context(s) with tr ρ̃ < ε treated as satisfied"),
        })
        .collect()
}

/// Consistency residual `|tr[ρ̃_i (𝒦_i†[Q_i] − Q_i)]|` for every time and
/// every (history, future) context, cross-checked against the operational
/// comparison of the marginal with the distribution that skips `t_i`.
pub fn check_kolmogorov<T: Real>(p: &MarkovProcess<T>, eps: T) -> CheckResult<T> {
    kolmogorov_with_cross_check(p, &ContextTables::new(p), eps)
}

pub(crate) fn kolmogorov_with_cross_check<T: Real>(
    p: &MarkovProcess<T>,
    tables: &ContextTables<T>,
    eps: T,
) -> CheckResult<T> {
    let mut result = kolmogorov_from_tables(p, tables, eps);
    let defect = operational_cross_check(p, &mut result.records);
    result.cross_check_defect = Some(defect);
    result
}

pub(crate) fn kolmogorov_from_tables<T: Real>(
    p: &MarkovProcess<T>,
    tables: &ContextTables<T>,
    eps: T,
) -> CheckResult<T> {
    let mut records = Vec::new();
    let mut unreachable = Vec::new();
    for i in 1..=p.n_times() {
        let j = p.instrument(i);
        let per_future: Vec<_> = tables
            .futures(i)
            .iter()
            .map(|(f, q)| {
                let defect = &j.total_adjoint(q) - q;
                let comm_form = j.elements().iter().fold(ComplexMatrix::zeros(q.dim()), |acc, (_, k)| {
                    let c = &k.matmul(q) - &q.matmul(k);
                    &acc + &k.adjoint().matmul(&c)
                });
                (labels(p, i + 1, f), defect, comm_form)
            })
            .collect();
        let mut count = 0;
        for (h, rho) in tables.histories(i) {
            let reachable = rho.trace().re >= eps;
            if !reachable {
                count += 1;
            }
            let history = labels(p, 1, h);
            for (future, defect, comm_form) in &per_future {
                let signed = rho.trace_product(defect).re;
                let residual = if reachable { signed.abs() } else { T::zero() };
                let mut rec = ContextRecord::new(i, history.clone(), None, future.clone(), residual);
                rec.signed = Some(signed);
                rec.commutator_form = Some(rho.trace_product(comm_form).re);
                rec.unreachable = !reachable;
                records.push(rec);
            }
        }
        unreachable.push((i, count));
    }
    CheckResult::from_records(Criterion::Kolmogorov, eps, records, unreachable_flags(&unreachable))
}

/// Fills `operational` on every record and returns the largest deviation
/// from the algebraic signed residual. Records must be in the order produced
/// by [`kolmogorov_from_tables`].
fn operational_cross_check<T: Real>(p: &MarkovProcess<T>, records: &mut [ContextRecord<T>]) -> T {
    let n = p.n_times();
    let all: Vec<usize> = (1..=n).collect();
    let full = full_distribution(p, &all).expect("all times are valid");
    let mut worst = T::zero();
    let mut cursor = 0;
    for i in 1..=n {
        let marg = marginalize(&full, i).expect("time is measured");
        let rest: Vec<usize> = all.iter().copied().filter(|&t| t != i).collect();
        let skip = full_distribution(p, &rest).expect("valid times");
        debug_assert_eq!(marg.len(), skip.len());
        for (flat, (&a, &b)) in marg.probs().iter().zip(skip.probs()).enumerate() {
            let rec = &mut records[cursor];
            debug_assert_eq!(rec.time, i);
            debug_assert_eq!(marg.indices_of(flat).len(), rec.history.len() + rec.future.len());
            let op = a - b;
            rec.operational = Some(op);
            worst = worst.max((op - rec.signed.expect("kolmogorov record")).abs());
            cursor += 1;
        }
    }
    debug_assert_eq!(cursor, records.len());
    worst
}

/// Commutators `[K_i^{(m)}, Q_i(f)]` for every time, outcome and future.
fn commutators<T: Real>(
    p: &MarkovProcess<T>,
    tables: &ContextTables<T>,
    i: usize,
) -> Vec<(usize, Vec<usize>, ComplexMatrix<T>)> {
    let j = p.instrument(i);
    let mut out = Vec::new();
    for (m, (_, k)) in j.elements().iter().enumerate() {
        for (f, q) in tables.futures(i) {
            out.push((m, f.clone(), &k.matmul(q) - &q.matmul(k)));
        }
    }
    out
}

/// `‖[K_i^{(m_i)}, Q_i(𝐦_{n:i+1})]‖` for every time, outcome and future.
pub fn check_commutators<T: Real>(p: &MarkovProcess<T>, eps: T) -> CheckResult<T> {
    commutators_from_tables(p, &ContextTables::new(p), eps)
}

pub(crate) fn commutators_from_tables<T: Real>(
    p: &MarkovProcess<T>,
    tables: &ContextTables<T>,
    eps: T,
) -> CheckResult<T> {
    let mut records = Vec::new();
    for i in 1..=p.n_times() {
        for (m, f, x) in commutators(p, tables, i) {
            records.push(ContextRecord::new(
                i,
                Vec::new(),
                Some(p.instrument(i).label(m).to_string()),
                labels(p, i + 1, &f),
                x.norm(),
            ));
        }
    }
    CheckResult::from_records(Criterion::Commutators, eps, records, Vec::new())
}

/// Shared loop of the weak and absolute checks: `score(ρ̃, X)` for every
/// history, outcome and future, where `X` is prepared once per
/// (outcome, future).
fn state_weighted<T: Real>(
    p: &MarkovProcess<T>,
    tables: &ContextTables<T>,
    eps: T,
    criterion: Criterion,
    prepare: impl Fn(ComplexMatrix<T>) -> ComplexMatrix<T>,
    score: impl Fn(&ComplexMatrix<T>, &ComplexMatrix<T>) -> T,
) -> CheckResult<T> {
    let mut records = Vec::new();
    let mut unreachable = Vec::new();
    for i in 1..=p.n_times() {
        let prepared: Vec<_> = commutators(p, tables, i)
            .into_iter()
            .map(|(m, f, x)| (p.instrument(i).label(m).to_string(), labels(p, i + 1, &f), prepare(x)))
            .collect();
        let mut count = 0;
        for (h, rho) in tables.histories(i) {
            let reachable = rho.trace().re >= eps;
            if !reachable {
                count += 1;
            }
            let history = labels(p, 1, h);
            for (outcome, future, x) in &prepared {
                let residual = if reachable { score(rho, x) } else { T::zero() };
                let mut rec = ContextRecord::new(i, history.clone(), Some(outcome.clone()), future.clone(), residual);
                rec.unreachable = !reachable;
                records.push(rec);
            }
        }
        unreachable.push((i, count));
    }
    CheckResult::from_records(criterion, eps, records, unreachable_flags(&unreachable))
}

/// `|tr(ρ̃_i [K_i^{(m_i)}, Q_i])|` per context.
pub fn check_weak_commutativity<T: Real>(p: &MarkovProcess<T>, eps: T) -> CheckResult<T> {
    weak_from_tables(p, &ContextTables::new(p), eps)
}

pub(crate) fn weak_from_tables<T: Real>(p: &MarkovProcess<T>, tables: &ContextTables<T>, eps: T) -> CheckResult<T> {
    state_weighted(
        p,
        tables,
        eps,
        Criterion::Weak,
        |x| x,
        |rho, x| rho.trace_product(x).norm(),
    )
}

/// `tr(ρ̃_i |[K_i^{(m_i)}, Q_i]|)` per context.
pub fn check_absolute_commutativity<T: Real>(p: &MarkovProcess<T>, eps: T) -> CheckResult<T> {
    absolute_from_tables(p, &ContextTables::new(p), eps)
}

pub(crate) fn absolute_from_tables<T: Real>(p: &MarkovProcess<T>, tables: &ContextTables<T>, eps: T) -> CheckResult<T> {
    state_weighted(
        p,
        tables,
        eps,
        Criterion::Absolute,
        |x| abs_value(&x),
        // Both factors are PSD, so only rounding can push the trace below 0.
        |rho, x| rho.trace_product(x).re.abs(),
    )
}
