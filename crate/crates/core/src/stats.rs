//! Multi-time statistics: the regression formula, conditioned states `ρ̃_i`,
//! rolled-back future effects `Q_i`, marginals and skipped measurements.
//!
//! All quantities are computed by sequential state/effect updates; the
//! exponential sum over dynamics Kraus paths is never formed.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::opmat::ComplexMatrix;
use crate::process::{DensityMatrix, MarkovProcess, OutcomeSequence};
use crate::scalar::Real;

/// Probability of a complete outcome sequence over times `1..=n`.
pub fn joint_prob<T: Real>(p: &MarkovProcess<T>, seq: &OutcomeSequence) -> Result<T> {
    let idx = seq.resolve(p, 1..=p.n_times())?;
    Ok(joint_prob_indices(p, &idx))
}

/// [`joint_prob`] on outcome indices; panics if `idx` is malformed.
pub fn joint_prob_indices<T: Real>(p: &MarkovProcess<T>, idx: &[usize]) -> T {
    let mut rho = p.initial().matrix().clone();
    for (k, &m) in idx.iter().enumerate() {
        let t = k + 1;
        rho = p.instrument(t).kraus(m).sandwich(&rho);
        if t < p.n_times() {
            rho = p.map_after(t).apply(&rho);
        }
    }
    rho.trace().re
}

/// Outcome statistics at a subset of times; unmeasured times apply no
/// Kraus operator but their dynamics still act.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JointDistribution<T> {
    times: Vec<usize>,
    labels: Vec<Vec<String>>,
    probs: Vec<T>,
}

impl<T: Real> JointDistribution<T> {
    /// Measured times, ascending.
    pub fn times(&self) -> &[usize] {
        &self.times
    }

    /// Outcome labels per measured time, in declared order.
    pub fn labels(&self) -> &[Vec<String>] {
        &self.labels
    }

    /// Probabilities in lexicographic order of outcome indices
    /// (earliest time most significant).
    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn total(&self) -> T {
        self.probs.iter().copied().sum()
    }

    /// Outcome indices of the entry at flat position `flat`.
    pub fn indices_of(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.labels.len()];
        for (k, ls) in self.labels.iter().enumerate().rev() {
            idx[k] = flat % ls.len();
            flat /= ls.len();
        }
        idx
    }

    fn flat_of(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.labels).fold(0, |acc, (&m, ls)| acc * ls.len() + m)
    }

    /// Probability of the outcomes given by index, one per measured time.
    pub fn get_indices(&self, idx: &[usize]) -> Option<T> {
        if idx.len() != self.labels.len() || idx.iter().zip(&self.labels).any(|(&m, ls)| m >= ls.len()) {
            return None;
        }
        Some(self.probs[self.flat_of(idx)])
    }

    /// Probability of the outcomes given by label, one per measured time.
    pub fn get<S: AsRef<str>>(&self, labels: &[S]) -> Option<T> {
        if labels.len() != self.labels.len() {
            return None;
        }
        let idx: Option<Vec<usize>> = labels
            .iter()
            .zip(&self.labels)
            .map(|(l, ls)| ls.iter().position(|x| x == l.as_ref()))
            .collect();
        self.get_indices(&idx?)
    }

    /// `(outcome labels, probability)` in table order.
    pub fn iter(&self) -> impl Iterator<Item = (Vec<&str>, T)> + '_ {
        self.probs.iter().enumerate().map(move |(flat, &pr)| {
            let idx = self.indices_of(flat);
            let ls = idx.iter().zip(&self.labels).map(|(&m, ls)| ls[m].as_str()).collect();
            (ls, pr)
        })
    }

    /// Probabilities clamped to `[0, 1]` for display.
    pub fn clamped(&self) -> Vec<T> {
        self.probs.iter().map(|&x| x.max(T::zero()).min(T::one())).collect()
    }
}

/// Distribution of the outcomes at `measure_at` (1-based, any order,
/// duplicates ignored).
pub fn full_distribution<T: Real>(p: &MarkovProcess<T>, measure_at: &[usize]) -> Result<JointDistribution<T>> {
    let mut times = measure_at.to_vec();
    times.sort_unstable();
    times.dedup();
    for &t in &times {
        p.check_time(t)?;
    }
    let labels: Vec<Vec<String>> = times
        .iter()
        .map(|&t| p.instrument(t).labels().map(str::to_string).collect())
        .collect();
    let size = labels.iter().map(Vec::len).product();
    let mut probs = Vec::with_capacity(size);
    let measured: Vec<bool> = (1..=p.n_times()).map(|t| times.contains(&t)).collect();
    descend(p, &measured, 1, p.initial().matrix().clone(), &mut probs);
    debug_assert_eq!(probs.len(), size);
    Ok(JointDistribution { times, labels, probs })
}

fn descend<T: Real>(p: &MarkovProcess<T>, measured: &[bool], t: usize, rho: ComplexMatrix<T>, out: &mut Vec<T>) {
    let evolve = |r: ComplexMatrix<T>| {
        if t < p.n_times() {
            p.map_after(t).apply(&r)
        } else {
            r
        }
    };
    let next = |r: ComplexMatrix<T>, out: &mut Vec<T>| {
        if t == p.n_times() {
            out.push(r.trace().re);
        } else {
            descend(p, measured, t + 1, evolve(r), out);
        }
    };
    if measured[t - 1] {
        for (_, k) in p.instrument(t).elements() {
            next(k.sandwich(&rho), out);
        }
    } else {
        next(rho, out);
    }
}

/// Sums out the outcome at time `t`.
pub fn marginalize<T: Real>(d: &JointDistribution<T>, t: usize) -> Result<JointDistribution<T>> {
    let pos = d
        .times
        .iter()
        .position(|&x| x == t)
        .ok_or(Error::TimeNotMeasured { time: t })?;
    let mut times = d.times.clone();
    times.remove(pos);
    let mut labels = d.labels.clone();
    labels.remove(pos);
    let mut out = JointDistribution {
        times,
        labels,
        probs: vec![T::zero(); d.probs.len() / d.labels[pos].len()],
    };
    // Accumulate in table order so each entry has a fixed summation order.
    for (flat, &pr) in d.probs.iter().enumerate() {
        let mut idx = d.indices_of(flat);
        idx.remove(pos);
        let target = out.flat_of(&idx);
        out.probs[target] += pr;
    }
    Ok(out)
}

/// `ρ̃_i(𝐦_{i-1:1})`: the subnormalised state just before the measurement at
/// time `i`, whose trace is the probability of the history.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionedState<T> {
    pub time: usize,
    pub history: OutcomeSequence,
    pub state: DensityMatrix<T>,
}

/// `Q_i(𝐦_{n:i+1})`: the future outcome effect rolled back to just after the
/// measurement at time `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct PostOperator<T> {
    pub time: usize,
    pub future: OutcomeSequence,
    pub op: ComplexMatrix<T>,
}

pub fn pre_measurement_state<T: Real>(
    p: &MarkovProcess<T>,
    i: usize,
    history: &OutcomeSequence,
) -> Result<ConditionedState<T>> {
    p.check_time(i)?;
    let idx = history.resolve(p, 1..=i - 1)?;
    Ok(ConditionedState {
        time: i,
        history: history.clone(),
        state: DensityMatrix::from_engine(rho_tilde(p, &idx)),
    })
}

pub fn post_measurement_operator<T: Real>(
    p: &MarkovProcess<T>,
    i: usize,
    future: &OutcomeSequence,
) -> Result<PostOperator<T>> {
    p.check_time(i)?;
    let idx = future.resolve(p, i + 1..=p.n_times())?;
    Ok(PostOperator {
        time: i,
        future: future.clone(),
        op: q_operator(p, i, &idx),
    })
}

/// `ρ̃_{k+1}` for the history given by outcome indices at times `1..=k`.
pub(crate) fn rho_tilde<T: Real>(p: &MarkovProcess<T>, history: &[usize]) -> ComplexMatrix<T> {
    let mut rho = p.initial().matrix().clone();
    for (k, &m) in history.iter().enumerate() {
        let t = k + 1;
        rho = p.map_after(t).apply(&p.instrument(t).kraus(m).sandwich(&rho));
    }
    rho
}

/// `Q_i` for the future given by outcome indices at times `i+1..=n`.
pub(crate) fn q_operator<T: Real>(p: &MarkovProcess<T>, i: usize, future: &[usize]) -> ComplexMatrix<T> {
    let mut q = ComplexMatrix::identity(p.dim());
    for (k, &m) in future.iter().enumerate().rev() {
        let t = i + 1 + k;
        q = p
            .map_after(t - 1)
            .apply_adjoint(&p.instrument(t).kraus(m).adjoint_sandwich(&q));
    }
    q
}

/// `tr(ρ̃_i K_i† Q_i K_i)`; equals [`joint_prob`] for every split time `i`.
pub fn split_prob<T: Real>(p: &MarkovProcess<T>, i: usize, seq: &OutcomeSequence) -> Result<T> {
    p.check_time(i)?;
    let idx = seq.resolve(p, 1..=p.n_times())?;
    Ok(split_prob_indices(p, i, &idx))
}

pub fn split_prob_indices<T: Real>(p: &MarkovProcess<T>, i: usize, idx: &[usize]) -> T {
    let rho = rho_tilde(p, &idx[..i - 1]);
    let q = q_operator(p, i, &idx[i..]);
    let k = p.instrument(i).kraus(idx[i - 1]);
    rho.trace_product(&k.adjoint_sandwich(&q)).re
}

/// Every outcome-index tuple for the given times, in lexicographic order.
pub fn enumerate_outcomes<T: Real>(p: &MarkovProcess<T>, times: impl IntoIterator<Item = usize>) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for t in times {
        let m = p.instrument(t).len();
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..m).map(move |k| {
                    let mut v = prefix.clone();
                    v.push(k);
                    v
                })
            })
            .collect();
    }
    out
}

/// Labels for outcome indices starting at time `first`.
pub fn to_sequence<T: Real>(p: &MarkovProcess<T>, first: usize, idx: &[usize]) -> OutcomeSequence {
    let labels: Vec<&str> = idx
        .iter()
        .enumerate()
        .map(|(k, &m)| p.instrument(first + k).label(m))
        .collect();
    OutcomeSequence::from_labels(first, &labels).expect("consecutive times")
}

/// All conditioned states and all rolled-back futures, built once by the
/// forward and backward recursions.
#[derive(Debug, Clone)]
pub struct ContextTables<T> {
    /// `forward[i-1]`: `(history over 1..i-1, ρ̃_i)` in lexicographic order.
    forward: Vec<Vec<(Vec<usize>, ComplexMatrix<T>)>>,
    /// `backward[i-1]`: `(future over i+1..n, Q_i)` in lexicographic order.
    backward: Vec<Vec<(Vec<usize>, ComplexMatrix<T>)>>,
}

impl<T: Real> ContextTables<T> {
    pub fn new(p: &MarkovProcess<T>) -> Self {
        let n = p.n_times();
        let mut forward = Vec::with_capacity(n);
        forward.push(vec![(Vec::new(), p.initial().matrix().clone())]);
        for t in 1..n {
            let j = p.instrument(t);
            let lam = p.map_after(t);
            let next = forward[t - 1]
                .iter()
                .flat_map(|(h, rho): &(Vec<usize>, ComplexMatrix<T>)| {
                    j.elements().iter().enumerate().map(move |(m, (_, k))| {
                        let mut h2 = h.clone();
                        h2.push(m);
                        (h2, lam.apply(&k.sandwich(rho)))
                    })
                })
                .collect();
            forward.push(next);
        }

        let mut backward = vec![Vec::new(); n];
        backward[n - 1] = vec![(Vec::new(), ComplexMatrix::identity(p.dim()))];
        for i in (1..n).rev() {
            let j = p.instrument(i + 1);
            let lam = p.map_after(i);
            let mut cur = Vec::new();
            for (m, (_, k)) in j.elements().iter().enumerate() {
                for (f, q) in &backward[i] {
                    let mut f2 = Vec::with_capacity(f.len() + 1);
                    f2.push(m);
                    f2.extend_from_slice(f);
                    cur.push((f2, lam.apply_adjoint(&k.adjoint_sandwich(q))));
                }
            }
            backward[i - 1] = cur;
        }
        Self { forward, backward }
    }

    pub fn histories(&self, i: usize) -> &[(Vec<usize>, ComplexMatrix<T>)] {
        &self.forward[i - 1]
    }

    pub fn futures(&self, i: usize) -> &[(Vec<usize>, ComplexMatrix<T>)] {
        &self.backward[i - 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opmat::{basis_ket, named};
    use crate::process::{Instrument, KrausSet};
    use crate::scalar::cplx;

    fn z(d: usize) -> Instrument<f64> {
        Instrument::projective(&(0..d).map(|k| basis_ket(d, k)).collect::<Vec<_>>()).unwrap()
    }

    fn x_instrument() -> Instrument<f64> {
        Instrument::new(vec![("+".into(), named::plus()), ("-".into(), named::minus())]).unwrap()
    }

    fn ex4() -> MarkovProcess<f64> {
        let h = KrausSet::unitary(named::hadamard());
        MarkovProcess::new(
            DensityMatrix::pure(&basis_ket(2, 0)).unwrap(),
            vec![h.clone(), h],
            vec![z(2), x_instrument(), z(2)],
        )
        .unwrap()
    }

    fn ex6(rho: DensityMatrix<f64>) -> MarkovProcess<f64> {
        let l21 = ComplexMatrix::from_rows(vec![
            vec![cplx(1.0, 0.0), cplx(1.0, 0.0)],
            vec![cplx(0.0, 1.0), cplx(0.0, -1.0)],
        ])
        .unwrap()
        .scale_real(std::f64::consts::FRAC_1_SQRT_2);
        MarkovProcess::new(
            rho,
            vec![KrausSet::unitary(l21), KrausSet::unitary(named::hadamard())],
            vec![z(2), z(2), z(2)],
        )
        .unwrap()
    }

    fn seq(labels: &[&str]) -> OutcomeSequence {
        OutcomeSequence::from_labels(1, labels).unwrap()
    }

    #[test]
    fn joint_prob_examples() {
        let trivial = MarkovProcess::new(
            DensityMatrix::<f64>::maximally_mixed(2),
            vec![],
            vec![Instrument::trivial(2)],
        )
        .unwrap();
        assert!((joint_prob(&trivial, &seq(&["id"])).unwrap() - 1.0).abs() < 1e-15);
        assert!((joint_prob(&ex4(), &seq(&["0", "+", "0"])).unwrap() - 1.0).abs() < 1e-12);
        let p6 = ex6(DensityMatrix::maximally_mixed(2));
        for idx in enumerate_outcomes(&p6, 1..=3) {
            assert!((joint_prob_indices(&p6, &idx) - 0.125).abs() < 1e-12);
        }
    }

    #[test]
    fn joint_prob_errors() {
        assert!(matches!(
            joint_prob(&ex4(), &seq(&["0", "x", "0"])),
            Err(Error::UnknownOutcome { time: 2, .. })
        ));
        assert!(matches!(
            joint_prob(&ex4(), &seq(&["0", "+"])),
            Err(Error::InvalidSequence(_))
        ));
    }

    #[test]
    fn full_distribution_examples() {
        let p6 = ex6(DensityMatrix::maximally_mixed(2));
        let d = full_distribution(&p6, &[1, 2, 3]).unwrap();
        assert_eq!(d.len(), 8);
        assert!(d.probs().iter().all(|&x| (x - 0.125).abs() < 1e-12));

        let none = full_distribution(&p6, &[]).unwrap();
        assert_eq!(none.len(), 1);
        assert!((none.probs()[0] - 1.0).abs() < 1e-12);
        assert!(full_distribution(&p6, &[4]).is_err());
    }

    #[test]
    fn full_distribution_is_lexicographic() {
        let d = full_distribution(&ex4(), &[1, 2, 3]).unwrap();
        let order: Vec<String> = d.iter().map(|(ls, _)| ls.concat()).collect();
        assert_eq!(order, ["0+0", "0+1", "0-0", "0-1", "1+0", "1+1", "1-0", "1-1"]);
        assert!((d.get(&["0", "+", "0"]).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pre_measurement_state_examples() {
        let p = ex4();
        let first = pre_measurement_state(&p, 1, &OutcomeSequence::empty()).unwrap();
        assert_eq!(first.state.matrix(), p.initial().matrix());

        let s = pre_measurement_state(&p, 2, &seq(&["0"])).unwrap();
        assert!((s.state.matrix() - &named::plus()).norm() < 1e-12);
        assert!((s.state.trace() - 1.0).abs() < 1e-12);

        let q = 0.3;
        let rho = ComplexMatrix::from_rows(vec![
            vec![cplx(q, 0.0), cplx(0.1, 0.2)],
            vec![cplx(0.1, -0.2), cplx(1.0 - q, 0.0)],
        ])
        .unwrap();
        let p6 = ex6(DensityMatrix::new(rho, 1e-12).unwrap());
        let s = pre_measurement_state(&p6, 2, &seq(&["0"])).unwrap();
        assert!((s.state.matrix() - &named::plus_i().scale_real(q)).norm() < 1e-12);

        assert!(pre_measurement_state(&p, 2, &OutcomeSequence::empty()).is_err());
    }

    #[test]
    fn post_measurement_operator_examples() {
        let p = ex4();
        let q3 = post_measurement_operator(&p, 3, &OutcomeSequence::empty()).unwrap();
        assert_eq!(q3.op, ComplexMatrix::identity(2));
        let fut = OutcomeSequence::from_labels(3, &["0"]).unwrap();
        let q = post_measurement_operator(&p, 2, &fut).unwrap();
        assert!((&q.op - &named::plus()).norm() < 1e-12);
        let p6 = ex6(DensityMatrix::maximally_mixed(2));
        let q = post_measurement_operator(&p6, 2, &fut).unwrap();
        assert!((&q.op - &named::plus()).norm() < 1e-12);
    }

    #[test]
    fn split_prob_examples() {
        let p = ex4();
        assert!((split_prob(&p, 2, &seq(&["0", "+", "0"])).unwrap() - 1.0).abs() < 1e-12);
        let p6 = ex6(DensityMatrix::maximally_mixed(2));
        for idx in enumerate_outcomes(&p6, 1..=3) {
            for i in 1..=3 {
                assert!((split_prob_indices(&p6, i, &idx) - 0.125).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn marginalize_examples() {
        let p6 = ex6(DensityMatrix::maximally_mixed(2));
        let d = full_distribution(&p6, &[1, 2, 3]).unwrap();
        let m = marginalize(&d, 2).unwrap();
        assert_eq!(m.times(), &[1, 3]);
        assert_eq!(m.len(), 4);
        assert!(m.probs().iter().all(|&x| (x - 0.25).abs() < 1e-12));
        let all = marginalize(&marginalize(&m, 1).unwrap(), 3).unwrap();
        assert_eq!(all.len(), 1);
        assert!((all.probs()[0] - 1.0).abs() < 1e-12);
        assert!(matches!(marginalize(&m, 2), Err(Error::TimeNotMeasured { time: 2 })));
    }

    #[test]
    fn context_tables_match_direct_recursions() {
        let p = ex6(DensityMatrix::maximally_mixed(2));
        let tables = ContextTables::new(&p);
        for i in 1..=3 {
            let hs = tables.histories(i);
            assert_eq!(hs.len(), 1 << (i - 1));
            for (h, rho) in hs {
                assert!((rho - &rho_tilde(&p, h)).norm() < 1e-14);
            }
            let fs = tables.futures(i);
            assert_eq!(fs.len(), 1 << (3 - i));
            let expected = enumerate_outcomes(&p, i + 1..=3);
            for ((f, q), e) in fs.iter().zip(&expected) {
                assert_eq!(f, e);
                assert!((q - &q_operator(&p, i, f)).norm() < 1e-14);
            }
        }
    }
}
