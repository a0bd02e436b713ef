//! Text and JSON rendering of reports and distributions.

use std::fmt::Write;

use qkolmo_core::classicality::AuditStatus;
use qkolmo_core::{Distribution, Report};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
}

/// `x` with 12 significant digits; fixed notation for moderate magnitudes,
/// scientific otherwise.
pub fn sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let e = x.abs().log10().floor() as i32;
    if (-4..12).contains(&e) {
        format!("{:.*}", (11 - e) as usize, x)
    } else {
        format!("{x:.11e}")
    }
}

pub fn to_json<S: Serialize>(value: &S) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports always serialize");
    s.push('\n');
    s
}

pub fn report_text(r: &Report) -> String {
    let m = &r.metadata;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "process: dimension {}, {} times, ε = {}",
        m.dim,
        m.n_times,
        sig12(m.eps)
    );
    let _ = writeln!(
        out,
        "{:<12} {:<8} {:>20}  contexts",
        "criterion", "verdict", "max residual"
    );
    for res in &r.results {
        let _ = writeln!(
            out,
            "{:<12} {:<8} {:>20}  {}",
            res.criterion.as_str(),
            res.verdict.to_string(),
            sig12(res.max_residual),
            res.records.len()
        );
    }
    for res in &r.results {
        if let Some(reason) = &res.reason {
            let _ = writeln!(out, "note [{}]: {reason}", res.criterion);
        }
        for f in &res.flags {
            let at = f.time.map(|t| format!(" t{t}")).unwrap_or_default();
            let kind = serde_json::to_value(f.kind).expect("flag kind serializes");
            let _ = writeln!(
                out,
                "flag [{}]{at} {}: {}",
                res.criterion,
                kind.as_str().unwrap_or("?"),
                f.note
            );
        }
    }
    if !r.audit.is_empty() {
        let count = |s| r.audit.iter().filter(|e| e.status == s).count();
        let _ = writeln!(
            out,
            "audit: {} held, {} skipped, {} violated",
            count(AuditStatus::Held),
            count(AuditStatus::Skipped),
            count(AuditStatus::Violated)
        );
        for e in r.audit_violations() {
            let at = e.time.map(|t| format!(" t{t}")).unwrap_or_default();
            let _ = writeln!(out, "  VIOLATED {}{at}: {}", e.rule, e.note);
        }
    }
    out
}

pub fn distribution_text(d: &Distribution) -> String {
    let mut out = String::new();
    let header: Vec<String> = d.times().iter().map(|t| format!("t{t}")).collect();
    let _ = writeln!(out, "{}  probability", header.join(" "));
    for (labels, p) in d.iter() {
        let cells: Vec<String> = labels
            .iter()
            .zip(&header)
            .map(|(l, h)| format!("{l:<w$}", w = h.len()))
            .collect();
        let _ = writeln!(out, "{}  {}", cells.join(" "), sig12(p));
    }
    let _ = writeln!(out, "total  {}", sig12(d.total()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(sig12(0.5), "0.500000000000");
        assert_eq!(sig12(1.0 / 3.0), "0.333333333333");
        assert_eq!(sig12(12.5), "12.5000000000");
        assert_eq!(sig12(2.5e-12), "2.50000000000e-12");
        assert_eq!(sig12(0.0), "0");
    }
}
