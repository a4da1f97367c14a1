//! Fixed-width text output.

use std::fmt::Write;

use hmorph_core::complex_core::format_complex;
use hmorph_core::verify::{Outcome, VerificationReport};
use hmorph_core::C64;

fn word(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn sci(x: f64) -> String {
    format!("{x:.3e}")
}

pub fn report_table(r: &VerificationReport) -> String {
    let mut s = String::new();
    let form = if r.canonical { "canonical" } else { "general" };
    let o = &r.options;
    let _ = writeln!(s, "hmorph verify {}  (m={}, k={}, {form})", r.id, r.m, r.k);
    let _ = writeln!(
        s,
        "points={}  seed={}  branch={}  tol={:e}  rank_tol={:e}",
        o.points, o.seed, o.seed_index, o.harmonic_tol, o.rank_tol
    );
    let _ = writeln!(s);
    let _ = writeln!(s, "{:<28} {:>12} {:>12}  {:<6}", "check", "measure", "tol", "result");
    for c in &r.checks {
        let _ = writeln!(s, "{:<28} {:>12} {:>12}  {:<6}", c.name, sci(c.measure), sci(c.tol), word(c.pass));
    }
    let _ = writeln!(s);
    let _ = writeln!(
        s,
        "{:<10} {:<28} {:<9} {:>12} {:>12} {:>8}  {:<6}",
        "subject", "property", "expected", "measure", "tol", "samples", "result"
    );
    for v in &r.verdicts {
        let prop = format!("{}: {}", v.property, v.observed);
        let expected = v.expected.map_or("-".to_string(), |e| e.to_string());
        let _ = writeln!(
            s,
            "{:<10} {:<28} {:<9} {:>12} {:>12} {:>8}  {:<6}",
            v.subject,
            prop,
            expected,
            sci(v.measure),
            sci(v.tol),
            v.samples,
            word(v.pass)
        );
    }
    let failing: Vec<_> = r.verdicts.iter().filter(|v| !v.pass).collect();
    if !failing.is_empty() {
        let _ = writeln!(s);
        for v in failing {
            let _ = writeln!(s, "mismatch: {} {}: {}", v.subject, v.property, v.detail);
            if let Some(reason) = &v.reason {
                let _ = writeln!(s, "  expected because {reason}");
            }
        }
    }
    let _ = writeln!(s);
    for n in &r.notes {
        let _ = writeln!(s, "note: {n}");
    }
    let _ = writeln!(s, "overall: {}", word(r.overall == Outcome::Pass));
    s
}

pub fn list_table(rows: &[(&str, &str)]) -> String {
    let mut s = String::new();
    for (name, summary) in rows {
        let _ = writeln!(s, "{name:<10} {summary}");
    }
    s
}

pub fn complex_vec(v: &[C64]) -> String {
    v.iter().map(|c| format_complex(*c)).collect::<Vec<_>>().join(", ")
}
