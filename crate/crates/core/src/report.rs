//! Deterministic CSV serialization of reports, verdicts, polynomials,
//! certificates, and sweep traces.
//!
//! Numbers are written with Rust's shortest round-trip formatting, so
//! repeated runs on identical inputs produce byte-identical files and
//! values reload losslessly. Infinities print as `inf` / `-inf`.

use std::fmt::Write as _;

use crate::membership::{MembershipVerdict, VectorVerdict};
use crate::poly::Polynomial;
use crate::vector_approx::ApproxCertificate;
use crate::weights::{Side, SideClass, SingularityReport};

/// Shortest round-trip decimal representation; `inf`/`-inf` for the
/// extended values.
pub fn fmt_f64(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".to_string()
    } else if x == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        format!("{x}")
    }
}

fn push_side_row(out: &mut String, point: f64, side: Side, sc: &SideClass) {
    let _ = writeln!(
        out,
        "{},{},{},{},{},{}",
        fmt_f64(point),
        side,
        sc.class,
        fmt_f64(sc.estimate.liminf_est),
        fmt_f64(sc.estimate.limsup_est),
        sc.estimate.converged
    );
}

/// `point,side,class,liminf_est,limsup_est,converged` — one row per
/// probed (point, side).
pub fn classification_csv(report: &SingularityReport) -> String {
    let mut out = String::from("point,side,class,liminf_est,limsup_est,converged\n");
    for e in report.entries() {
        if let Some(sc) = &e.classification.left {
            push_side_row(&mut out, e.point(), Side::Left, sc);
        }
        if let Some(sc) = &e.classification.right {
            push_side_row(&mut out, e.point(), Side::Right, sc);
        }
    }
    out
}

fn push_verdict_rows(out: &mut String, component: usize, v: &MembershipVerdict) {
    for c in &v.conditions {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            component,
            fmt_f64(c.point),
            c.side,
            c.kind,
            fmt_f64(c.measured),
            fmt_f64(c.tolerance),
            c.pass
        );
    }
}

/// `component,point,side,kind,measured,tolerance,pass`.
pub fn verdict_csv(v: &MembershipVerdict) -> String {
    let mut out = String::from("component,point,side,kind,measured,tolerance,pass\n");
    push_verdict_rows(&mut out, 0, v);
    out
}

/// Componentwise verdict rows under the same header.
pub fn vector_verdict_csv(v: &VectorVerdict) -> String {
    let mut out = String::from("component,point,side,kind,measured,tolerance,pass\n");
    for (j, cv) in v.component_verdicts.iter().enumerate() {
        push_verdict_rows(&mut out, j, cv);
    }
    out
}

/// One polynomial per row: `basis,lo,hi,c0,c1,...`.
pub fn polynomial_csv(polys: &[Polynomial]) -> String {
    let mut out = String::new();
    for p in polys {
        let _ = write!(
            out,
            "{},{},{}",
            p.basis().name(),
            fmt_f64(p.interval().lo()),
            fmt_f64(p.interval().hi())
        );
        for c in p.coeffs() {
            let _ = write!(out, ",{}", fmt_f64(*c));
        }
        out.push('\n');
    }
    out
}

/// `degree,weighted_error` rows.
pub fn sweep_csv(trace: &[(usize, f64)]) -> String {
    let mut out = String::from("degree,weighted_error\n");
    for (n, e) in trace {
        let _ = writeln!(out, "{},{}", n, fmt_f64(*e));
    }
    out
}

/// Per-component rows `component,budget,measured_error,degree` plus one
/// summary row `total,<total_measured>,<bound_value>,<tail_contribution>`.
pub fn certificate_csv(cert: &ApproxCertificate) -> String {
    let mut out = String::from("component,budget,measured_error,degree\n");
    for (j, ((b, e), d)) in cert
        .budgets
        .iter()
        .zip(&cert.component_errors)
        .zip(&cert.component_degrees)
        .enumerate()
    {
        let _ = writeln!(out, "{},{},{},{}", j, fmt_f64(*b), fmt_f64(*e), d);
    }
    let _ = writeln!(
        out,
        "total,{},{},{}",
        fmt_f64(cert.total_weighted_error),
        fmt_f64(cert.bound_value),
        fmt_f64(cert.tail_contribution)
    );
    out
}
