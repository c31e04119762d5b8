//! Membership checks: does a function lie in the closure of continuous
//! functions under the weighted sup norm?
//!
//! Each probed point contributes one condition per available side:
//! one-sided continuity where the weight is regular, weighted vanishing
//! of `|f(x) - f(a)| w(x)` where it is singular. Probed points are the
//! report's points plus the function's own override points (a jump can
//! live where the weight is unremarkable). A global adjacent-sample scan
//! flags suspicious jumps away from all probed points, since the probed
//! set is finite while the regular set is not.

use crate::expr::FuncExpr;
use crate::ext::{xmul, DomainError};
use crate::weights::{
    classify_point, ess_limits_fn, EssLimitParams, LimitError, PointClassification, ScalarWeight,
    Side, SideClass, SingClass, SingularityReport, Thresholds, VectorWeight,
};
use std::fmt;
use thiserror::Error;

/// Default tolerance for the per-condition limit tests.
pub const DEFAULT_MEMBERSHIP_TOL: f64 = 1e-3;
/// Adjacent-sample differences at or above this flag a suspicious
/// undeclared jump.
pub const JUMP_CUT: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConditionKind {
    OneSidedContinuity,
    WeightedVanishing,
}

impl fmt::Display for ConditionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConditionKind::OneSidedContinuity => write!(f, "one-sided continuity"),
            ConditionKind::WeightedVanishing => write!(f, "weighted vanishing"),
        }
    }
}

/// One per-point, per-side membership condition with its measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionRecord {
    pub point: f64,
    pub side: Side,
    pub kind: ConditionKind,
    pub measured: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// The measuring cascade did not converge; the condition is reported
    /// failed rather than passed.
    pub low_confidence: bool,
}

/// An adjacent-sample jump away from every probed point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpFlag {
    pub location: f64,
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MembershipVerdict {
    pub member: bool,
    pub finite_norm: bool,
    /// Measured weighted sup norm of `f` over the probe grid.
    pub weighted_norm_est: f64,
    pub conditions: Vec<ConditionRecord>,
    pub suspicious_jumps: Vec<JumpFlag>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VectorVerdict {
    pub member: bool,
    pub component_verdicts: Vec<MembershipVerdict>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MembershipError {
    #[error("missing override: f must declare a value at singular point {point}")]
    MissingOverride { point: f64 },
    #[error("report does not match the weight (interval or expression differ)")]
    ReportMismatch,
    #[error("component count mismatch: {functions} functions vs {weights} weights")]
    LengthMismatch { functions: usize, weights: usize },
    #[error("component {index}: {source}")]
    Component {
        index: usize,
        #[source]
        source: Box<MembershipError>,
    },
    #[error(transparent)]
    Limit(#[from] LimitError),
    #[error(transparent)]
    Eval(#[from] DomainError),
}

fn condition_for_side(
    f: &FuncExpr,
    w: &ScalarWeight,
    point: f64,
    sc: &SideClass,
    fa: f64,
    tol: f64,
    params: &EssLimitParams,
) -> Result<ConditionRecord, MembershipError> {
    let side = sc.estimate.side;
    let kind = if sc.class == SingClass::Regular {
        ConditionKind::OneSidedContinuity
    } else {
        ConditionKind::WeightedVanishing
    };
    let eval: Box<dyn Fn(f64) -> Result<f64, DomainError>> = match kind {
        ConditionKind::OneSidedContinuity => {
            Box::new(move |x: f64| Ok((f.eval(x)? - fa).abs()))
        }
        ConditionKind::WeightedVanishing => Box::new(move |x: f64| {
            let d = (f.eval(x)? - fa).abs();
            let d = if d.is_nan() { f64::INFINITY } else { d };
            Ok(xmul(d, w.eval(x)?))
        }),
    };
    let est = ess_limits_fn(&eval, w.interval(), point, side, params)?;
    let measured = est.limsup_est;
    let pass = est.converged && measured < tol;
    Ok(ConditionRecord {
        point,
        side,
        kind,
        measured,
        tolerance: tol,
        pass,
        low_confidence: !est.converged,
    })
}

fn scan_jumps(
    f: &FuncExpr,
    w: &ScalarWeight,
    probed: &[f64],
) -> Result<Vec<JumpFlag>, DomainError> {
    let zone = w.interval().len() / 8.0;
    let pts = w.probe_grid().points();
    let mut out = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for &x in pts {
        if probed.iter().any(|&p| (x - p).abs() < zone) {
            prev = None;
            continue;
        }
        let v = f.eval(x)?;
        if !v.is_finite() {
            prev = None;
            continue;
        }
        if let Some((px, pv)) = prev {
            let d = (v - pv).abs();
            if d >= JUMP_CUT {
                out.push(JumpFlag {
                    location: 0.5 * (px + x),
                    magnitude: d,
                });
            }
        }
        prev = Some((x, v));
    }
    Ok(out)
}

/// Decides membership of `f` in the weighted closure characterized by the
/// regular/singular structure of `w`.
///
/// `report` must come from the same weight. `f` must carry overrides at
/// every singular point so the representative value is explicit.
pub fn check_scalar_membership(
    f: &FuncExpr,
    w: &ScalarWeight,
    report: &SingularityReport,
    tol: f64,
    params: &EssLimitParams,
    th: &Thresholds,
) -> Result<MembershipVerdict, MembershipError> {
    if !report.matches(w) {
        return Err(MembershipError::ReportMismatch);
    }
    // Probe the report's points plus f's own override points.
    let mut probes: Vec<(f64, PointClassification)> = report
        .entries()
        .iter()
        .map(|e| (e.point(), e.classification.clone()))
        .collect();
    for &(p, _) in f.overrides() {
        if w.interval().contains(p) && !probes.iter().any(|&(q, _)| q == p) {
            probes.push((p, classify_point(w, p, params, th)?));
        }
    }
    probes.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut conditions = Vec::new();
    for (point, cls) in &probes {
        let singular_here = cls.is_singularity();
        let fa = if singular_here {
            f.override_at(*point)
                .ok_or(MembershipError::MissingOverride { point: *point })?
        } else {
            f.eval(*point)?
        };
        for sc in [&cls.left, &cls.right].into_iter().flatten() {
            conditions.push(condition_for_side(f, w, *point, sc, fa, tol, params)?);
        }
    }

    let probe_pts: Vec<f64> = probes.iter().map(|&(p, _)| p).collect();
    let suspicious_jumps = scan_jumps(f, w, &probe_pts)?;

    let mut norm: f64 = 0.0;
    for &x in w.probe_grid().points() {
        let v = xmul(f.eval(x)?.abs(), w.eval(x)?);
        if v > norm {
            norm = v;
        }
    }
    let finite_norm = norm.is_finite();
    let member =
        finite_norm && conditions.iter().all(|c| c.pass) && suspicious_jumps.is_empty();
    Ok(MembershipVerdict {
        member,
        finite_norm,
        weighted_norm_est: norm,
        conditions,
        suspicious_jumps,
    })
}

/// Componentwise membership: every coordinate must pass against its own
/// weight's report.
pub fn check_vector_membership(
    functions: &[FuncExpr],
    weights: &VectorWeight,
    tol: f64,
    params: &EssLimitParams,
    th: &Thresholds,
) -> Result<VectorVerdict, MembershipError> {
    if functions.len() != weights.components.len() {
        return Err(MembershipError::LengthMismatch {
            functions: functions.len(),
            weights: weights.components.len(),
        });
    }
    let mut component_verdicts = Vec::with_capacity(functions.len());
    for (j, (f, w)) in functions.iter().zip(&weights.components).enumerate() {
        let report = crate::weights::classify_weight(w, params, th)
            .map_err(|e| MembershipError::Component {
                index: j,
                source: Box::new(e.into()),
            })?;
        let verdict = check_scalar_membership(f, w, &report, tol, params, th).map_err(|e| {
            MembershipError::Component {
                index: j,
                source: Box::new(e),
            }
        })?;
        component_verdicts.push(verdict);
    }
    Ok(VectorVerdict {
        member: component_verdicts.iter().all(|v| v.member),
        component_verdicts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;
    use crate::grid::Interval;
    use crate::weights::classify_weight;

    fn setup(
        f_text: &str,
        w_text: &str,
        declared: &[f64],
    ) -> (FuncExpr, ScalarWeight, SingularityReport) {
        let i = Interval::new(-1.0, 1.0).unwrap();
        let f = parse_expr(f_text).unwrap();
        let w = ScalarWeight::new(parse_expr(w_text).unwrap(), i, declared.to_vec()).unwrap();
        let report =
            classify_weight(&w, &EssLimitParams::default(), &Thresholds::default()).unwrap();
        (f, w, report)
    }

    fn check(
        f: &FuncExpr,
        w: &ScalarWeight,
        report: &SingularityReport,
    ) -> MembershipVerdict {
        check_scalar_membership(
            f,
            w,
            report,
            DEFAULT_MEMBERSHIP_TOL,
            &EssLimitParams::default(),
            &Thresholds::default(),
        )
        .unwrap()
    }

    #[test]
    fn jump_against_flat_weight_is_rejected() {
        let (f, w, report) = setup("sign(x) @ {0: 0}", "1 + 0*x", &[]);
        let v = check(&f, &w, &report);
        assert!(!v.member);
        let failing: Vec<_> = v
            .conditions
            .iter()
            .filter(|c| !c.pass && c.point == 0.0)
            .collect();
        assert_eq!(failing.len(), 2, "both sides at 0 must fail");
        for c in failing {
            assert_eq!(c.kind, ConditionKind::OneSidedContinuity);
            assert!((c.measured - 1.0).abs() < 1e-9, "measured {}", c.measured);
        }
    }

    #[test]
    fn jump_killed_by_vanishing_weight_is_accepted() {
        let (f, w, report) = setup("sign(x) @ {0: 0}", "abs(x)", &[0.0]);
        let v = check(&f, &w, &report);
        assert!(v.member, "verdict: {v:?}");
        let at_zero: Vec<_> = v.conditions.iter().filter(|c| c.point == 0.0).collect();
        assert_eq!(at_zero.len(), 2);
        for c in at_zero {
            assert_eq!(c.kind, ConditionKind::WeightedVanishing);
            assert!(c.pass);
        }
    }

    #[test]
    fn holder_singularity_against_root_weight_is_member() {
        let (f, w, report) = setup("abs(x)^-0.25 @ {0: 0}", "abs(x)^0.5", &[0.0]);
        let v = check(&f, &w, &report);
        assert!(v.member, "verdict: {v:?}");
        assert!(v.finite_norm);
        assert!(v.weighted_norm_est <= 1.0 + 1e-6);
    }

    #[test]
    fn missing_override_at_singular_point_errors() {
        let (f, w, report) = setup("sign(x)", "abs(x)", &[0.0]);
        let err = check_scalar_membership(
            &f,
            &w,
            &report,
            DEFAULT_MEMBERSHIP_TOL,
            &EssLimitParams::default(),
            &Thresholds::default(),
        )
        .unwrap_err();
        assert!(matches!(err, MembershipError::MissingOverride { point } if point == 0.0));
    }

    #[test]
    fn mismatched_report_errors() {
        let (f, _w, report) = setup("x", "abs(x)", &[0.0]);
        let i = Interval::new(-1.0, 1.0).unwrap();
        let other =
            ScalarWeight::new(parse_expr("abs(x)^0.5").unwrap(), i, vec![0.0]).unwrap();
        let err = check_scalar_membership(
            &f,
            &other,
            &report,
            DEFAULT_MEMBERSHIP_TOL,
            &EssLimitParams::default(),
            &Thresholds::default(),
        )
        .unwrap_err();
        assert!(matches!(err, MembershipError::ReportMismatch));
    }

    #[test]
    fn continuous_function_is_member_with_flat_weight() {
        let (f, w, report) = setup("abs(x)", "1 + 0*x", &[]);
        let v = check(&f, &w, &report);
        assert!(v.member);
        assert!(v.suspicious_jumps.is_empty());
    }

    #[test]
    fn undeclared_jump_is_flagged_by_scan() {
        let (f, w, report) = setup("sign(x - 0.37)", "1 + 0*x", &[]);
        let v = check(&f, &w, &report);
        assert!(!v.member);
        assert!(!v.suspicious_jumps.is_empty());
        assert!((v.suspicious_jumps[0].location - 0.37).abs() < 0.01);
    }

    #[test]
    fn vector_membership_is_componentwise() {
        let i = Interval::new(-1.0, 1.0).unwrap();
        let params = EssLimitParams::default();
        let th = Thresholds::default();
        let one = || ScalarWeight::new(parse_expr("1 + 0*x").unwrap(), i, vec![]).unwrap();
        let absx =
            || ScalarWeight::new(parse_expr("abs(x)").unwrap(), i, vec![0.0]).unwrap();

        let fs = vec![parse_expr("abs(x)").unwrap(), parse_expr("x^2").unwrap()];
        let w = VectorWeight::finite(vec![one(), one()]);
        let v = check_vector_membership(&fs, &w, 1e-3, &params, &th).unwrap();
        assert!(v.member);

        let fs = vec![parse_expr("sign(x) @ {0: 0}").unwrap(), parse_expr("x").unwrap()];
        let v = check_vector_membership(&fs, &w, 1e-3, &params, &th).unwrap();
        assert!(!v.member);
        assert!(!v.component_verdicts[0].member);
        assert!(v.component_verdicts[1].member);

        let fs = vec![
            parse_expr("sign(x) @ {0: 0}").unwrap(),
            parse_expr("sign(x) @ {0: 0}").unwrap(),
        ];
        let w = VectorWeight::finite(vec![absx(), one()]);
        let v = check_vector_membership(&fs, &w, 1e-3, &params, &th).unwrap();
        assert!(!v.member);
        assert!(v.component_verdicts[0].member, "weighted vanishing passes");
        assert!(!v.component_verdicts[1].member, "continuity fails");
    }

    #[test]
    fn length_mismatch_errors() {
        let i = Interval::new(-1.0, 1.0).unwrap();
        let w = VectorWeight::finite(vec![ScalarWeight::new(
            parse_expr("1 + 0*x").unwrap(),
            i,
            vec![],
        )
        .unwrap()]);
        let fs = vec![parse_expr("x").unwrap(), parse_expr("x").unwrap()];
        let err = check_vector_membership(
            &fs,
            &w,
            1e-3,
            &EssLimitParams::default(),
            &Thresholds::default(),
        )
        .unwrap_err();
        assert!(matches!(err, MembershipError::LengthMismatch { .. }));
    }
}
