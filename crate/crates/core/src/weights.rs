//! Scalar and vector weights, one-sided essential limit estimation, and
//! singular-point classification.
//!
//! A point is probed through a cascade of shrinking one-sided windows
//! `(a, a + delta0 * 2^-k]` (mirrored on the left). Window statistics are
//! nested — the stats of window `k` cover the sample sets of all deeper
//! levels — so window sups are non-increasing and window infs
//! non-decreasing by construction. The estimates come from the innermost
//! window; convergence compares the last two.

use std::fmt;

use crate::expr::FuncExpr;
use crate::ext::DomainError;
use crate::grid::{Grid, GridError, Interval};
use thiserror::Error;

/// Side of a one-sided limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Left => write!(f, "left"),
            Side::Right => write!(f, "right"),
        }
    }
}

/// Per-side classification of a probed point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingClass {
    Regular,
    Type1,
    Type2,
    Type3,
}

impl fmt::Display for SingClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SingClass::Regular => write!(f, "regular"),
            SingClass::Type1 => write!(f, "type1"),
            SingClass::Type2 => write!(f, "type2"),
            SingClass::Type3 => write!(f, "type3"),
        }
    }
}

/// How a probed point entered the report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeOrigin {
    Declared,
    Detected,
    Endpoint,
}

/// Cascade parameters for one-sided essential limit estimation.
#[derive(Debug, Clone)]
pub struct EssLimitParams {
    /// Outermost window radius; defaults to `interval.len() / 8`.
    pub delta0: Option<f64>,
    /// Number of window halvings.
    pub levels: usize,
    /// Samples in each of the two innermost windows (the ones the
    /// estimates and the convergence flag are computed from).
    pub samples_per_window: usize,
    /// Samples in the outer windows of the trace.
    pub coarse_samples: usize,
    /// Two consecutive window stats closer than this flag convergence.
    pub tol_converge: f64,
}

impl Default for EssLimitParams {
    fn default() -> Self {
        EssLimitParams {
            delta0: None,
            levels: 48,
            samples_per_window: 50_000,
            coarse_samples: 512,
            tol_converge: 1e-4,
        }
    }
}

/// Classification thresholds.
#[derive(Debug, Clone)]
pub struct Thresholds {
    /// Values at or below this count as zero (type-1 limsup test,
    /// invertibility, nonnegativity slack).
    pub tol_zero: f64,
    /// A side with liminf estimate above this is regular; at or below,
    /// singular. Looser than `tol_zero` because sampled infima of
    /// oscillatory weights carry sampling error.
    pub tol_sing: f64,
    /// Local minima of sampled weights below this become detection
    /// candidates.
    pub tol_detect: f64,
    /// Limsup estimates at or above this classify as type 3.
    pub huge_cut: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            tol_zero: 1e-6,
            tol_sing: 1e-3,
            tol_detect: 1e-4,
            huge_cut: 1e12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WeightError {
    #[error("weight is negative at {at} (value {value})")]
    Negative { at: f64, value: f64 },
    #[error("weight vanishes on a subinterval around [{lo}, {hi}] (supp w must be the whole interval)")]
    ZeroOnSubinterval { lo: f64, hi: f64 },
    #[error("declared point {point} outside interval")]
    DeclaredPointOutside { point: f64 },
    #[error("weight not invertible: sampled value {value} at {at} is <= tol_zero")]
    NotInvertible { at: f64, value: f64 },
    #[error(transparent)]
    Eval(#[from] DomainError),
    #[error(transparent)]
    Grid(#[from] GridError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LimitError {
    #[error("point {point} outside interval")]
    PointOutside { point: f64 },
    #[error("side {side} of {point} has no room inside the interval")]
    NoRoom { point: f64, side: Side },
    #[error("window at {point} ({side}) is empty after clipping")]
    EmptyWindow { point: f64, side: Side },
    #[error(transparent)]
    Eval(#[from] DomainError),
}

/// A nonnegative weight on a compact interval with declared candidate
/// singular points.
///
/// Construction probes the weight on a refined grid and rejects negative
/// values and weights that vanish identically on a subinterval (two
/// adjacent probe zeros).
#[derive(Debug, Clone)]
pub struct ScalarWeight {
    expr: FuncExpr,
    interval: Interval,
    declared: Vec<f64>,
    probe: Grid,
}

impl ScalarWeight {
    pub fn new(
        expr: FuncExpr,
        interval: Interval,
        declared: Vec<f64>,
    ) -> Result<Self, WeightError> {
        let mut declared = declared;
        declared.sort_by(f64::total_cmp);
        declared.dedup();
        for &p in &declared {
            if !interval.contains(p) {
                return Err(WeightError::DeclaredPointOutside { point: p });
            }
        }
        // Probe near declared points and near the expression's override
        // points; both are places where the weight can do something odd.
        let mut special = declared.clone();
        special.extend(expr.overrides().iter().map(|&(p, _)| p));
        special.retain(|p| interval.contains(*p));
        special.sort_by(f64::total_cmp);
        special.dedup();
        let probe = Grid::default_refined(interval, &special)?;
        let mut prev_zero_at: Option<f64> = None;
        for &t in probe.points() {
            let v = expr.eval(t)?;
            if v < 0.0 {
                return Err(WeightError::Negative { at: t, value: v });
            }
            if v == 0.0 {
                if let Some(z) = prev_zero_at {
                    return Err(WeightError::ZeroOnSubinterval { lo: z, hi: t });
                }
                prev_zero_at = Some(t);
            } else {
                prev_zero_at = None;
            }
        }
        Ok(ScalarWeight {
            expr,
            interval,
            declared,
            probe,
        })
    }

    pub fn expr(&self) -> &FuncExpr {
        &self.expr
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn declared_points(&self) -> &[f64] {
        &self.declared
    }

    pub fn probe_grid(&self) -> &Grid {
        &self.probe
    }

    pub fn eval(&self, t: f64) -> Result<f64, DomainError> {
        self.expr.eval(t)
    }
}

/// Dimension bookkeeping of a vector weight.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightDim {
    /// Finite-dimensional: the component list is the whole weight.
    Finite,
    /// Truncation of an l^2-indexed weight family; `tail_sup` is the
    /// declared uniform bound on the essential sup of every component
    /// beyond the provided ones.
    TruncatedL2 { tail_sup: f64 },
}

/// A coordinatewise vector weight: every coordinate is itself a scalar
/// weight.
#[derive(Debug, Clone)]
pub struct VectorWeight {
    pub components: Vec<ScalarWeight>,
    pub dim: WeightDim,
}

impl VectorWeight {
    pub fn finite(components: Vec<ScalarWeight>) -> Self {
        VectorWeight {
            components,
            dim: WeightDim::Finite,
        }
    }

    pub fn truncated(components: Vec<ScalarWeight>, tail_sup: f64) -> Self {
        VectorWeight {
            components,
            dim: WeightDim::TruncatedL2 { tail_sup },
        }
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }
}

/// One entry of a window trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowStat {
    pub size: f64,
    pub inf: f64,
    pub sup: f64,
}

/// One-sided essential limit estimate at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct SideLimitEstimate {
    pub point: f64,
    pub side: Side,
    pub liminf_est: f64,
    pub limsup_est: f64,
    pub converged: bool,
    /// Per-window stats, outermost first; sizes strictly decreasing,
    /// sups non-increasing, infs non-decreasing.
    pub window_trace: Vec<WindowStat>,
}

fn close_ext(a: f64, b: f64, tol: f64) -> bool {
    a == b || (a - b).abs() < tol
}

/// Estimates the one-sided essential liminf/limsup of `w` at `a`.
pub fn ess_limits_one_sided(
    w: &ScalarWeight,
    a: f64,
    side: Side,
    params: &EssLimitParams,
) -> Result<SideLimitEstimate, LimitError> {
    ess_limits_fn(&|t| w.eval(t), w.interval(), a, side, params)
}

/// Same cascade machinery for an arbitrary evaluator; membership checks
/// reuse it for `|f(x) - f(a)|` and `|f(x) - f(a)| * w(x)`.
pub(crate) fn ess_limits_fn(
    eval: &dyn Fn(f64) -> Result<f64, DomainError>,
    interval: Interval,
    a: f64,
    side: Side,
    params: &EssLimitParams,
) -> Result<SideLimitEstimate, LimitError> {
    if !interval.contains(a) {
        return Err(LimitError::PointOutside { point: a });
    }
    let room = match side {
        Side::Right => interval.hi() - a,
        Side::Left => a - interval.lo(),
    };
    if room <= 0.0 {
        return Err(LimitError::NoRoom { point: a, side });
    }
    let delta0 = params.delta0.unwrap_or(interval.len() / 8.0).min(room);
    // Clamp the depth so sample offsets stay clear of the rounding
    // neighborhood of `a`; below that the window collapses onto `a`.
    let min_h = 8.0 * params.samples_per_window as f64 * f64::EPSILON * a.abs();
    let mut last = params.levels;
    while last > 1 && delta0 * 2f64.powi(-(last as i32)) < min_h {
        last -= 1;
    }
    let mut level_stats: Vec<(f64, f64, f64)> = Vec::with_capacity(last + 1);
    for k in 0..=last {
        let h = delta0 * 2f64.powi(-(k as i32));
        let m = if k + 1 >= last {
            params.samples_per_window
        } else {
            params.coarse_samples
        };
        let mut inf = f64::INFINITY;
        let mut sup = f64::NEG_INFINITY;
        let mut seen = false;
        for i in 0..m {
            let off = h * (i + 1) as f64 / m as f64;
            let x = match side {
                Side::Right => a + off,
                Side::Left => a - off,
            };
            if x == a || !interval.contains(x) {
                continue;
            }
            let v = eval(x)?;
            if v < inf {
                inf = v;
            }
            if v > sup {
                sup = v;
            }
            seen = true;
        }
        if !seen {
            return Err(LimitError::EmptyWindow { point: a, side });
        }
        level_stats.push((h, inf, sup));
    }
    // Suffix-accumulate so window k covers all deeper levels.
    let n = level_stats.len();
    let mut window_trace = vec![
        WindowStat {
            size: 0.0,
            inf: 0.0,
            sup: 0.0
        };
        n
    ];
    let mut inf = f64::INFINITY;
    let mut sup = f64::NEG_INFINITY;
    for k in (0..n).rev() {
        let (h, li, ls) = level_stats[k];
        inf = inf.min(li);
        sup = sup.max(ls);
        window_trace[k] = WindowStat { size: h, inf, sup };
    }
    let innermost = window_trace[n - 1];
    let converged = n >= 2 && {
        let prev = window_trace[n - 2];
        close_ext(prev.sup, innermost.sup, params.tol_converge)
            && close_ext(prev.inf, innermost.inf, params.tol_converge)
    };
    Ok(SideLimitEstimate {
        point: a,
        side,
        liminf_est: innermost.inf,
        limsup_est: innermost.sup,
        converged,
        window_trace,
    })
}

/// Classification of one side of a point.
#[derive(Debug, Clone, PartialEq)]
pub struct SideClass {
    pub class: SingClass,
    pub estimate: SideLimitEstimate,
    /// Set when the cascade did not converge; the class is still reported.
    pub low_confidence: bool,
}

/// Both-sided classification of a point; endpoint exteriors are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointClassification {
    pub point: f64,
    pub left: Option<SideClass>,
    pub right: Option<SideClass>,
}

impl PointClassification {
    /// Whether some probed side is non-regular.
    pub fn is_singularity(&self) -> bool {
        self.sides().any(|s| s.class != SingClass::Regular)
    }

    pub fn sides(&self) -> impl Iterator<Item = &SideClass> {
        self.left.iter().chain(self.right.iter())
    }
}

fn classify_estimate(est: &SideLimitEstimate, th: &Thresholds) -> SingClass {
    if est.limsup_est >= th.huge_cut {
        SingClass::Type3
    } else if est.liminf_est > th.tol_sing {
        SingClass::Regular
    } else if est.limsup_est <= th.tol_zero {
        SingClass::Type1
    } else {
        SingClass::Type2
    }
}

/// Classifies both available sides of `a`.
pub fn classify_point(
    w: &ScalarWeight,
    a: f64,
    params: &EssLimitParams,
    th: &Thresholds,
) -> Result<PointClassification, LimitError> {
    if !w.interval().contains(a) {
        return Err(LimitError::PointOutside { point: a });
    }
    let mut out = PointClassification {
        point: a,
        left: None,
        right: None,
    };
    if a > w.interval().lo() {
        let est = ess_limits_one_sided(w, a, Side::Left, params)?;
        out.left = Some(SideClass {
            class: classify_estimate(&est, th),
            low_confidence: !est.converged,
            estimate: est,
        });
    }
    if a < w.interval().hi() {
        let est = ess_limits_one_sided(w, a, Side::Right, params)?;
        out.right = Some(SideClass {
            class: classify_estimate(&est, th),
            low_confidence: !est.converged,
            estimate: est,
        });
    }
    Ok(out)
}

/// A probed point with its classification and provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct PointReport {
    pub origin: ProbeOrigin,
    pub classification: PointClassification,
}

impl PointReport {
    pub fn point(&self) -> f64 {
        self.classification.point
    }
}

/// Full classification report of a weight: declared points, detected
/// candidates, and endpoints, with the derived regular/singular sets.
#[derive(Debug, Clone)]
pub struct SingularityReport {
    interval: Interval,
    weight_repr: String,
    entries: Vec<PointReport>,
}

impl SingularityReport {
    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn weight_repr(&self) -> &str {
        &self.weight_repr
    }

    pub fn entries(&self) -> &[PointReport] {
        &self.entries
    }

    pub fn matches(&self, w: &ScalarWeight) -> bool {
        self.interval == w.interval() && self.weight_repr == w.expr().to_string()
    }

    fn side_points(&self, side: Side, pred: impl Fn(SingClass) -> bool) -> Vec<f64> {
        self.entries
            .iter()
            .filter_map(|e| {
                let sc = match side {
                    Side::Left => e.classification.left.as_ref(),
                    Side::Right => e.classification.right.as_ref(),
                }?;
                pred(sc.class).then_some(e.point())
            })
            .collect()
    }

    /// Right regular points among the probed set.
    pub fn r_plus(&self) -> Vec<f64> {
        self.side_points(Side::Right, |c| c == SingClass::Regular)
    }

    /// Left regular points among the probed set.
    pub fn r_minus(&self) -> Vec<f64> {
        self.side_points(Side::Left, |c| c == SingClass::Regular)
    }

    /// Right singular points of the given type (1, 2 or 3).
    pub fn s_plus(&self, ty: u8) -> Vec<f64> {
        self.side_points(Side::Right, |c| class_type(c) == Some(ty))
    }

    /// Left singular points of the given type (1, 2 or 3).
    pub fn s_minus(&self, ty: u8) -> Vec<f64> {
        self.side_points(Side::Left, |c| class_type(c) == Some(ty))
    }

    /// All right singular points.
    pub fn s_plus_all(&self) -> Vec<f64> {
        self.side_points(Side::Right, |c| c != SingClass::Regular)
    }

    /// All left singular points.
    pub fn s_minus_all(&self) -> Vec<f64> {
        self.side_points(Side::Left, |c| c != SingClass::Regular)
    }

    /// Points with some singular side.
    pub fn singular_points(&self) -> Vec<f64> {
        self.entries
            .iter()
            .filter(|e| e.classification.is_singularity())
            .map(|e| e.point())
            .collect()
    }

    pub fn has_type3(&self) -> bool {
        self.entries.iter().any(|e| {
            e.classification
                .sides()
                .any(|s| s.class == SingClass::Type3)
        })
    }
}

fn class_type(c: SingClass) -> Option<u8> {
    match c {
        SingClass::Regular => None,
        SingClass::Type1 => Some(1),
        SingClass::Type2 => Some(2),
        SingClass::Type3 => Some(3),
    }
}

/// Classifies all declared points, auto-detected candidates (grid local
/// minima below `tol_detect`), and the interval endpoints.
pub fn classify_weight(
    w: &ScalarWeight,
    params: &EssLimitParams,
    th: &Thresholds,
) -> Result<SingularityReport, LimitError> {
    let interval = w.interval();
    let mut probe_pts: Vec<(f64, ProbeOrigin)> = Vec::new();
    probe_pts.push((interval.lo(), ProbeOrigin::Endpoint));
    probe_pts.push((interval.hi(), ProbeOrigin::Endpoint));
    for &p in w.declared_points() {
        probe_pts.push((p, ProbeOrigin::Declared));
    }
    // Best-effort scan for undeclared candidates: sampled local minima
    // below the detection threshold.
    let pts = w.probe_grid().points();
    let mut vals = Vec::with_capacity(pts.len());
    for &t in pts {
        vals.push(w.eval(t)?);
    }
    let merge_eps = interval.len() * 1e-9;
    for k in 1..pts.len().saturating_sub(1) {
        if vals[k] < th.tol_detect && vals[k] <= vals[k - 1] && vals[k] <= vals[k + 1] {
            let cand = pts[k];
            if !probe_pts.iter().any(|&(p, _)| (p - cand).abs() <= merge_eps) {
                probe_pts.push((cand, ProbeOrigin::Detected));
            }
        }
    }
    probe_pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    probe_pts.dedup_by(|a, b| a.0 == b.0);
    let mut entries = Vec::with_capacity(probe_pts.len());
    for (p, origin) in probe_pts {
        entries.push(PointReport {
            origin,
            classification: classify_point(w, p, params, th)?,
        });
    }
    Ok(SingularityReport {
        interval,
        weight_repr: w.expr().to_string(),
        entries,
    })
}

/// Boundedness verdict for a weight.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundednessCheck {
    pub bounded: bool,
    pub esssup_estimate: f64,
}

/// Boundedness from a precomputed report: bounded means no infinite
/// sample and no type-3 point; the estimate is the max of all samples
/// (probe grid and cascade window sups).
pub fn check_bounded_with_report(
    w: &ScalarWeight,
    report: &SingularityReport,
) -> Result<BoundednessCheck, LimitError> {
    let mut sup = f64::NEG_INFINITY;
    for &t in w.probe_grid().points() {
        let v = w.eval(t)?;
        if v > sup {
            sup = v;
        }
    }
    for e in report.entries() {
        for sc in e.classification.sides() {
            for ws in &sc.estimate.window_trace {
                if ws.sup > sup {
                    sup = ws.sup;
                }
            }
        }
    }
    Ok(BoundednessCheck {
        bounded: sup.is_finite() && !report.has_type3(),
        esssup_estimate: sup,
    })
}

/// Classifies and then checks boundedness.
pub fn check_bounded(
    w: &ScalarWeight,
    params: &EssLimitParams,
    th: &Thresholds,
) -> Result<BoundednessCheck, LimitError> {
    let report = classify_weight(w, params, th)?;
    check_bounded_with_report(w, &report)
}

/// Returns the reciprocal expression of an invertible weight.
///
/// Requires every probe-grid sample to exceed `tol_zero`; override points
/// map to the reciprocal of their override value.
pub fn invert_weight(w: &ScalarWeight, th: &Thresholds) -> Result<FuncExpr, WeightError> {
    for &t in w.probe_grid().points() {
        let v = w.eval(t)?;
        if v <= th.tol_zero {
            return Err(WeightError::NotInvertible { at: t, value: v });
        }
    }
    let mut inv_overrides = Vec::new();
    for &(p, v) in w.expr().overrides() {
        inv_overrides.push((p, crate::ext::xdiv(1.0, v, p)?));
    }
    Ok(FuncExpr::with_overrides(
        crate::expr::Expr::Div(
            Box::new(crate::expr::Expr::Const(1.0)),
            Box::new(w.expr().root.clone()),
        ),
        inv_overrides,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;

    fn ival() -> Interval {
        Interval::new(-1.0, 1.0).unwrap()
    }

    fn weight(text: &str, declared: &[f64]) -> ScalarWeight {
        ScalarWeight::new(parse_expr(text).unwrap(), ival(), declared.to_vec()).unwrap()
    }

    #[test]
    fn rejects_negative_weight() {
        let err = ScalarWeight::new(parse_expr("x").unwrap(), ival(), vec![]).unwrap_err();
        assert!(matches!(err, WeightError::Negative { .. }));
    }

    #[test]
    fn rejects_weight_zero_on_subinterval() {
        let err =
            ScalarWeight::new(parse_expr("max(x, 0)").unwrap(), ival(), vec![]).unwrap_err();
        assert!(matches!(err, WeightError::ZeroOnSubinterval { .. }));
    }

    #[test]
    fn sqrt_abs_limits_vanish() {
        let w = weight("abs(x)^0.5", &[0.0]);
        let est = ess_limits_one_sided(&w, 0.0, Side::Right, &EssLimitParams::default()).unwrap();
        assert!(est.liminf_est < 1e-3, "liminf {}", est.liminf_est);
        assert!(est.limsup_est < 1e-3, "limsup {}", est.limsup_est);
        assert!(est.liminf_est <= est.limsup_est);
    }

    #[test]
    fn constant_weight_limits_are_exact() {
        let w = weight("1 + 0*x", &[]);
        let est = ess_limits_one_sided(&w, 0.0, Side::Right, &EssLimitParams::default()).unwrap();
        assert_eq!(est.liminf_est, 1.0);
        assert_eq!(est.limsup_est, 1.0);
        assert!(est.converged);
    }

    #[test]
    fn window_trace_is_monotone_and_shrinking() {
        let w = weight("abs(sin(1/x)) @ {0: 0}", &[0.0]);
        let est = ess_limits_one_sided(&w, 0.0, Side::Right, &EssLimitParams::default()).unwrap();
        for pair in est.window_trace.windows(2) {
            assert!(pair[1].size < pair[0].size);
            assert!(pair[1].sup <= pair[0].sup);
            assert!(pair[1].inf >= pair[0].inf);
        }
    }

    #[test]
    fn endpoint_side_without_room_errors() {
        let w = weight("1 + 0*x", &[]);
        let err =
            ess_limits_one_sided(&w, 1.0, Side::Right, &EssLimitParams::default()).unwrap_err();
        assert!(matches!(err, LimitError::NoRoom { .. }));
    }

    #[test]
    fn classify_sqrt_abs_type1() {
        let w = weight("abs(x)^0.5", &[0.0]);
        let c = classify_point(&w, 0.0, &EssLimitParams::default(), &Thresholds::default())
            .unwrap();
        assert_eq!(c.left.unwrap().class, SingClass::Type1);
        assert_eq!(c.right.unwrap().class, SingClass::Type1);
    }

    #[test]
    fn classify_reciprocal_abs_type3() {
        let w = weight("1/abs(x) @ {0: 1}", &[0.0]);
        let c = classify_point(&w, 0.0, &EssLimitParams::default(), &Thresholds::default())
            .unwrap();
        assert_eq!(c.left.unwrap().class, SingClass::Type3);
        assert_eq!(c.right.unwrap().class, SingClass::Type3);
    }

    #[test]
    fn oscillatory_limits_match_dense_sampling_oracle() {
        // independent oracle: 1e6-point dense sampling of the innermost
        // window (0, 0.25 * 2^-48]
        let h = 0.25 * 2f64.powi(-48);
        let m = 1_000_000;
        let mut lo = f64::INFINITY;
        let mut hi: f64 = 0.0;
        for i in 0..m {
            let x = h * (i + 1) as f64 / m as f64;
            let v = (1.0 / x).sin().abs();
            lo = lo.min(v);
            hi = hi.max(v);
        }
        assert!(lo < 1e-3, "oracle liminf {lo}");
        assert!((0.99..=1.0).contains(&hi), "oracle limsup {hi}");
        // the estimator at default settings lands in the same ranges
        let w = weight("abs(sin(1/x)) @ {0: 0}", &[0.0]);
        let est = ess_limits_one_sided(&w, 0.0, Side::Right, &EssLimitParams::default()).unwrap();
        assert!(est.liminf_est < 1e-3);
        assert!((0.99..=1.0).contains(&est.limsup_est));
    }

    #[test]
    fn classify_oscillatory_type2() {
        let w = weight("abs(sin(1/x)) @ {0: 0}", &[0.0]);
        let c = classify_point(&w, 0.0, &EssLimitParams::default(), &Thresholds::default())
            .unwrap();
        for sc in [c.left.unwrap(), c.right.unwrap()] {
            assert_eq!(sc.class, SingClass::Type2);
            assert!(sc.estimate.liminf_est < 1e-3);
            assert!(sc.estimate.limsup_est >= 0.99 && sc.estimate.limsup_est <= 1.0);
        }
    }

    #[test]
    fn classify_product_weight_both_type1() {
        let w = weight("abs(x)*abs(x - 0.5)", &[0.0, 0.5]);
        let report =
            classify_weight(&w, &EssLimitParams::default(), &Thresholds::default()).unwrap();
        let sing = report.singular_points();
        assert_eq!(sing, vec![0.0, 0.5]);
        for &p in &sing {
            let e = report
                .entries()
                .iter()
                .find(|e| e.point() == p)
                .unwrap();
            assert_eq!(e.classification.left.as_ref().unwrap().class, SingClass::Type1);
            assert_eq!(e.classification.right.as_ref().unwrap().class, SingClass::Type1);
        }
        // everything else probed is regular on its available sides
        assert!(report.r_plus().contains(&-1.0));
        assert!(report.r_minus().contains(&1.0));
    }

    #[test]
    fn classify_constant_weight_no_singularities() {
        let w = weight("1 + 0*x", &[]);
        let report =
            classify_weight(&w, &EssLimitParams::default(), &Thresholds::default()).unwrap();
        assert!(report.singular_points().is_empty());
        assert!(report.r_plus().contains(&-1.0));
        assert!(report.r_minus().contains(&1.0));
    }

    #[test]
    fn auto_detection_finds_undeclared_zero() {
        let w = weight("abs(x)^0.5", &[]);
        let report =
            classify_weight(&w, &EssLimitParams::default(), &Thresholds::default()).unwrap();
        let hit = report
            .entries()
            .iter()
            .find(|e| e.point() == 0.0)
            .expect("0 should be detected");
        assert_eq!(hit.origin, ProbeOrigin::Detected);
        assert_eq!(
            hit.classification.right.as_ref().unwrap().class,
            SingClass::Type1
        );
    }

    #[test]
    fn bounded_checks() {
        let p = EssLimitParams::default();
        let th = Thresholds::default();
        let w = weight("abs(x)^0.5", &[0.0]);
        let b = check_bounded(&w, &p, &th).unwrap();
        assert!(b.bounded);
        assert!((b.esssup_estimate - 1.0).abs() < 1e-9);

        let w = weight("1/abs(x) @ {0: 1}", &[0.0]);
        let b = check_bounded(&w, &p, &th).unwrap();
        assert!(!b.bounded);

        let w = weight("2 + sin(x)", &[]);
        let b = check_bounded(&w, &p, &th).unwrap();
        assert!(b.bounded);
        let dense_max = 2.0 + 1.0f64.sin();
        assert!((b.esssup_estimate - dense_max).abs() < 1e-6);
    }

    #[test]
    fn invert_weight_cases() {
        let th = Thresholds::default();
        let w = weight("2 + 0*x", &[]);
        let inv = invert_weight(&w, &th).unwrap();
        assert_eq!(inv.eval(0.3).unwrap(), 0.5);

        let w = weight("exp(x)", &[]);
        let inv = invert_weight(&w, &th).unwrap();
        for &t in w.probe_grid().points() {
            let lhs = inv.eval(t).unwrap();
            let rhs = (-t).exp();
            assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs());
            let prod = w.eval(t).unwrap() * lhs;
            assert!((prod - 1.0).abs() < 1e-12, "w * w^-1 at {t}: {prod}");
        }

        let w = weight("abs(x)", &[0.0]);
        assert!(matches!(
            invert_weight(&w, &th),
            Err(WeightError::NotInvertible { .. })
        ));
    }

    #[test]
    fn side_coherence_for_positive_continuous_weight() {
        let w = weight("2 + sin(x)", &[0.3]);
        let c = classify_point(&w, 0.3, &EssLimitParams::default(), &Thresholds::default())
            .unwrap();
        assert_eq!(c.left.unwrap().class, SingClass::Regular);
        assert_eq!(c.right.unwrap().class, SingClass::Regular);
    }
}
