//! Scalar weighted approximation: the weighted sup-norm evaluator, bridge
//! regularization near singular points, the degree-sweep pipeline, and
//! the divide-out route for invertible weights.
//!
//! The sweep tries degrees 0, 1, 2, 4, 8, ... up to `max_degree` and
//! returns the first polynomial whose weighted error against the
//! *original* function beats the target. The default engine interpolates
//! the bridge-regularized function at Chebyshev nodes; if that exhausts
//! the budget, a weighted grid-minimax engine (Lawson iteration) takes
//! over — interpolation cannot exploit a weight that vanishes where the
//! function misbehaves, a direct minimax can.

use nalgebra::{DMatrix, DVector};

use crate::expr::{Expr, FuncExpr};
use crate::ext::{xmul, DomainError};
use crate::grid::{Grid, GridError, Interval};
use crate::poly::{bernstein_approx, chebyshev_interp, Basis, EngineError, Polynomial};
use crate::weights::{
    check_bounded_with_report, classify_weight, invert_weight, EssLimitParams, LimitError,
    ScalarWeight, SingularityReport, Thresholds, WeightError,
};
use thiserror::Error;

/// Engine selection for the sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EngineChoice {
    /// Chebyshev interpolation of the regularized target, escalating to
    /// the weighted minimax engine if the degree budget runs out.
    #[default]
    Auto,
    Chebyshev,
    Bernstein,
    /// Weighted grid minimax (Lawson-iterated least squares) on the raw
    /// target.
    Weighted,
}

impl EngineChoice {
    pub fn parse(s: &str) -> Option<EngineChoice> {
        match s {
            "auto" => Some(EngineChoice::Auto),
            "chebyshev" => Some(EngineChoice::Chebyshev),
            "bernstein" => Some(EngineChoice::Bernstein),
            "weighted" => Some(EngineChoice::Weighted),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            EngineChoice::Auto => "auto",
            EngineChoice::Chebyshev => "chebyshev",
            EngineChoice::Bernstein => "bernstein",
            EngineChoice::Weighted => "weighted",
        }
    }
}

/// Options for the approximation pipeline.
#[derive(Debug, Clone)]
pub struct ApproxOpts {
    pub engine: EngineChoice,
    pub max_degree: usize,
    /// Evaluation grid; defaults to the refined grid around all special
    /// points of the weight and the function.
    pub grid: Option<Grid>,
    pub params: EssLimitParams,
    pub thresholds: Thresholds,
    pub lawson_iters: usize,
}

impl Default for ApproxOpts {
    fn default() -> Self {
        ApproxOpts {
            engine: EngineChoice::Auto,
            max_degree: 512,
            grid: None,
            params: EssLimitParams::default(),
            thresholds: Thresholds::default(),
            lawson_iters: 6,
        }
    }
}

/// Outcome of a successful sweep.
#[derive(Debug, Clone)]
pub struct ApproxResult {
    pub poly: Polynomial,
    pub weighted_error: f64,
    pub degree: usize,
    pub sweep_trace: Vec<(usize, f64)>,
    /// Bridge radius used by the returned polynomial's construction;
    /// zero when no regularization was involved.
    pub regularization_radius: f64,
}

/// Outcome of the divide-out route: the polynomial `q` approximating
/// `f w` unweighted, together with the function `q * w^-1` (as its two
/// factors) and the measured isometry identity.
#[derive(Debug, Clone)]
pub struct DivideOutResult {
    pub poly: Polynomial,
    pub weight_inverse: FuncExpr,
    pub unweighted_error: f64,
    pub weighted_error: f64,
    /// `| ||f - q w^-1||_w  -  ||fw - q||_inf |` on the shared grid.
    pub isometry_gap: f64,
    pub degree: usize,
    pub sweep_trace: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RegularizeError {
    #[error("bridge radius must be positive, got {0}")]
    BadEta(f64),
    #[error("bridge radius {eta} overlaps: minimal gap between singular points and endpoints is {gap}")]
    OverlappingBridges { eta: f64, gap: f64 },
    #[error("missing override: f must declare a value at singular point {point}")]
    MissingOverride { point: f64 },
    #[error("bridge endpoint value at {at} is not finite")]
    NonFiniteBridgeValue { at: f64 },
    #[error(transparent)]
    Eval(#[from] DomainError),
}

#[derive(Debug, Error)]
pub enum ApproxError {
    #[error("epsilon must be positive, got {0}")]
    BadEpsilon(f64),
    #[error("weight unbounded (esssup estimate {esssup_estimate}); polynomial closure needs a bounded weight")]
    WeightUnbounded { esssup_estimate: f64 },
    #[error("degree budget exhausted; {diagnosis}")]
    MaxDegreeExceeded {
        sweep_trace: Vec<(usize, f64)>,
        diagnosis: String,
    },
    #[error(transparent)]
    Regularize(#[from] RegularizeError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error(transparent)]
    Limit(#[from] LimitError),
    #[error(transparent)]
    Eval(#[from] DomainError),
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// Max over the grid of `|f(x) - p(x)| * w(x)` under `0 * inf = 0`;
/// `+inf` is a legal return.
pub fn weighted_sup_error(
    f: &FuncExpr,
    p: &Polynomial,
    w: &ScalarWeight,
    g: &Grid,
) -> Result<f64, DomainError> {
    let mut sup: f64 = 0.0;
    for &x in g.points() {
        let fv = f.eval(x)?;
        let wv = w.eval(x)?;
        let mut r = (fv - p.eval(x)).abs();
        if r.is_nan() {
            r = f64::INFINITY;
        }
        let e = xmul(r, wv);
        if e > sup {
            sup = e;
        }
    }
    Ok(sup)
}

fn sup_abs_diff(f: &FuncExpr, p: &Polynomial, g: &Grid) -> Result<f64, DomainError> {
    let mut sup: f64 = 0.0;
    for &x in g.points() {
        let mut r = (f.eval(x)? - p.eval(x)).abs();
        if r.is_nan() {
            r = f64::INFINITY;
        }
        if r > sup {
            sup = r;
        }
    }
    Ok(sup)
}

/// Replaces `f` on `[a - eta, a + eta]` around each singular point of the
/// report by the linear bridge through `(a-eta, f(a-eta))`, `(a, f(a))`,
/// `(a+eta, f(a+eta))` (one-sided at endpoints). The result agrees with
/// `f` elsewhere and is continuous at each bridged point.
pub fn regularize_near_singularities(
    f: &FuncExpr,
    report: &SingularityReport,
    eta: f64,
) -> Result<FuncExpr, RegularizeError> {
    let sing = report.singular_points();
    for &a in &sing {
        if f.override_at(a).is_none() {
            return Err(RegularizeError::MissingOverride { point: a });
        }
    }
    regularize_at_points(f, report.interval(), &sing, eta)
}

pub(crate) fn regularize_at_points(
    f: &FuncExpr,
    interval: Interval,
    singular: &[f64],
    eta: f64,
) -> Result<FuncExpr, RegularizeError> {
    if singular.is_empty() {
        return Ok(f.clone());
    }
    if !(eta > 0.0) {
        return Err(RegularizeError::BadEta(eta));
    }
    let gap = min_gap(interval, singular);
    if 2.0 * eta >= gap {
        return Err(RegularizeError::OverlappingBridges { eta, gap });
    }
    let (lo, hi) = (interval.lo(), interval.hi());
    let mut cuts: Vec<f64> = Vec::new();
    let mut pieces: Vec<Expr> = vec![f.root.clone()];
    for &a in singular {
        let fa = f.eval(a)?;
        if !fa.is_finite() {
            return Err(RegularizeError::NonFiniteBridgeValue { at: a });
        }
        if a > lo {
            let fl = f.eval(a - eta)?;
            if !fl.is_finite() {
                return Err(RegularizeError::NonFiniteBridgeValue { at: a - eta });
            }
            cuts.push(a - eta);
            pieces.push(line_through(a, fa, (fa - fl) / eta));
        }
        if a < hi {
            let fr = f.eval(a + eta)?;
            if !fr.is_finite() {
                return Err(RegularizeError::NonFiniteBridgeValue { at: a + eta });
            }
            cuts.push(a);
            pieces.push(line_through(a, fa, (fr - fa) / eta));
            cuts.push(a + eta);
            pieces.push(f.root.clone());
        }
    }
    Ok(FuncExpr::with_overrides(
        Expr::Piecewise { cuts, pieces },
        f.overrides().to_vec(),
    ))
}

fn line_through(a: f64, fa: f64, slope: f64) -> Expr {
    // fa + slope * (x - a)
    Expr::Add(
        Box::new(Expr::Const(fa)),
        Box::new(Expr::Mul(
            Box::new(Expr::Const(slope)),
            Box::new(Expr::Sub(Box::new(Expr::Var), Box::new(Expr::Const(a)))),
        )),
    )
}

/// Minimal nonzero gap between consecutive singular points and between
/// singular points and the endpoints.
fn min_gap(interval: Interval, singular: &[f64]) -> f64 {
    let mut gap = f64::INFINITY;
    for pair in singular.windows(2) {
        gap = gap.min(pair[1] - pair[0]);
    }
    for &a in singular {
        let dl = a - interval.lo();
        let dr = interval.hi() - a;
        if dl > 0.0 {
            gap = gap.min(dl);
        }
        if dr > 0.0 {
            gap = gap.min(dr);
        }
    }
    gap
}

/// The sweep schedule: 0, 1, 2, then powers of two up to `max_degree`.
pub fn degree_schedule(max_degree: usize) -> Vec<usize> {
    let mut out = vec![0, 1, 2];
    let mut n = 4;
    while n <= max_degree {
        out.push(n);
        n *= 2;
    }
    out.retain(|&d| d <= max_degree);
    out.dedup();
    out
}

/// Constructs a weighted approximant of `f` with certified error below
/// `eps`, or reports how the sweep failed.
pub fn approx_scalar_weighted(
    f: &FuncExpr,
    w: &ScalarWeight,
    eps: f64,
    opts: &ApproxOpts,
) -> Result<ApproxResult, ApproxError> {
    let report = classify_weight(w, &opts.params, &opts.thresholds)?;
    approx_with_report(f, w, eps, &report, opts)
}

pub(crate) fn approx_with_report(
    f: &FuncExpr,
    w: &ScalarWeight,
    eps: f64,
    report: &SingularityReport,
    opts: &ApproxOpts,
) -> Result<ApproxResult, ApproxError> {
    if !(eps > 0.0) {
        return Err(ApproxError::BadEpsilon(eps));
    }
    let bounded = check_bounded_with_report(w, report)?;
    if !bounded.bounded {
        return Err(ApproxError::WeightUnbounded {
            esssup_estimate: bounded.esssup_estimate,
        });
    }
    let interval = w.interval();
    let grid = match &opts.grid {
        Some(g) => g.clone(),
        None => default_pipeline_grid(f, w, report)?,
    };
    let schedule = degree_schedule(opts.max_degree);
    let mut trace: Vec<(usize, f64)> = Vec::new();

    // Phase 1: interpolation/operator engine on the bridge-regularized
    // target.
    if opts.engine != EngineChoice::Weighted {
        let (target, eta) = bridged_target(f, w, report, eps)?;
        for &n in &schedule {
            let p = match opts.engine {
                EngineChoice::Bernstein => bernstein_approx(&target, interval, n)?,
                _ => chebyshev_interp(&target, interval, n)?,
            };
            let e = weighted_sup_error(f, &p, w, &grid)?;
            trace.push((n, e));
            if e < eps {
                return Ok(ApproxResult {
                    poly: p,
                    weighted_error: e,
                    degree: n,
                    sweep_trace: trace,
                    regularization_radius: eta,
                });
            }
        }
    }

    // Phase 2: weighted grid minimax on the raw target.
    if matches!(opts.engine, EngineChoice::Auto | EngineChoice::Weighted) {
        let mut fvals = Vec::with_capacity(grid.points().len());
        let mut wvals = Vec::with_capacity(grid.points().len());
        for &x in grid.points() {
            fvals.push(f.eval(x)?);
            wvals.push(w.eval(x)?);
        }
        let max_n = *schedule.last().unwrap_or(&0);
        let vmax = cheb_vandermonde(grid.points(), interval, max_n);
        for &n in &schedule {
            if let Some(p) =
                weighted_minimax_fit(&vmax, grid.points(), &fvals, &wvals, interval, n, opts.lawson_iters)
            {
                let e = weighted_sup_error(f, &p, w, &grid)?;
                trace.push((n, e));
                if e < eps {
                    return Ok(ApproxResult {
                        poly: p,
                        weighted_error: e,
                        degree: n,
                        sweep_trace: trace,
                        regularization_radius: 0.0,
                    });
                }
            }
        }
    }

    let diagnosis = diagnose_failure(f, w, report, opts);
    Err(ApproxError::MaxDegreeExceeded {
        sweep_trace: trace,
        diagnosis,
    })
}

/// Builds the engine polynomial at every schedule degree without early
/// stopping; convergence studies plot the resulting error columns.
/// `eps` only sizes the bridge radius for the interpolation engines.
pub fn sweep_polynomials(
    f: &FuncExpr,
    w: &ScalarWeight,
    eps: f64,
    opts: &ApproxOpts,
) -> Result<Vec<(usize, Polynomial)>, ApproxError> {
    if !(eps > 0.0) {
        return Err(ApproxError::BadEpsilon(eps));
    }
    let report = classify_weight(w, &opts.params, &opts.thresholds)?;
    let interval = w.interval();
    let grid = match &opts.grid {
        Some(g) => g.clone(),
        None => default_pipeline_grid(f, w, &report)?,
    };
    let schedule = degree_schedule(opts.max_degree);
    let mut out = Vec::with_capacity(schedule.len());
    if opts.engine == EngineChoice::Weighted {
        let mut fvals = Vec::with_capacity(grid.points().len());
        let mut wvals = Vec::with_capacity(grid.points().len());
        for &x in grid.points() {
            fvals.push(f.eval(x)?);
            wvals.push(w.eval(x)?);
        }
        let max_n = *schedule.last().unwrap_or(&0);
        let vmax = cheb_vandermonde(grid.points(), interval, max_n);
        for &n in &schedule {
            if let Some(p) = weighted_minimax_fit(
                &vmax,
                grid.points(),
                &fvals,
                &wvals,
                interval,
                n,
                opts.lawson_iters,
            ) {
                out.push((n, p));
            }
        }
    } else {
        let (target, _eta) = bridged_target(f, w, &report, eps)?;
        for &n in &schedule {
            let p = match opts.engine {
                EngineChoice::Bernstein => bernstein_approx(&target, interval, n)?,
                _ => chebyshev_interp(&target, interval, n)?,
            };
            out.push((n, p));
        }
    }
    Ok(out)
}

fn default_pipeline_grid(
    f: &FuncExpr,
    w: &ScalarWeight,
    report: &SingularityReport,
) -> Result<Grid, GridError> {
    let mut special: Vec<f64> = report.entries().iter().map(|e| e.point()).collect();
    special.extend(f.overrides().iter().map(|&(p, _)| p));
    special.extend(w.declared_points());
    special.retain(|p| w.interval().contains(*p));
    special.sort_by(f64::total_cmp);
    special.dedup();
    Grid::default_refined(w.interval(), &special)
}

/// Picks the bridge radius and builds the regularized target.
///
/// Starts from `eta = min(eps / (2 (1 + local w sup)), gap/4)` and halves
/// until the measured weighted bridge contribution drops below `eps/2`
/// (or the radius floor is hit; the sweep then simply fails over to the
/// weighted engine).
fn bridged_target(
    f: &FuncExpr,
    w: &ScalarWeight,
    report: &SingularityReport,
    eps: f64,
) -> Result<(FuncExpr, f64), ApproxError> {
    let sing = report.singular_points();
    if sing.is_empty() {
        return Ok((f.clone(), 0.0));
    }
    // Representative values must be explicit; adopt finite evaluations as
    // overrides where the caller left them implicit.
    let mut f_aug = f.clone();
    for &a in &sing {
        if f_aug.override_at(a).is_none() {
            let v = f_aug.eval(a)?;
            if !v.is_finite() {
                return Err(RegularizeError::MissingOverride { point: a }.into());
            }
            let mut ov = f_aug.overrides().to_vec();
            ov.push((a, v));
            f_aug = FuncExpr::with_overrides(f_aug.root.clone(), ov);
        }
    }
    let gap = min_gap(w.interval(), &sing);
    let local_sup = local_weight_sup(report).min(1e12);
    let mut eta = (eps / (2.0 * (1.0 + local_sup))).min(gap / 4.0);
    let floor = w.interval().len() * 1e-12;
    let mut best: Option<(FuncExpr, f64)> = None;
    for _ in 0..80 {
        if eta < floor {
            break;
        }
        let target = regularize_at_points(&f_aug, w.interval(), &sing, eta)?;
        let contribution = bridge_contribution(&f_aug, &target, w, &sing, eta)?;
        best = Some((target, eta));
        if contribution < eps / 2.0 {
            break;
        }
        eta *= 0.5;
    }
    match best {
        Some((t, e)) => Ok((t, e)),
        None => Ok((f_aug, 0.0)),
    }
}

fn local_weight_sup(report: &SingularityReport) -> f64 {
    let mut sup: f64 = 0.0;
    for e in report.entries() {
        if !e.classification.is_singularity() {
            continue;
        }
        for sc in e.classification.sides() {
            if let Some(first) = sc.estimate.window_trace.first() {
                if first.sup > sup {
                    sup = first.sup;
                }
            }
        }
    }
    sup
}

/// Measured weighted distance between `f` and its bridge on the bridge
/// zones, sampled at linear and geometric offsets.
fn bridge_contribution(
    f: &FuncExpr,
    target: &FuncExpr,
    w: &ScalarWeight,
    singular: &[f64],
    eta: f64,
) -> Result<f64, ApproxError> {
    let interval = w.interval();
    let mut sup: f64 = 0.0;
    for &a in singular {
        let mut offsets: Vec<f64> = Vec::with_capacity(160);
        for j in 0..=64 {
            offsets.push(eta * j as f64 / 64.0);
        }
        for j in 1..=48 {
            offsets.push(eta * 2f64.powi(-j));
        }
        for off in offsets {
            for x in [a - off, a + off] {
                if !interval.contains(x) {
                    continue;
                }
                let d = (f.eval(x)? - target.eval(x)?).abs();
                let d = if d.is_nan() { f64::INFINITY } else { d };
                let e = xmul(d, w.eval(x)?);
                if e > sup {
                    sup = e;
                }
            }
        }
    }
    Ok(sup)
}

fn diagnose_failure(
    f: &FuncExpr,
    w: &ScalarWeight,
    report: &SingularityReport,
    opts: &ApproxOpts,
) -> String {
    match crate::membership::check_scalar_membership(
        f,
        w,
        report,
        crate::membership::DEFAULT_MEMBERSHIP_TOL,
        &opts.params,
        &opts.thresholds,
    ) {
        Ok(v) if v.member => {
            "membership conditions hold; the degree budget is too small".to_string()
        }
        Ok(v) => {
            if let Some(c) = v.conditions.iter().find(|c| !c.pass) {
                format!(
                    "stagnation hint: {} fails at {} ({}), measured {:.6} >= tol {:.6}",
                    c.kind, c.point, c.side, c.measured, c.tolerance
                )
            } else if !v.finite_norm {
                "stagnation hint: weighted norm of f is not finite".to_string()
            } else if let Some(j) = v.suspicious_jumps.first() {
                format!(
                    "stagnation hint: suspicious undeclared jump near {} (size {:.6})",
                    j.location, j.magnitude
                )
            } else {
                "membership check failed".to_string()
            }
        }
        Err(e) => format!("membership diagnosis unavailable: {e}"),
    }
}

fn cheb_vandermonde(xs: &[f64], interval: Interval, n: usize) -> DMatrix<f64> {
    let m = xs.len();
    let mut v = DMatrix::zeros(m, n + 1);
    for (i, &x) in xs.iter().enumerate() {
        let s = (2.0 * x - interval.lo() - interval.hi()) / interval.len();
        v[(i, 0)] = 1.0;
        if n >= 1 {
            v[(i, 1)] = s;
        }
        for k in 2..=n {
            v[(i, k)] = 2.0 * s * v[(i, k - 1)] - v[(i, k - 2)];
        }
    }
    v
}

/// Weighted discrete minimax via Lawson-iterated least squares, keeping
/// the best iterate. Rows where `w * f` is not finite are excluded from
/// the fit (the caller's error measurement still sees them).
fn weighted_minimax_fit(
    vmax: &DMatrix<f64>,
    xs: &[f64],
    fvals: &[f64],
    wvals: &[f64],
    interval: Interval,
    n: usize,
    iters: usize,
) -> Option<Polynomial> {
    let cols = n + 1;
    let valid: Vec<usize> = (0..xs.len())
        .filter(|&i| wvals[i].is_finite() && xmul(wvals[i], fvals[i]).is_finite())
        .collect();
    let mv = valid.len();
    if mv < cols {
        return None;
    }
    let mut v = DMatrix::zeros(mv, cols);
    for (r, &i) in valid.iter().enumerate() {
        for j in 0..cols {
            v[(r, j)] = vmax[(i, j)];
        }
    }
    let ww: Vec<f64> = valid.iter().map(|&i| wvals[i]).collect();
    let wf: Vec<f64> = valid.iter().map(|&i| xmul(wvals[i], fvals[i])).collect();
    let mut lambda = vec![1.0 / mv as f64; mv];
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut scaled = DMatrix::zeros(mv, cols);
    let mut qv = DVector::zeros(mv);
    for _ in 0..iters.max(1) {
        // normal equations of the lambda-weighted least squares:
        //   (V^T D V) c = V^T (lambda w * wf),   D = diag(lambda w^2)
        for r in 0..mv {
            let d = lambda[r] * ww[r] * ww[r];
            for j in 0..cols {
                scaled[(r, j)] = d * v[(r, j)];
            }
            qv[r] = lambda[r] * ww[r] * wf[r];
        }
        let mut gram = v.tr_mul(&scaled);
        let rhs = v.tr_mul(&qv);
        let ridge = 1e-13 * (gram.trace() / cols as f64).max(f64::MIN_POSITIVE);
        for j in 0..cols {
            gram[(j, j)] += ridge;
        }
        let chol = match nalgebra::linalg::Cholesky::new(gram) {
            Some(c) => c,
            None => break,
        };
        let c = chol.solve(&rhs);
        let coeffs: Vec<f64> = c.iter().copied().collect();
        let poly = Polynomial::new(interval, Basis::ChebyshevOnInterval, coeffs.clone()).ok()?;
        let mut err: f64 = 0.0;
        let mut resid = vec![0.0; mv];
        for (r, &i) in valid.iter().enumerate() {
            let d = (fvals[i] - poly.eval(xs[i])).abs();
            let d = if d.is_nan() { f64::INFINITY } else { d };
            let e = xmul(d, wvals[i]);
            resid[r] = e;
            if e > err {
                err = e;
            }
        }
        if best.as_ref().is_none_or(|(_, b)| err < *b) {
            best = Some((coeffs, err));
        }
        let mut sum = 0.0;
        for r in 0..mv {
            lambda[r] = (lambda[r] * resid[r]).max(1e-300);
            sum += lambda[r];
        }
        if !(sum > 0.0) || !sum.is_finite() {
            break;
        }
        for l in lambda.iter_mut() {
            *l /= sum;
        }
    }
    best.and_then(|(coeffs, _)| Polynomial::new(interval, Basis::ChebyshevOnInterval, coeffs).ok())
}

/// Approximates `f w` by a polynomial `q` in the unweighted sup norm and
/// certifies the isometry `||f - q w^-1||_w = ||fw - q||` on the shared
/// grid.
pub fn divide_out_approx(
    f: &FuncExpr,
    w: &ScalarWeight,
    eps: f64,
    opts: &ApproxOpts,
) -> Result<DivideOutResult, ApproxError> {
    if !(eps > 0.0) {
        return Err(ApproxError::BadEpsilon(eps));
    }
    let w_inv = invert_weight(w, &opts.thresholds)?;
    let fw = f.product(w.expr())?;
    let interval = w.interval();
    let grid = match &opts.grid {
        Some(g) => g.clone(),
        None => {
            let mut special: Vec<f64> = f.overrides().iter().map(|&(p, _)| p).collect();
            special.extend(w.declared_points());
            special.extend(w.expr().overrides().iter().map(|&(p, _)| p));
            special.retain(|p| interval.contains(*p));
            special.sort_by(f64::total_cmp);
            special.dedup();
            Grid::default_refined(interval, &special)?
        }
    };
    let mut trace = Vec::new();
    for n in degree_schedule(opts.max_degree) {
        let q = chebyshev_interp(&fw, interval, n)?;
        let e = sup_abs_diff(&fw, &q, &grid)?;
        trace.push((n, e));
        if e < eps {
            // both sides of the isometry identity on the same grid
            let mut weighted: f64 = 0.0;
            for &x in grid.points() {
                let lhs = f.eval(x)? - q.eval(x) * w_inv.eval(x)?;
                let mut lhs = lhs.abs();
                if lhs.is_nan() {
                    lhs = f64::INFINITY;
                }
                let v = xmul(lhs, w.eval(x)?);
                if v > weighted {
                    weighted = v;
                }
            }
            return Ok(DivideOutResult {
                poly: q,
                weight_inverse: w_inv,
                unweighted_error: e,
                weighted_error: weighted,
                isometry_gap: (weighted - e).abs(),
                degree: n,
                sweep_trace: trace,
            });
        }
    }
    Err(ApproxError::MaxDegreeExceeded {
        sweep_trace: trace,
        diagnosis: "the product f*w does not behave as a continuous function numerically"
            .to_string(),
    })
}
