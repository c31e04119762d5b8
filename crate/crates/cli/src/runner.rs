//! Task dispatch and report writing.
//!
//! Every run writes its CSV artifacts with a single buffered write per
//! file, in deterministic order, so byte-identical inputs give
//! byte-identical outputs. Exit codes: 0 success, 1 io, 2 validation,
//! 3 non-member, 4 approximation failure, 5 invalid weight.

use std::path::{Path, PathBuf};

use wapprox::report as csv;
use wapprox::{
    approx_vector, check_vector_membership, classify_weight, divide_out_approx, make_grid,
    residual_g_norm, sweep_polynomials, weighted_sup_error, ApproxError, ApproxOpts,
    EssLimitParams, Grid, GridScheme, Polynomial, ScalarWeight, SingularityReport,
    TailCertificate, Thresholds, VectorApproxError, VectorFunction, VectorWeight,
};

use crate::job::{JobSpec, SchemeTag, TaskKind};

pub const EXIT_OK: u8 = 0;
pub const EXIT_IO: u8 = 1;
pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_NON_MEMBER: u8 = 3;
pub const EXIT_APPROX_FAILED: u8 = 4;
pub const EXIT_WEIGHT_INVALID: u8 = 5;

/// Run-time knobs from the command line.
pub struct RunConfig {
    pub tol_zero: Option<f64>,
    pub tol_limit: Option<f64>,
    pub grid_n: Option<usize>,
    pub explain: bool,
}

pub enum RunFailure {
    Io(String),
    Validation(String),
    NonMember,
    ApproxFailed(String),
    WeightInvalid(String),
}

impl RunFailure {
    pub fn exit_code(&self) -> u8 {
        match self {
            RunFailure::Io(_) => EXIT_IO,
            RunFailure::Validation(_) => EXIT_VALIDATION,
            RunFailure::NonMember => EXIT_NON_MEMBER,
            RunFailure::ApproxFailed(_) => EXIT_APPROX_FAILED,
            RunFailure::WeightInvalid(_) => EXIT_WEIGHT_INVALID,
        }
    }

    pub fn message(&self) -> Option<String> {
        match self {
            RunFailure::Io(m) => Some(format!("io error: {m}")),
            RunFailure::Validation(m) => Some(format!("validation error: {m}")),
            RunFailure::NonMember => None,
            RunFailure::ApproxFailed(m) => Some(format!("approximation failed: {m}")),
            RunFailure::WeightInvalid(m) => Some(format!("invalid weight: {m}")),
        }
    }
}

fn approx_failure(e: ApproxError) -> RunFailure {
    match e {
        ApproxError::WeightUnbounded { .. } => RunFailure::WeightInvalid(e.to_string()),
        ApproxError::Weight(_) | ApproxError::Limit(_) => {
            RunFailure::WeightInvalid(e.to_string())
        }
        ApproxError::BadEpsilon(_)
        | ApproxError::Regularize(_)
        | ApproxError::Grid(_)
        | ApproxError::Eval(_) => RunFailure::Validation(e.to_string()),
        ApproxError::MaxDegreeExceeded { .. } | ApproxError::Engine(_) => {
            RunFailure::ApproxFailed(e.to_string())
        }
    }
}

fn vector_failure(e: VectorApproxError) -> RunFailure {
    match e {
        VectorApproxError::ComponentFailed { ref source, .. } => match source.as_ref() {
            ApproxError::WeightUnbounded { .. } | ApproxError::Weight(_) => {
                RunFailure::WeightInvalid(e.to_string())
            }
            _ => RunFailure::ApproxFailed(e.to_string()),
        },
        VectorApproxError::WeightUnbounded { .. }
        | VectorApproxError::TailBoundExceedsComponents { .. }
        | VectorApproxError::Limit(_) => RunFailure::WeightInvalid(e.to_string()),
        VectorApproxError::BadCertificate { .. }
        | VectorApproxError::LengthMismatch { .. }
        | VectorApproxError::DimKindMismatch { .. }
        | VectorApproxError::Grid(_)
        | VectorApproxError::Eval(_) => RunFailure::Validation(e.to_string()),
        VectorApproxError::BudgetExceeded { .. } | VectorApproxError::BoundExceeded { .. } => {
            RunFailure::ApproxFailed(e.to_string())
        }
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), RunFailure> {
    std::fs::write(path, contents)
        .map_err(|e| RunFailure::Io(format!("{}: {e}", path.display())))
}

fn build_weights(job: &JobSpec) -> Result<Vec<ScalarWeight>, RunFailure> {
    job.weight
        .exprs
        .iter()
        .map(|e| {
            ScalarWeight::new(e.clone(), job.interval, job.weight.points.clone())
                .map_err(|err| RunFailure::WeightInvalid(err.to_string()))
        })
        .collect()
}

fn build_vector_weight(job: &JobSpec, comps: Vec<ScalarWeight>) -> VectorWeight {
    match job.weight.tail {
        Some((c, r)) => {
            let n = comps.len();
            VectorWeight::truncated(comps, c * r.powi(n as i32))
        }
        None => VectorWeight::finite(comps),
    }
}

fn build_vector_function(job: &JobSpec) -> Result<VectorFunction, RunFailure> {
    let f = job.function.as_ref().expect("validated");
    match f.tail {
        Some((c, r)) => {
            let cert = TailCertificate::new(c, r)
                .map_err(|e| RunFailure::Validation(e.to_string()))?;
            Ok(VectorFunction::truncated(f.exprs.clone(), cert))
        }
        None => Ok(VectorFunction::finite(f.exprs.clone())),
    }
}

fn shared_special_points(job: &JobSpec) -> Vec<f64> {
    let mut special: Vec<f64> = job.weight.points.clone();
    for e in &job.weight.exprs {
        special.extend(e.overrides().iter().map(|&(p, _)| p));
    }
    if let Some(f) = &job.function {
        for e in &f.exprs {
            special.extend(e.overrides().iter().map(|&(p, _)| p));
        }
    }
    special.retain(|p| job.interval.contains(*p));
    special.sort_by(f64::total_cmp);
    special.dedup();
    special
}

fn explicit_grid(job: &JobSpec, cfg: &RunConfig) -> Result<Option<Grid>, RunFailure> {
    if job.grid.is_none() && cfg.grid_n.is_none() {
        return Ok(None);
    }
    let (n, tag) = job.grid.unwrap_or((4097, SchemeTag::RefinedNear));
    let n = cfg.grid_n.unwrap_or(n);
    let scheme = match tag {
        SchemeTag::Uniform => GridScheme::Uniform,
        SchemeTag::Chebyshev => GridScheme::Chebyshev,
        SchemeTag::RefinedNear => GridScheme::RefinedNear {
            delta0: job.interval.len() / 8.0,
            levels: 12,
        },
    };
    let special = shared_special_points(job);
    make_grid(job.interval, n, scheme, &special)
        .map(Some)
        .map_err(|e| RunFailure::Validation(e.to_string()))
}

fn approx_opts(job: &JobSpec, cfg: &RunConfig) -> Result<ApproxOpts, RunFailure> {
    let mut th = Thresholds::default();
    if let Some(tz) = cfg.tol_zero {
        th.tol_zero = tz;
    }
    Ok(ApproxOpts {
        engine: job.task.engine,
        max_degree: job.task.max_degree,
        grid: explicit_grid(job, cfg)?,
        params: EssLimitParams::default(),
        thresholds: th,
        lawson_iters: 6,
    })
}

pub fn run_job(job: &JobSpec, cfg: &RunConfig) -> Result<(), RunFailure> {
    match job.task.kind {
        TaskKind::Classify => run_classify(job, cfg),
        TaskKind::Member => run_member(job, cfg),
        TaskKind::Approx => run_approx(job, cfg),
        TaskKind::Converge => run_converge(job, cfg),
        TaskKind::Psi => run_psi(job, cfg),
    }
}

fn classify_all(
    cfg: &RunConfig,
    weights: &[ScalarWeight],
) -> Result<Vec<SingularityReport>, RunFailure> {
    let params = EssLimitParams::default();
    let mut th = Thresholds::default();
    if let Some(tz) = cfg.tol_zero {
        th.tol_zero = tz;
    }
    weights
        .iter()
        .map(|w| {
            classify_weight(w, &params, &th)
                .map_err(|e| RunFailure::WeightInvalid(e.to_string()))
        })
        .collect()
}

fn run_classify(job: &JobSpec, cfg: &RunConfig) -> Result<(), RunFailure> {
    let weights = build_weights(job)?;
    let reports = classify_all(cfg, &weights)?;
    let out = if reports.len() == 1 {
        csv::classification_csv(&reports[0])
    } else {
        let mut s =
            String::from("component,point,side,class,liminf_est,limsup_est,converged\n");
        for (j, r) in reports.iter().enumerate() {
            for line in csv::classification_csv(r).lines().skip(1) {
                s.push_str(&format!("{j},{line}\n"));
            }
        }
        s
    };
    write_file(&job.task.out, &out)
}

fn run_member(job: &JobSpec, cfg: &RunConfig) -> Result<(), RunFailure> {
    let weights = build_weights(job)?;
    let w = build_vector_weight(job, weights);
    let fs = &job.function.as_ref().expect("validated").exprs;
    let tol = cfg.tol_limit.unwrap_or(wapprox::membership::DEFAULT_MEMBERSHIP_TOL);
    let params = EssLimitParams::default();
    let mut th = Thresholds::default();
    if let Some(tz) = cfg.tol_zero {
        th.tol_zero = tz;
    }
    let verdict = check_vector_membership(fs, &w, tol, &params, &th)
        .map_err(|e| RunFailure::Validation(e.to_string()))?;
    write_file(&job.task.out, &csv::vector_verdict_csv(&verdict))?;
    if cfg.explain {
        explain_verdict(&verdict);
    }
    if verdict.member {
        Ok(())
    } else {
        Err(RunFailure::NonMember)
    }
}

fn explain_verdict(v: &wapprox::membership::VectorVerdict) {
    for (j, cv) in v.component_verdicts.iter().enumerate() {
        println!(
            "component {j}: {}",
            if cv.member { "member" } else { "non-member" }
        );
        println!(
            "  weighted norm estimate {} ({})",
            csv::fmt_f64(cv.weighted_norm_est),
            if cv.finite_norm { "finite" } else { "infinite" }
        );
        for c in &cv.conditions {
            println!(
                "  {} at {} ({}): measured {} vs tol {} -> {}{}",
                c.kind,
                csv::fmt_f64(c.point),
                c.side,
                csv::fmt_f64(c.measured),
                csv::fmt_f64(c.tolerance),
                if c.pass { "pass" } else { "fail" },
                if c.low_confidence {
                    " (low confidence)"
                } else {
                    ""
                }
            );
        }
        for jump in &cv.suspicious_jumps {
            println!(
                "  suspicious jump near {} (size {})",
                csv::fmt_f64(jump.location),
                csv::fmt_f64(jump.magnitude)
            );
        }
    }
    println!(
        "verdict: {}",
        if v.member { "member" } else { "non-member" }
    );
}

fn sibling_with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_os_string();
    s.push(suffix);
    PathBuf::from(s)
}

fn run_approx(job: &JobSpec, cfg: &RunConfig) -> Result<(), RunFailure> {
    let weights = build_weights(job)?;
    let w = build_vector_weight(job, weights);
    let f = build_vector_function(job)?;
    let eps = job.task.epsilon.expect("validated");
    let opts = approx_opts(job, cfg)?;
    let (vp, cert) = approx_vector(&f, &w, eps, &opts).map_err(vector_failure)?;
    write_file(
        &sibling_with_suffix(&job.task.out, ".poly.csv"),
        &csv::polynomial_csv(&vp.components),
    )?;
    write_file(
        &sibling_with_suffix(&job.task.out, ".cert.csv"),
        &csv::certificate_csv(&cert),
    )
}

fn run_converge(job: &JobSpec, cfg: &RunConfig) -> Result<(), RunFailure> {
    let weights = build_weights(job)?;
    let fs = &job.function.as_ref().expect("validated").exprs;
    let eps = job.task.epsilon.expect("validated");
    let mut opts = approx_opts(job, cfg)?;
    if opts.grid.is_none() {
        let special = shared_special_points(job);
        let grid = Grid::default_refined(job.interval, &special)
            .map_err(|e| RunFailure::Validation(e.to_string()))?;
        opts.grid = Some(grid);
    }
    let grid = opts.grid.clone().expect("set above");

    // per-component polynomial at each schedule degree, no early stop
    let mut sweeps: Vec<Vec<(usize, Polynomial)>> = Vec::with_capacity(fs.len());
    for (fj, wj) in fs.iter().zip(&weights) {
        let sweep = sweep_polynomials(fj, wj, eps, &opts).map_err(approx_failure)?;
        sweeps.push(sweep);
    }
    let degrees: Vec<usize> = sweeps[0].iter().map(|&(n, _)| n).collect();
    let vf = VectorFunction::finite(fs.clone());
    let vw = VectorWeight::finite(weights.clone());

    let mut out = String::from("degree");
    for j in 0..fs.len() {
        out.push_str(&format!(",err{j}"));
    }
    out.push_str(",total\n");
    for (k, &deg) in degrees.iter().enumerate() {
        out.push_str(&format!("{deg}"));
        let polys: Vec<Polynomial> = sweeps.iter().map(|s| s[k].1.clone()).collect();
        for ((fj, wj), pj) in fs.iter().zip(&weights).zip(&polys) {
            let e = weighted_sup_error(fj, pj, wj, &grid)
                .map_err(|e| RunFailure::Validation(e.to_string()))?;
            out.push_str(&format!(",{}", csv::fmt_f64(e)));
        }
        let total = residual_g_norm(&vf, &polys, &vw, &grid)
            .map_err(|e| RunFailure::Validation(e.to_string()))?;
        out.push_str(&format!(",{}\n", csv::fmt_f64(total)));
    }
    write_file(&job.task.out, &out)
}

fn run_psi(job: &JobSpec, cfg: &RunConfig) -> Result<(), RunFailure> {
    let weights = build_weights(job)?;
    let fs = &job.function.as_ref().expect("validated").exprs;
    let eps = job.task.epsilon.expect("validated");
    let opts = approx_opts(job, cfg)?;
    let mut out = String::from(
        "component,degree,unweighted_error,weighted_error,isometry_gap\n",
    );
    for (j, (fj, wj)) in fs.iter().zip(&weights).enumerate() {
        let r = divide_out_approx(fj, wj, eps, &opts).map_err(approx_failure)?;
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            j,
            r.degree,
            csv::fmt_f64(r.unweighted_error),
            csv::fmt_f64(r.weighted_error),
            csv::fmt_f64(r.isometry_gap)
        ));
    }
    write_file(&job.task.out, &out)
}
