//! Job file loading and validation.
//!
//! The format is line-based: top-level `interval = <lo> <hi>` and
//! optional `grid = <n> <scheme>`, then `[weight]`, `[function]`, and
//! `[task]` sections of `key = value` lines. Blank lines and lines
//! starting with `#` are ignored.

use std::path::PathBuf;

use wapprox::{parse_expr, EngineChoice, FuncExpr, Interval};

#[derive(Debug)]
pub enum JobError {
    Io(std::io::Error),
    /// Message names the offending section, key, and line when known.
    Validation(String),
}

impl std::fmt::Display for JobError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            JobError::Io(e) => write!(f, "io error: {e}"),
            JobError::Validation(m) => write!(f, "validation error: {m}"),
        }
    }
}

impl From<std::io::Error> for JobError {
    fn from(e: std::io::Error) -> Self {
        JobError::Io(e)
    }
}

fn invalid(msg: impl Into<String>) -> JobError {
    JobError::Validation(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaskKind {
    Classify,
    Member,
    Approx,
    Converge,
    Psi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeTag {
    Uniform,
    Chebyshev,
    RefinedNear,
}

#[derive(Debug, Default)]
pub struct WeightSection {
    pub exprs: Vec<FuncExpr>,
    pub points: Vec<f64>,
    /// `tail = C r`; the tail esssup bound is `C * r^(N+1)` (`r = 1`
    /// declares a flat tail).
    pub tail: Option<(f64, f64)>,
}

#[derive(Debug, Default)]
pub struct FunctionSection {
    pub exprs: Vec<FuncExpr>,
    /// `tail = C r` with `0 <= r < 1`: the coordinate decay certificate.
    pub tail: Option<(f64, f64)>,
}

#[derive(Debug)]
pub struct TaskSection {
    pub kind: TaskKind,
    pub epsilon: Option<f64>,
    pub max_degree: usize,
    pub engine: EngineChoice,
    pub out: PathBuf,
}

#[derive(Debug)]
pub struct JobSpec {
    pub interval: Interval,
    pub grid: Option<(usize, SchemeTag)>,
    pub weight: WeightSection,
    pub function: Option<FunctionSection>,
    pub task: TaskSection,
}

#[derive(PartialEq, Clone, Copy)]
enum Section {
    Top,
    Weight,
    Function,
    Task,
}

struct RawKv {
    line_no: usize,
    key: String,
    value: String,
}

pub fn load_job(path: &std::path::Path) -> Result<JobSpec, JobError> {
    let text = std::fs::read_to_string(path)?;
    parse_job(&text)
}

pub fn parse_job(text: &str) -> Result<JobSpec, JobError> {
    let mut section = Section::Top;
    let mut top: Vec<RawKv> = Vec::new();
    let mut weight: Vec<RawKv> = Vec::new();
    let mut function: Vec<RawKv> = Vec::new();
    let mut function_present = false;
    let mut task: Vec<RawKv> = Vec::new();
    let mut task_present = false;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match line {
            "[weight]" => {
                section = Section::Weight;
                continue;
            }
            "[function]" => {
                section = Section::Function;
                function_present = true;
                continue;
            }
            "[task]" => {
                section = Section::Task;
                task_present = true;
                continue;
            }
            _ => {}
        }
        if line.starts_with('[') {
            return Err(invalid(format!("line {line_no}: unknown section {line}")));
        }
        let Some(eq) = line.find('=') else {
            return Err(invalid(format!(
                "line {line_no}: expected `key = value`, got `{line}`"
            )));
        };
        let kv = RawKv {
            line_no,
            key: line[..eq].trim().to_string(),
            value: line[eq + 1..].trim().to_string(),
        };
        match section {
            Section::Top => top.push(kv),
            Section::Weight => weight.push(kv),
            Section::Function => function.push(kv),
            Section::Task => task.push(kv),
        }
    }

    let (interval, grid) = parse_top(&top)?;
    let weight = parse_weight_section(&weight, interval)?;
    let function = if function_present {
        Some(parse_function_section(&function)?)
    } else {
        None
    };
    if !task_present {
        return Err(invalid("[task] section missing"));
    }
    let task = parse_task_section(&task)?;
    let job = JobSpec {
        interval,
        grid,
        weight,
        function,
        task,
    };
    cross_validate(&job)?;
    Ok(job)
}

fn parse_f64(section: &str, key: &str, line_no: usize, v: &str) -> Result<f64, JobError> {
    v.parse().map_err(|_| {
        invalid(format!(
            "[{section}].{key} (line {line_no}): `{v}` is not a number"
        ))
    })
}

fn parse_top(kvs: &[RawKv]) -> Result<(Interval, Option<(usize, SchemeTag)>), JobError> {
    let mut interval = None;
    let mut grid = None;
    for kv in kvs {
        match kv.key.as_str() {
            "interval" => {
                let parts: Vec<&str> = kv.value.split_whitespace().collect();
                if parts.len() != 2 {
                    return Err(invalid(format!(
                        "interval (line {}): expected `<lo> <hi>`",
                        kv.line_no
                    )));
                }
                let lo = parse_f64("top", "interval", kv.line_no, parts[0])?;
                let hi = parse_f64("top", "interval", kv.line_no, parts[1])?;
                interval = Some(Interval::new(lo, hi).map_err(|e| {
                    invalid(format!("interval (line {}): {e}", kv.line_no))
                })?);
            }
            "grid" => {
                let parts: Vec<&str> = kv.value.split_whitespace().collect();
                if parts.len() != 2 {
                    return Err(invalid(format!(
                        "grid (line {}): expected `<n> <scheme>`",
                        kv.line_no
                    )));
                }
                let n: usize = parts[0].parse().map_err(|_| {
                    invalid(format!(
                        "grid (line {}): `{}` is not a count",
                        kv.line_no, parts[0]
                    ))
                })?;
                let scheme = match parts[1] {
                    "uniform" => SchemeTag::Uniform,
                    "chebyshev" => SchemeTag::Chebyshev,
                    "refined-near" | "refined" => SchemeTag::RefinedNear,
                    other => {
                        return Err(invalid(format!(
                            "grid (line {}): unknown scheme `{other}`",
                            kv.line_no
                        )))
                    }
                };
                grid = Some((n, scheme));
            }
            other => {
                return Err(invalid(format!(
                    "line {}: unknown top-level key `{other}`",
                    kv.line_no
                )))
            }
        }
    }
    let interval = interval.ok_or_else(|| invalid("top-level `interval` missing"))?;
    Ok((interval, grid))
}

fn parse_component_exprs(
    section: &str,
    prefix: char,
    kvs: &[RawKv],
) -> Result<Vec<FuncExpr>, JobError> {
    let mut indexed: Vec<(usize, &RawKv)> = Vec::new();
    for kv in kvs {
        if let Some(rest) = kv.key.strip_prefix(prefix) {
            if let Ok(idx) = rest.parse::<usize>() {
                indexed.push((idx, kv));
                continue;
            }
        }
    }
    indexed.sort_by_key(|&(i, _)| i);
    let mut out = Vec::with_capacity(indexed.len());
    for (want, (idx, kv)) in indexed.iter().enumerate() {
        if *idx != want {
            return Err(invalid(format!(
                "[{section}].{prefix}{want} missing (components must be contiguous from 0)"
            )));
        }
        let expr = parse_expr(&kv.value).map_err(|e| {
            invalid(format!(
                "[{section}].{} (line {}): {e}",
                kv.key, kv.line_no
            ))
        })?;
        out.push(expr);
    }
    Ok(out)
}

fn parse_tail(section: &str, kv: &RawKv) -> Result<(f64, f64), JobError> {
    let parts: Vec<&str> = kv.value.split_whitespace().collect();
    if parts.len() != 2 {
        return Err(invalid(format!(
            "[{section}].tail (line {}): expected `C r`",
            kv.line_no
        )));
    }
    let c = parse_f64(section, "tail", kv.line_no, parts[0])?;
    let r = parse_f64(section, "tail", kv.line_no, parts[1])?;
    Ok((c, r))
}

fn parse_weight_section(kvs: &[RawKv], interval: Interval) -> Result<WeightSection, JobError> {
    let mut out = WeightSection {
        exprs: parse_component_exprs("weight", 'w', kvs)?,
        ..Default::default()
    };
    for kv in kvs {
        match kv.key.as_str() {
            "points" => {
                for tok in kv.value.split_whitespace() {
                    let p = parse_f64("weight", "points", kv.line_no, tok)?;
                    if !interval.contains(p) {
                        return Err(invalid(format!(
                            "[weight].points (line {}): point {p} outside interval",
                            kv.line_no
                        )));
                    }
                    out.points.push(p);
                }
            }
            "tail" => {
                let (c, r) = parse_tail("weight", kv)?;
                if !(c >= 0.0) || !(0.0..=1.0).contains(&r) {
                    return Err(invalid(format!(
                        "[weight].tail (line {}): need C >= 0 and 0 <= r <= 1",
                        kv.line_no
                    )));
                }
                out.tail = Some((c, r));
            }
            k if k
                .strip_prefix('w')
                .is_some_and(|r| r.parse::<usize>().is_ok()) => {}
            other => {
                return Err(invalid(format!(
                    "[weight].{other} (line {}): unknown key",
                    kv.line_no
                )))
            }
        }
    }
    if out.exprs.is_empty() {
        return Err(invalid("[weight].w0 missing"));
    }
    Ok(out)
}

fn parse_function_section(kvs: &[RawKv]) -> Result<FunctionSection, JobError> {
    let mut out = FunctionSection {
        exprs: parse_component_exprs("function", 'f', kvs)?,
        ..Default::default()
    };
    for kv in kvs {
        match kv.key.as_str() {
            "tail" => {
                let (c, r) = parse_tail("function", kv)?;
                if !(c > 0.0) || !(0.0..1.0).contains(&r) {
                    return Err(invalid(format!(
                        "[function].tail (line {}): need C > 0 and 0 <= r < 1",
                        kv.line_no
                    )));
                }
                out.tail = Some((c, r));
            }
            k if k
                .strip_prefix('f')
                .is_some_and(|r| r.parse::<usize>().is_ok()) => {}
            other => {
                return Err(invalid(format!(
                    "[function].{other} (line {}): unknown key",
                    kv.line_no
                )))
            }
        }
    }
    if out.exprs.is_empty() {
        return Err(invalid("[function].f0 missing"));
    }
    Ok(out)
}

fn parse_task_section(kvs: &[RawKv]) -> Result<TaskSection, JobError> {
    let mut kind = None;
    let mut epsilon = None;
    let mut max_degree = 512usize;
    let mut engine = EngineChoice::Auto;
    let mut out = None;
    for kv in kvs {
        match kv.key.as_str() {
            "kind" => {
                kind = Some(match kv.value.as_str() {
                    "classify" => TaskKind::Classify,
                    "member" => TaskKind::Member,
                    "approx" => TaskKind::Approx,
                    "converge" => TaskKind::Converge,
                    "psi" => TaskKind::Psi,
                    other => {
                        return Err(invalid(format!(
                            "[task].kind (line {}): unknown kind `{other}`",
                            kv.line_no
                        )))
                    }
                });
            }
            "epsilon" => {
                let e = parse_f64("task", "epsilon", kv.line_no, &kv.value)?;
                if !(e > 0.0) {
                    return Err(invalid(format!(
                        "[task].epsilon (line {}): must be positive",
                        kv.line_no
                    )));
                }
                epsilon = Some(e);
            }
            "max_degree" => {
                max_degree = kv.value.parse().map_err(|_| {
                    invalid(format!(
                        "[task].max_degree (line {}): `{}` is not a count",
                        kv.line_no, kv.value
                    ))
                })?;
            }
            "engine" => {
                engine = EngineChoice::parse(&kv.value).ok_or_else(|| {
                    invalid(format!(
                        "[task].engine (line {}): unknown engine `{}`",
                        kv.line_no, kv.value
                    ))
                })?;
            }
            "out" => out = Some(PathBuf::from(&kv.value)),
            other => {
                return Err(invalid(format!(
                    "[task].{other} (line {}): unknown key",
                    kv.line_no
                )))
            }
        }
    }
    let kind = kind.ok_or_else(|| invalid("[task].kind missing"))?;
    let out = out.ok_or_else(|| invalid("[task].out missing"))?;
    Ok(TaskSection {
        kind,
        epsilon,
        max_degree,
        engine,
        out,
    })
}

fn cross_validate(job: &JobSpec) -> Result<(), JobError> {
    let needs_function = matches!(
        job.task.kind,
        TaskKind::Member | TaskKind::Approx | TaskKind::Converge | TaskKind::Psi
    );
    if needs_function {
        let f = job
            .function
            .as_ref()
            .ok_or_else(|| invalid("[function] section missing for this task"))?;
        if f.exprs.len() != job.weight.exprs.len() {
            return Err(invalid(format!(
                "component counts differ: {} functions vs {} weights",
                f.exprs.len(),
                job.weight.exprs.len()
            )));
        }
    }
    if matches!(
        job.task.kind,
        TaskKind::Approx | TaskKind::Converge | TaskKind::Psi
    ) && job.task.epsilon.is_none()
    {
        return Err(invalid("[task].epsilon missing"));
    }
    Ok(())
}
