//! Compact intervals, probe grids, and sampling.

use std::f64::consts::PI;

use crate::expr::FuncExpr;
use crate::ext::DomainError;
use thiserror::Error;

/// A compact nondegenerate interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error("interval requires lo < hi, got [{lo}, {hi}]")]
    DegenerateInterval { lo: f64, hi: f64 },
    #[error("grid requires at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("special point {point} outside interval [{lo}, {hi}]")]
    SpecialPointOutside { point: f64, lo: f64, hi: f64 },
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self, GridError> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(GridError::DegenerateInterval { lo, hi });
        }
        Ok(Interval { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, t: f64) -> bool {
        self.lo <= t && t <= self.hi
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

/// Construction scheme for probe grids.
#[derive(Debug, Clone, PartialEq)]
pub enum GridScheme {
    Uniform,
    Chebyshev,
    /// Uniform base plus, around each special point `a`, the offsets
    /// `a ± delta0 * 2^-k` for `k = 0..=levels` (clipped, deduplicated).
    RefinedNear { delta0: f64, levels: usize },
}

/// Base resolution of the default probe grid.
pub const DEFAULT_GRID_N: usize = 4097;
/// Cascade depth of the default probe grid.
pub const DEFAULT_GRID_LEVELS: usize = 12;

/// A strictly increasing point set spanning the interval.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    interval: Interval,
    points: Vec<f64>,
    scheme: GridScheme,
}

impl Grid {
    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn scheme(&self) -> &GridScheme {
        &self.scheme
    }

    /// The default evaluation grid: 4097 uniform points refined near the
    /// given special points with `delta0 = len/8` and 12 cascade levels.
    pub fn default_refined(interval: Interval, special: &[f64]) -> Result<Grid, GridError> {
        make_grid(
            interval,
            DEFAULT_GRID_N,
            GridScheme::RefinedNear {
                delta0: interval.len() / 8.0,
                levels: DEFAULT_GRID_LEVELS,
            },
            special,
        )
    }
}

/// Builds a grid over `interval` with `n >= 2` base points.
///
/// Special points must lie inside the interval; only the refined-near
/// scheme inserts them (with their cascades).
pub fn make_grid(
    interval: Interval,
    n: usize,
    scheme: GridScheme,
    special: &[f64],
) -> Result<Grid, GridError> {
    if n < 2 {
        return Err(GridError::TooFewPoints(n));
    }
    for &p in special {
        if !interval.contains(p) {
            return Err(GridError::SpecialPointOutside {
                point: p,
                lo: interval.lo,
                hi: interval.hi,
            });
        }
    }
    let (lo, hi) = (interval.lo, interval.hi);
    let mut pts: Vec<f64> = Vec::new();
    match &scheme {
        GridScheme::Uniform | GridScheme::RefinedNear { .. } => {
            let step = interval.len() / (n - 1) as f64;
            for k in 0..n {
                pts.push(lo + step * k as f64);
            }
        }
        GridScheme::Chebyshev => {
            // Chebyshev points of the second kind, mapped and ascending.
            let mid = interval.midpoint();
            let half = 0.5 * interval.len();
            let m = n - 1;
            for k in 0..n {
                pts.push(mid - half * (PI * k as f64 / m as f64).cos());
            }
        }
    }
    if let GridScheme::RefinedNear { delta0, levels } = &scheme {
        for &a in special {
            pts.push(a);
            for k in 0..=*levels {
                let off = delta0 * 2f64.powi(-(k as i32));
                for x in [a - off, a + off] {
                    if interval.contains(x) {
                        pts.push(x);
                    }
                }
            }
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    // Endpoints are present by construction for uniform/refined; the
    // chebyshev map can round them, so pin exactly.
    *pts.first_mut().unwrap() = lo;
    *pts.last_mut().unwrap() = hi;
    Ok(Grid {
        interval,
        points: pts,
        scheme,
    })
}

/// Grid values of a function; `±inf` entries are legal.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    pub grid: Grid,
    pub values: Vec<f64>,
}

/// Evaluates `e` at every grid point; domain errors carry the offending
/// point.
pub fn sample(e: &FuncExpr, g: &Grid) -> Result<SampledFunction, DomainError> {
    let mut values = Vec::with_capacity(g.points.len());
    for &t in &g.points {
        values.push(e.eval(t)?);
    }
    Ok(SampledFunction {
        grid: g.clone(),
        values,
    })
}
