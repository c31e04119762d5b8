// Negated comparisons like `!(eps > 0.0)` are deliberate: they reject
// NaN along with the out-of-range values, which `eps <= 0.0` would not.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Weighted uniform polynomial approximation on compact intervals.
//!
//! The crate provides, in dependency order:
//!
//! * [`expr`] — a small expression language for scalar functions with
//!   explicit point-value overrides, evaluated in extended-real
//!   arithmetic ([`ext`]);
//! * [`grid`] — probe grids with cascades refined near special points;
//! * [`weights`] — nonnegative weights, one-sided essential limit
//!   estimation, and the regular / type-1 / type-2 / type-3 singularity
//!   taxonomy;
//! * [`membership`] — whether a function lies in the closure of
//!   continuous (hence polynomial-approximable) functions under the
//!   weighted sup norm, condition by condition;
//! * [`poly`] + [`scalar_approx`] — Bernstein / Chebyshev / weighted
//!   minimax engines, the degree-sweep pipeline with bridge
//!   regularization near singular points, and the multiply-by-weight
//!   divide-out route for invertible weights;
//! * [`vector_approx`] — the Hilbert-space-valued layer: coordinatewise
//!   budgets, l^2 tail truncation, and certified vector approximants.

pub mod expr;
pub mod ext;
pub mod grid;
pub mod membership;
pub mod poly;
pub mod report;
pub mod scalar_approx;
pub mod vector_approx;
pub mod weights;

pub use expr::{parse_expr, Expr, FuncExpr, ParseError};
pub use ext::DomainError;
pub use grid::{make_grid, sample, Grid, GridError, GridScheme, Interval, SampledFunction};
pub use membership::{
    check_scalar_membership, check_vector_membership, ConditionKind, ConditionRecord,
    MembershipError, MembershipVerdict, VectorVerdict,
};
pub use poly::{bernstein_approx, chebyshev_interp, Basis, EngineError, Polynomial};
pub use scalar_approx::{
    approx_scalar_weighted, degree_schedule, divide_out_approx, regularize_near_singularities,
    sweep_polynomials, weighted_sup_error, ApproxError, ApproxOpts, ApproxResult,
    DivideOutResult, EngineChoice, RegularizeError,
};
pub use vector_approx::{
    allocate_budgets, approx_vector, choose_truncation, infinite_budget_factor,
    parseval_crosscheck, residual_g_norm, weighted_g_norm, ApproxCertificate, BoundFormula,
    FunctionDim, TailCertificate, VectorApproxError, VectorFunction, VectorPolynomial,
};
pub use weights::{
    check_bounded, check_bounded_with_report, classify_point, classify_weight,
    ess_limits_one_sided, invert_weight, BoundednessCheck, EssLimitParams, LimitError,
    PointClassification, PointReport, ProbeOrigin, ScalarWeight, Side, SideClass,
    SideLimitEstimate, SingClass, SingularityReport, Thresholds, VectorWeight, WeightDim,
    WeightError, WindowStat,
};
