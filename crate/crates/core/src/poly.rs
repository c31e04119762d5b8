//! Polynomials over a compact interval in monomial, Chebyshev, or
//! Bernstein basis, plus the Bernstein and Chebyshev construction
//! engines.
//!
//! Evaluation never converts between bases: Chebyshev uses Clenshaw
//! recursion on the mapped variable, Bernstein uses de Casteljau.

use std::f64::consts::PI;

use crate::expr::FuncExpr;
use crate::grid::Interval;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    Monomial,
    /// Chebyshev polynomials of the mapped variable `s = (2x-lo-hi)/(hi-lo)`.
    ChebyshevOnInterval,
    /// Bernstein basis of degree `coeffs.len() - 1` on the interval.
    Bernstein,
}

impl Basis {
    pub fn name(&self) -> &'static str {
        match self {
            Basis::Monomial => "monomial",
            Basis::ChebyshevOnInterval => "chebyshev",
            Basis::Bernstein => "bernstein",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    interval: Interval,
    basis: Basis,
    coeffs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("function not finite at construction node {at} (value {value})")]
    NodeValue { at: f64, value: f64 },
    #[error("function evaluation failed at construction node: {0}")]
    NodeEval(#[from] crate::ext::DomainError),
    #[error("polynomial needs at least one coefficient")]
    Empty,
}

impl Polynomial {
    pub fn new(interval: Interval, basis: Basis, coeffs: Vec<f64>) -> Result<Self, EngineError> {
        if coeffs.is_empty() {
            return Err(EngineError::Empty);
        }
        Ok(Polynomial {
            interval,
            basis,
            coeffs,
        })
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self.basis {
            Basis::Monomial => {
                let mut acc = 0.0;
                for &c in self.coeffs.iter().rev() {
                    acc = acc * x + c;
                }
                acc
            }
            Basis::ChebyshevOnInterval => {
                let s = (2.0 * x - self.interval.lo() - self.interval.hi())
                    / self.interval.len();
                clenshaw(&self.coeffs, s)
            }
            Basis::Bernstein => {
                let s = (x - self.interval.lo()) / self.interval.len();
                de_casteljau(&self.coeffs, s)
            }
        }
    }
}

fn clenshaw(coeffs: &[f64], s: f64) -> f64 {
    let n = coeffs.len();
    if n == 1 {
        return coeffs[0];
    }
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for &c in coeffs.iter().skip(1).rev() {
        let tmp = b1;
        b1 = 2.0 * s * b1 - b2 + c;
        b2 = tmp;
    }
    coeffs[0] + s * b1 - b2
}

fn de_casteljau(coeffs: &[f64], s: f64) -> f64 {
    let mut vals = coeffs.to_vec();
    let s1 = 1.0 - s;
    for level in (1..vals.len()).rev() {
        for j in 0..level {
            vals[j] = s1 * vals[j] + s * vals[j + 1];
        }
    }
    vals[0]
}

fn finite_node_value(f: &FuncExpr, x: f64) -> Result<f64, EngineError> {
    let v = f.eval(x)?;
    if !v.is_finite() {
        return Err(EngineError::NodeValue { at: x, value: v });
    }
    Ok(v)
}

/// The degree-`n` Bernstein polynomial of `f`: coefficients are the
/// values of `f` at the `n+1` equispaced nodes.
pub fn bernstein_approx(f: &FuncExpr, i: Interval, n: usize) -> Result<Polynomial, EngineError> {
    let mut coeffs = Vec::with_capacity(n + 1);
    if n == 0 {
        coeffs.push(finite_node_value(f, i.lo())?);
    } else {
        for k in 0..=n {
            let x = i.lo() + i.len() * k as f64 / n as f64;
            coeffs.push(finite_node_value(f, x)?);
        }
    }
    Polynomial::new(i, Basis::Bernstein, coeffs)
}

/// Chebyshev interpolant of degree `n` through the Chebyshev points of
/// the second kind mapped to the interval (degree 0 uses the midpoint).
pub fn chebyshev_interp(f: &FuncExpr, i: Interval, n: usize) -> Result<Polynomial, EngineError> {
    if n == 0 {
        let v = finite_node_value(f, i.midpoint())?;
        return Polynomial::new(i, Basis::ChebyshevOnInterval, vec![v]);
    }
    let mid = i.midpoint();
    let half = 0.5 * i.len();
    let mut vals = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let s = (PI * j as f64 / n as f64).cos();
        // pin the endpoints so interval arithmetic is exact
        let x = if j == 0 {
            i.hi()
        } else if j == n {
            i.lo()
        } else {
            mid + half * s
        };
        vals.push(finite_node_value(f, x)?);
    }
    // Discrete cosine transform of the node values (trapezoid weights at
    // the two ends), then halve the first and last coefficients.
    let mut coeffs = vec![0.0; n + 1];
    for (k, ck) in coeffs.iter_mut().enumerate() {
        let mut acc = 0.5 * (vals[0] + if k % 2 == 0 { vals[n] } else { -vals[n] });
        for (j, &vj) in vals.iter().enumerate().take(n).skip(1) {
            acc += vj * (PI * (k * j) as f64 / n as f64).cos();
        }
        *ck = 2.0 * acc / n as f64;
    }
    coeffs[0] *= 0.5;
    coeffs[n] *= 0.5;
    Polynomial::new(i, Basis::ChebyshevOnInterval, coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;

    fn unit() -> Interval {
        Interval::new(0.0, 1.0).unwrap()
    }

    fn sym() -> Interval {
        Interval::new(-1.0, 1.0).unwrap()
    }

    #[test]
    fn bernstein_reproduces_constants() {
        let f = parse_expr("3.5 + 0*x").unwrap();
        for n in [1, 2, 5, 10] {
            let p = bernstein_approx(&f, unit(), n).unwrap();
            for k in 0..=100 {
                let x = k as f64 / 100.0;
                assert!((p.eval(x) - 3.5).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn bernstein_reproduces_affine() {
        let f = parse_expr("x").unwrap();
        for n in [1, 2, 5, 10, 50] {
            let p = bernstein_approx(&f, unit(), n).unwrap();
            for k in 0..=100 {
                let x = k as f64 / 100.0;
                assert!((p.eval(x) - x).abs() < 1e-12, "n={n} x={x}");
            }
        }
    }

    #[test]
    fn bernstein_square_matches_direct_sum_oracle() {
        // independent oracle: direct summation of the defining sum
        fn direct(n: usize, x: f64) -> f64 {
            let s = x; // interval [0,1]
            let mut acc = 0.0;
            for k in 0..=n {
                let node = k as f64 / n as f64;
                let mut binom = 1.0;
                for j in 0..k {
                    binom *= (n - j) as f64 / (j + 1) as f64;
                }
                acc += node * node
                    * binom
                    * s.powi(k as i32)
                    * (1.0 - s).powi((n - k) as i32);
            }
            acc
        }
        let f = parse_expr("x^2").unwrap();
        let p = bernstein_approx(&f, unit(), 10).unwrap();
        let direct_val = direct(10, 0.5);
        assert!((direct_val - 0.275).abs() < 1e-13);
        assert!((p.eval(0.5) - 0.275).abs() < 1e-13);
        // variance identity x^2 + x(1-x)/n at a few more points
        for n in [1, 2, 5, 10] {
            let p = bernstein_approx(&f, unit(), n).unwrap();
            for k in 0..=20 {
                let x = k as f64 / 20.0;
                let want = x * x + x * (1.0 - x) / n as f64;
                assert!((p.eval(x) - want).abs() < 1e-12, "n={n} x={x}");
                assert!((direct(n, x) - want).abs() < 1e-12, "oracle n={n} x={x}");
            }
        }
    }

    #[test]
    fn bernstein_rejects_infinite_node() {
        let f = parse_expr("1/abs(x)").unwrap();
        let err = bernstein_approx(&f, sym(), 2).unwrap_err();
        assert!(matches!(err, EngineError::NodeValue { .. }));
    }

    #[test]
    fn chebyshev_reproduces_cubic() {
        let f = parse_expr("x^3").unwrap();
        let p = chebyshev_interp(&f, sym(), 3).unwrap();
        for k in 0..=1000 {
            let x = -1.0 + 2.0 * k as f64 / 1000.0;
            assert!((p.eval(x) - x * x * x).abs() < 1e-12, "x={x}");
        }
    }

    #[test]
    fn chebyshev_abs_error_small() {
        // dense-grid oracle with 1e5 probe points
        let f = parse_expr("abs(x)").unwrap();
        let p = chebyshev_interp(&f, sym(), 64).unwrap();
        let mut sup: f64 = 0.0;
        for k in 0..=100_000 {
            let x = -1.0 + 2.0 * k as f64 / 100_000.0;
            sup = sup.max((p.eval(x) - x.abs()).abs());
        }
        assert!(sup < 0.05, "sup={sup}");
    }

    #[test]
    fn chebyshev_exp_error_tiny() {
        let f = parse_expr("exp(x)").unwrap();
        let p = chebyshev_interp(&f, sym(), 16).unwrap();
        let mut sup: f64 = 0.0;
        for k in 0..=10_000 {
            let x = -1.0 + 2.0 * k as f64 / 10_000.0;
            sup = sup.max((p.eval(x) - x.exp()).abs());
        }
        assert!(sup < 1e-10, "sup={sup}");
    }

    #[test]
    fn chebyshev_interpolates_at_nodes() {
        let f = parse_expr("sin(3*x)").unwrap();
        let n = 12;
        let p = chebyshev_interp(&f, Interval::new(0.25, 2.0).unwrap(), n).unwrap();
        for j in 0..=n {
            let s = (PI * j as f64 / n as f64).cos();
            let x = 1.125 + 0.875 * s;
            assert!((p.eval(x) - (3.0 * x).sin()).abs() < 1e-12);
        }
    }
}
