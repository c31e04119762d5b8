//! Extended-real arithmetic.
//!
//! Values are plain `f64` where `+inf`/`-inf` are legal and NaN is not.
//! The conventions differ from IEEE in exactly the places the weighted
//! sup norm needs them:
//!
//! * `0 * (±inf) = 0`
//! * `x / 0 = sign(x) * inf` for `x != 0`, while `0 / 0` is a domain error
//! * `inf - inf` (and `inf / inf`) are domain errors rather than NaN
//!
//! Every arithmetic path in expression evaluation and norm computation
//! goes through these functions so that NaN can never escape.

use thiserror::Error;

/// An ill-posed operation at a specific point of the domain.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("evaluation domain error at {at}: {op}")]
pub struct DomainError {
    /// The evaluation point that triggered the error.
    pub at: f64,
    /// Short description of the offending operation.
    pub op: String,
}

fn domain(at: f64, op: impl Into<String>) -> DomainError {
    DomainError { at, op: op.into() }
}

/// Addition; `inf + (-inf)` is a domain error.
pub fn xadd(a: f64, b: f64, at: f64) -> Result<f64, DomainError> {
    if a.is_infinite() && b.is_infinite() && a.signum() != b.signum() {
        return Err(domain(at, "inf - inf"));
    }
    Ok(a + b)
}

/// Subtraction; `inf - inf` is a domain error.
pub fn xsub(a: f64, b: f64, at: f64) -> Result<f64, DomainError> {
    if a.is_infinite() && b.is_infinite() && a.signum() == b.signum() {
        return Err(domain(at, "inf - inf"));
    }
    Ok(a - b)
}

/// Multiplication with the convention `0 * (±inf) = 0`.
pub fn xmul(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        0.0
    } else {
        a * b
    }
}

/// Division; `x / 0 = sign(x) * inf` for `x != 0`, `0 / 0` and
/// `inf / inf` are domain errors, `x / ±inf = 0` for finite `x`.
pub fn xdiv(a: f64, b: f64, at: f64) -> Result<f64, DomainError> {
    if b == 0.0 {
        return if a > 0.0 {
            Ok(f64::INFINITY)
        } else if a < 0.0 {
            Ok(f64::NEG_INFINITY)
        } else {
            Err(domain(at, "0 / 0"))
        };
    }
    if a.is_infinite() && b.is_infinite() {
        return Err(domain(at, "inf / inf"));
    }
    if b.is_infinite() {
        return Ok(0.0);
    }
    Ok(a / b)
}

/// Power with a real literal exponent.
///
/// Negative finite base with non-integer exponent is a domain error,
/// `0^0 = 1`, `0^e = +inf` for `e < 0` (the `x / 0` convention applied
/// to the reciprocal).
pub fn xpow(base: f64, expo: f64, at: f64) -> Result<f64, DomainError> {
    let expo_is_int = expo.fract() == 0.0 && expo.abs() < 2f64.powi(53);
    if base == 0.0 {
        return if expo > 0.0 {
            Ok(0.0)
        } else if expo == 0.0 {
            Ok(1.0)
        } else {
            Ok(f64::INFINITY)
        };
    }
    if base < 0.0 && !expo_is_int {
        return Err(domain(at, "negative base with non-integer exponent"));
    }
    if base == f64::NEG_INFINITY {
        if !expo_is_int {
            return Err(domain(at, "negative base with non-integer exponent"));
        }
        let odd = (expo.abs() % 2.0) == 1.0;
        return Ok(match (expo > 0.0, odd) {
            (true, true) => f64::NEG_INFINITY,
            (true, false) => f64::INFINITY,
            (false, _) => 0.0,
        });
    }
    // f64::powf handles inf^e, overflow to inf, and integer exponents of
    // negative finite bases correctly once the cases above are excluded.
    let v = base.powf(expo);
    debug_assert!(!v.is_nan());
    Ok(v)
}

/// Natural logarithm; `log(0) = -inf`, `log(x) ` for `x < 0` is a
/// domain error, `log(+inf) = +inf`.
pub fn xlog(a: f64, at: f64) -> Result<f64, DomainError> {
    if a < 0.0 {
        return Err(domain(at, "log of negative value"));
    }
    if a == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(a.ln())
}

/// Sine; infinite arguments are domain errors.
pub fn xsin(a: f64, at: f64) -> Result<f64, DomainError> {
    if a.is_infinite() {
        return Err(domain(at, "sin of infinite value"));
    }
    Ok(a.sin())
}

/// Cosine; infinite arguments are domain errors.
pub fn xcos(a: f64, at: f64) -> Result<f64, DomainError> {
    if a.is_infinite() {
        return Err(domain(at, "cos of infinite value"));
    }
    Ok(a.cos())
}

/// Sign function: -1, 0, or 1 (also for infinite arguments).
pub fn xsign(a: f64) -> f64 {
    if a > 0.0 {
        1.0
    } else if a < 0.0 {
        -1.0
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_times_infinity_is_zero() {
        assert_eq!(xmul(0.0, f64::INFINITY), 0.0);
        assert_eq!(xmul(f64::NEG_INFINITY, 0.0), 0.0);
        assert_eq!(xmul(2.0, 3.0), 6.0);
    }

    #[test]
    fn division_by_zero_is_signed_infinity() {
        assert_eq!(xdiv(1.0, 0.0, 0.0).unwrap(), f64::INFINITY);
        assert_eq!(xdiv(-2.0, 0.0, 0.0).unwrap(), f64::NEG_INFINITY);
        assert!(xdiv(0.0, 0.0, 0.0).is_err());
        assert!(xdiv(f64::INFINITY, f64::INFINITY, 0.0).is_err());
        assert_eq!(xdiv(1.0, f64::INFINITY, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn opposite_infinities_do_not_cancel() {
        assert!(xadd(f64::INFINITY, f64::NEG_INFINITY, 0.0).is_err());
        assert!(xsub(f64::INFINITY, f64::INFINITY, 0.0).is_err());
        assert_eq!(xadd(f64::INFINITY, 1.0, 0.0).unwrap(), f64::INFINITY);
    }

    #[test]
    fn power_conventions() {
        assert_eq!(xpow(0.0, 0.0, 0.0).unwrap(), 1.0);
        assert_eq!(xpow(0.0, -1.0, 0.0).unwrap(), f64::INFINITY);
        assert_eq!(xpow(0.0, 0.5, 0.0).unwrap(), 0.0);
        assert!(xpow(-2.0, 0.5, 0.0).is_err());
        assert_eq!(xpow(-2.0, 3.0, 0.0).unwrap(), -8.0);
        assert_eq!(xpow(f64::INFINITY, -1.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn log_conventions() {
        assert_eq!(xlog(0.0, 0.0).unwrap(), f64::NEG_INFINITY);
        assert!(xlog(-1.0, 0.0).is_err());
        assert_eq!(xlog(1.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn sign_of_zero_is_zero() {
        assert_eq!(xsign(0.0), 0.0);
        assert_eq!(xsign(-0.0), 0.0);
        assert_eq!(xsign(7.0), 1.0);
        assert_eq!(xsign(f64::NEG_INFINITY), -1.0);
    }
}
