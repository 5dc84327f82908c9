//! Arithmetic on nonnegative reals carried in the log domain.
//!
//! Quantities like `q^(-alpha * ln q)` at `q = 10^100` have natural logs near
//! `-230_000`, far below what an `f64` can hold in linear scale. Every error
//! term in this crate is therefore built as a [`LogNonNegReal`]: the value
//! `x >= 0` is stored as `ln x`, with `-inf` encoding exact zero so that sums
//! and comparisons stay total without a separate tag.

use crate::error::Error;
use crate::Result;

/// A nonnegative real number stored as its natural logarithm.
///
/// `log_value = -inf` represents exact zero. The represented value is always
/// `>= 0`; there is no sign bit because nothing in the error-term calculus
/// ever subtracts magnitudes of comparable size.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LogNonNegReal {
    log_value: f64,
}

impl LogNonNegReal {
    /// Exact zero (`log_value = -inf`).
    pub const ZERO: LogNonNegReal = LogNonNegReal { log_value: f64::NEG_INFINITY };

    /// Exact one (`log_value = 0`).
    pub const ONE: LogNonNegReal = LogNonNegReal { log_value: 0.0 };

    /// Builds from a linear-scale value `x >= 0`.
    pub fn from_linear(x: f64) -> Result<Self> {
        if x.is_nan() || x < 0.0 {
            return Err(Error::domain(format!("from_linear requires x >= 0, got {x}")));
        }
        Ok(LogNonNegReal { log_value: x.ln() })
    }

    /// Builds from a natural log. Accepts any finite `t` or `-inf` (zero).
    pub fn from_log(t: f64) -> Result<Self> {
        if t.is_nan() || t == f64::INFINITY {
            return Err(Error::domain(format!("from_log requires finite t or -inf, got {t}")));
        }
        Ok(LogNonNegReal { log_value: t })
    }

    /// The stored natural log (`-inf` for zero).
    pub fn log_value(&self) -> f64 {
        self.log_value
    }

    pub fn is_zero(&self) -> bool {
        self.log_value == f64::NEG_INFINITY
    }

    /// Converts back to linear scale, failing if the magnitude leaves the
    /// native float range instead of silently rounding to `0` or `inf`.
    pub fn to_linear(&self) -> Result<f64> {
        if self.is_zero() {
            return Ok(0.0);
        }
        // f64 holds roughly e^-745 .. e^709.
        if self.log_value > 709.0 {
            return Err(Error::Overflow { log_value: self.log_value });
        }
        if self.log_value < -745.0 {
            return Err(Error::Underflow { log_value: self.log_value });
        }
        Ok(self.log_value.exp())
    }

    pub fn mul(self, other: Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::ZERO;
        }
        LogNonNegReal { log_value: self.log_value + other.log_value }
    }

    pub fn div(self, other: Self) -> Result<Self> {
        if other.is_zero() {
            return Err(Error::domain("division by log-domain zero"));
        }
        if self.is_zero() {
            return Ok(Self::ZERO);
        }
        Ok(LogNonNegReal { log_value: self.log_value - other.log_value })
    }

    /// Raises to a real power. `0^k = 0` for `k > 0`; `0^0 = 1`.
    pub fn pow(self, k: f64) -> Self {
        if self.is_zero() {
            return if k == 0.0 { Self::ONE } else { Self::ZERO };
        }
        LogNonNegReal { log_value: k * self.log_value }
    }

    /// Stable log-sum-exp of a slice, pivoted on the maximum term.
    /// An empty slice sums to zero.
    pub fn sum(terms: &[LogNonNegReal]) -> Self {
        let max = terms
            .iter()
            .map(|t| t.log_value)
            .fold(f64::NEG_INFINITY, f64::max);
        if max == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        let acc: f64 = terms.iter().map(|t| (t.log_value - max).exp()).sum();
        LogNonNegReal { log_value: max + acc.ln() }
    }

    /// `self + other` via two-term log-sum-exp.
    pub fn add(self, other: Self) -> Self {
        if self.is_zero() {
            return other;
        }
        if other.is_zero() {
            return self;
        }
        let (hi, lo) = if self.log_value >= other.log_value {
            (self.log_value, other.log_value)
        } else {
            (other.log_value, self.log_value)
        };
        LogNonNegReal { log_value: hi + (lo - hi).exp().ln_1p() }
    }

    /// `1 + self`, computed as `log1p(e^log_value)` without leaving the log
    /// domain even when `self` is astronomically small or large.
    pub fn one_plus(self) -> Self {
        Self::ONE.add(self)
    }

    /// Total order agreeing with the represented magnitudes.
    pub fn compare(&self, other: &Self) -> std::cmp::Ordering {
        self.log_value
            .partial_cmp(&other.log_value)
            .expect("log values are never NaN")
    }
}

impl std::fmt::Display for LogNonNegReal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            write!(f, "0")
        } else if self.log_value.abs() < 700.0 {
            write!(f, "{:.6e}", self.log_value.exp())
        } else {
            write!(f, "exp({:.4})", self.log_value)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_linear_basics() {
        assert_eq!(LogNonNegReal::from_linear(1.0).unwrap().log_value(), 0.0);
        assert!(LogNonNegReal::from_linear(0.0).unwrap().is_zero());
        let e2 = LogNonNegReal::from_linear(std::f64::consts::E.powi(2)).unwrap();
        assert!((e2.log_value() - 2.0).abs() <= 1e-14);
        assert!(LogNonNegReal::from_linear(-1.0).is_err());
        assert!(LogNonNegReal::from_linear(f64::NAN).is_err());
    }

    #[test]
    fn from_log_accepts_huge_exponents() {
        // -4.3652 * ln(10^100)^2 is about -231_000 and must round-trip losslessly.
        let t = -4.3652 * (230.2585092994046_f64).powi(2);
        let v = LogNonNegReal::from_log(t).unwrap();
        assert_eq!(v.log_value(), t);
        assert_eq!(LogNonNegReal::from_log(0.0).unwrap().log_value(), 0.0);
        let two = LogNonNegReal::from_log(2.0_f64.ln()).unwrap();
        assert!((two.to_linear().unwrap() - 2.0).abs() < 1e-14);
        assert!(LogNonNegReal::from_log(f64::INFINITY).is_err());
        assert!(LogNonNegReal::from_log(f64::NAN).is_err());
    }

    #[test]
    fn mul_div_pow_identities() {
        let a = LogNonNegReal::from_log(3.0).unwrap();
        let b = LogNonNegReal::from_log(4.0).unwrap();
        assert_eq!(a.mul(b).log_value(), 7.0);
        assert_eq!(LogNonNegReal::from_log(2.0).unwrap().pow(0.5).log_value(), 1.0);
        let x = LogNonNegReal::from_log(-123.456).unwrap();
        assert_eq!(x.div(x).unwrap().log_value(), 0.0);
        assert!(a.div(LogNonNegReal::ZERO).is_err());
        assert!(LogNonNegReal::ZERO.mul(a).is_zero());
    }

    #[test]
    fn sum_equal_terms_doubles() {
        let t = LogNonNegReal::from_log(1000.0).unwrap();
        let s = LogNonNegReal::sum(&[t, t]);
        assert!((s.log_value() - (1000.0 + 2.0_f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn sum_zero_is_identity() {
        let x = LogNonNegReal::from_log(-42.0).unwrap();
        let s = LogNonNegReal::sum(&[x, LogNonNegReal::ZERO]);
        assert_eq!(s.log_value(), x.log_value());
        assert!(LogNonNegReal::sum(&[]).is_zero());
    }

    #[test]
    fn sum_deep_underflow_terms() {
        // Oracle: log(e^-500000 + e^-500001) = -500000 + log(1 + e^-1),
        // where log1p(exp(-1)) = 0.31326168751822286 (high-precision value).
        let a = LogNonNegReal::from_log(-500000.0).unwrap();
        let b = LogNonNegReal::from_log(-500001.0).unwrap();
        let s = LogNonNegReal::sum(&[a, b]);
        let expect = -500000.0 + 0.31326168751822286;
        assert!((s.log_value() - expect).abs() < 1e-9, "got {}", s.log_value());
    }

    #[test]
    fn to_linear_range_checks() {
        assert_eq!(LogNonNegReal::from_log(0.0).unwrap().to_linear().unwrap(), 1.0);
        let five = LogNonNegReal::from_log(5.0_f64.ln()).unwrap();
        assert!((five.to_linear().unwrap() - 5.0).abs() < 1e-14);
        match LogNonNegReal::from_log(-231000.0).unwrap().to_linear() {
            Err(Error::Underflow { log_value }) => assert_eq!(log_value, -231000.0),
            other => panic!("expected underflow, got {other:?}"),
        }
        match LogNonNegReal::from_log(231000.0).unwrap().to_linear() {
            Err(Error::Overflow { log_value }) => assert_eq!(log_value, 231000.0),
            other => panic!("expected overflow, got {other:?}"),
        }
    }

    #[test]
    fn one_plus_tiny_and_huge() {
        let tiny = LogNonNegReal::from_log(-2590.8).unwrap();
        assert_eq!(tiny.one_plus().log_value(), 0.0); // 1 + e^-2590.8 == 1 in f64
        let huge = LogNonNegReal::from_log(300.0).unwrap();
        assert_eq!(huge.one_plus().log_value(), 300.0);
        let one = LogNonNegReal::ONE;
        assert!((one.one_plus().log_value() - 2.0_f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn compare_matches_log_order() {
        let a = LogNonNegReal::from_log(-1.0).unwrap();
        let b = LogNonNegReal::from_log(1.0).unwrap();
        assert_eq!(a.compare(&b), std::cmp::Ordering::Less);
        assert_eq!(b.compare(&a), std::cmp::Ordering::Greater);
        assert_eq!(a.compare(&a), std::cmp::Ordering::Equal);
        assert_eq!(LogNonNegReal::ZERO.compare(&a), std::cmp::Ordering::Less);
    }
}
