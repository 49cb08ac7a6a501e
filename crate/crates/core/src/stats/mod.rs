//! Correlation coefficient and its two-sided Student's t significance.

pub mod special;

use crate::error::{Error, Result};
use crate::moments::MomentSummary;
use crate::scalar::Scalar;

use special::beta_reg_split;

/// Outcome of the t-test for a correlation coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TTestResult<T> {
    /// Test statistic; infinite when `|r| = 1`.
    pub t: T,
    /// Degrees of freedom, `m - 2` for a dataset of `m` points.
    pub df: u64,
    /// Two-sided p-value.
    pub p: T,
}

/// Pearson correlation `sxy / (sx sy)` of a summary, clamped to `[-1, 1]`.
pub fn pcc<T: Scalar>(s: &MomentSummary<T>) -> Result<T> {
    if !(s.sx() > T::zero() && s.sy() > T::zero()) {
        return Err(Error::DegenerateVariance);
    }
    clamp_unit(s.sxy() / (s.sx() * s.sy()))
}

/// Clamps a correlation that overshoots `[-1, 1]` by rounding. A larger
/// overshoot means an upstream invariant broke.
pub(crate) fn clamp_unit<T: Scalar>(r: T) -> Result<T> {
    let one = T::one();
    if r.abs() <= one {
        return Ok(r);
    }
    if r.abs() - one <= T::lit(T::CLAMP_SLACK) {
        Ok(r.signum())
    } else {
        Err(Error::Internal(format!(
            "correlation {r} outside [-1, 1] beyond rounding slack"
        )))
    }
}

/// CDF of Student's t distribution with `df` degrees of freedom, via
/// `I_x(df/2, 1/2)` at `x = df / (df + t²)`.
pub fn t_cdf<T: Scalar>(t: T, df: u64) -> Result<T> {
    if df < 1 {
        return Err(Error::InvalidInput("t distribution needs df >= 1".into()));
    }
    if t.is_nan() {
        return Err(Error::InvalidInput("t statistic is NaN".into()));
    }
    if t == T::zero() {
        return Ok(T::lit(0.5));
    }
    if t.is_infinite() {
        return Ok(if t > T::zero() { T::one() } else { T::zero() });
    }
    let nu = T::from_count(df);
    let t2 = t * t;
    let (x, y) = if t2.is_finite() {
        (nu / (nu + t2), t2 / (nu + t2))
    } else {
        (T::zero(), T::one())
    };
    let tail = T::lit(0.5) * beta_reg_split(nu * T::lit(0.5), T::lit(0.5), x, y)?;
    Ok(if t > T::zero() { T::one() - tail } else { tail })
}

/// Two-sided p-value of correlation `r` over a dataset of `m` points.
///
/// Uses `p = I_{1-r²}(df/2, 1/2)`, which equals `2 (1 - F_t(|t|, df))` for
/// `t = r sqrt(df / (1 - r²))` without forming `t`. `|r| = 1` gives `p = 0`.
pub fn p_value<T: Scalar>(r: T, m: u64) -> Result<TTestResult<T>> {
    if m < 3 {
        return Err(Error::PValueUndefined);
    }
    if r.is_nan() {
        return Err(Error::InvalidInput("correlation is NaN".into()));
    }
    if r.abs() > T::one() + T::lit(T::CLAMP_SLACK) {
        return Err(Error::InvalidInput(format!("correlation {r} outside [-1, 1]")));
    }
    let r = r.max(-T::one()).min(T::one());
    let df = m - 2;
    let a = r.abs();
    if a == T::one() {
        return Ok(TTestResult {
            t: T::infinity() * r.signum(),
            df,
            p: T::zero(),
        });
    }
    if a == T::zero() {
        return Ok(TTestResult {
            t: T::zero(),
            df,
            p: T::one(),
        });
    }
    let nu = T::from_count(df);
    // 1 - r² without cancellation near |r| = 1
    let x = (T::one() - a) * (T::one() + a);
    let t = r * (nu / x).sqrt();
    let p = beta_reg_split(nu * T::lit(0.5), T::lit(0.5), x, a * a)?;
    Ok(TTestResult { t, df, p })
}
