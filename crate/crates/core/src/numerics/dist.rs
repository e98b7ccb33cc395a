use core::f64::consts::SQRT_2;

use super::special::regularized_incomplete_beta;
use crate::math::erfc;
use crate::{Error, Result};

/// Two-sided Student-t tail probability `P(|T| ≥ |t|)` with `df` degrees of freedom.
pub fn t_two_sided_p(t: f64, df: u32) -> Result<f64> {
    if df < 1 {
        return Err(Error::domain("t distribution needs df >= 1"));
    }
    if t.is_nan() {
        return Err(Error::domain("t statistic is NaN"));
    }
    if t.is_infinite() {
        return Ok(0.0);
    }
    let nu = df as f64;
    regularized_incomplete_beta(nu / 2.0, 0.5, nu / (nu + t * t))
}

/// Upper-tail F probability `P(F ≥ f)` with `(df1, df2)` degrees of freedom.
pub fn f_upper_tail_p(f: f64, df1: u32, df2: u32) -> Result<f64> {
    if df1 < 1 || df2 < 1 {
        return Err(Error::domain("F distribution needs df1, df2 >= 1"));
    }
    if !(f >= 0.0) {
        return Err(Error::domain(alloc::format!(
            "F statistic must be >= 0, got {f}"
        )));
    }
    if f.is_infinite() {
        return Ok(0.0);
    }
    let (d1, d2) = (df1 as f64, df2 as f64);
    regularized_incomplete_beta(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * f))
}

/// Standard normal CDF.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / SQRT_2)
}
