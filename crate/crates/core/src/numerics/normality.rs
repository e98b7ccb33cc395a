use alloc::vec::Vec;

use super::dist::normal_cdf;
use crate::math::{exp, ln, sqrt};
use crate::{Error, Result};

pub const MIN_NORMALITY_SAMPLE: usize = 8;

/// Critical value of the small-sample adjusted A² at the 5% level when the
/// mean and variance are estimated from the sample.
pub const AD_CRITICAL_VALUE_5_PERCENT: f64 = 0.752;

// Stephens' critical values for the adjusted statistic (mean and variance estimated).
const CRITICAL_VALUES: [(f64, f64); 5] = [
    (0.15, 0.576),
    (0.10, 0.656),
    (0.05, AD_CRITICAL_VALUE_5_PERCENT),
    (0.025, 0.873),
    (0.01, 1.035),
];

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NormalityReport {
    /// Always `"anderson-darling"`.
    pub test: &'static str,
    pub n: usize,
    /// Unadjusted A².
    pub a_squared: f64,
    /// `A² · (1 + 0.75/n + 2.25/n²)`.
    pub statistic: f64,
    pub alpha: f64,
    /// Tabulated critical value for `alpha`, when one exists.
    pub critical_value: Option<f64>,
    /// Approximate p-value of the adjusted statistic.
    pub p_value: f64,
    /// Normality rejected at `alpha` (critical value if tabulated, else p-value).
    pub rejected: bool,
    pub is_normal_at_95: bool,
}

/// Anderson–Darling test of normality with mean and variance estimated from
/// the sample.
pub fn normality_test(sample: &[f64], alpha: f64) -> Result<NormalityReport> {
    let n = sample.len();
    if n < MIN_NORMALITY_SAMPLE {
        return Err(Error::InsufficientData {
            needed: MIN_NORMALITY_SAMPLE,
            got: n,
        });
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(alloc::format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    if sample.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("sample contains a non-finite value"));
    }
    let nf = n as f64;
    let mean = sample.iter().sum::<f64>() / nf;
    let var = sample.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (nf - 1.0);
    let sd = sqrt(var);
    if !(sd > 1e-12 * mean.abs().max(f64::MIN_POSITIVE)) {
        return Err(Error::Degenerate("sample is constant".into()));
    }

    let mut z: Vec<f64> = sample.iter().map(|v| (v - mean) / sd).collect();
    z.sort_by(f64::total_cmp);
    let mut s = 0.0;
    for i in 0..n {
        let lower = ln(normal_cdf(z[i]).max(f64::MIN_POSITIVE));
        let upper = ln(normal_cdf(-z[n - 1 - i]).max(f64::MIN_POSITIVE));
        s += (2 * i + 1) as f64 * (lower + upper);
    }
    let a_squared = -nf - s / nf;
    let statistic = a_squared * (1.0 + 0.75 / nf + 2.25 / (nf * nf));
    let p_value = adjusted_p_value(statistic);
    let critical_value = CRITICAL_VALUES
        .iter()
        .find(|(a, _)| (a - alpha).abs() < 1e-12)
        .map(|&(_, c)| c);
    let rejected = match critical_value {
        Some(c) => statistic > c,
        None => p_value < alpha,
    };
    Ok(NormalityReport {
        test: "anderson-darling",
        n,
        a_squared,
        statistic,
        alpha,
        critical_value,
        p_value,
        rejected,
        is_normal_at_95: statistic <= AD_CRITICAL_VALUE_5_PERCENT,
    })
}

// D'Agostino & Stephens piecewise approximation.
fn adjusted_p_value(a: f64) -> f64 {
    let p = if a >= 0.6 {
        exp(1.2937 - 5.709 * a + 0.0186 * a * a)
    } else if a >= 0.34 {
        exp(0.9177 - 4.279 * a - 1.38 * a * a)
    } else if a >= 0.2 {
        1.0 - exp(-8.318 + 42.796 * a - 59.938 * a * a)
    } else {
        1.0 - exp(-13.436 + 101.14 * a - 223.73 * a * a)
    };
    p.clamp(0.0, 1.0)
}
