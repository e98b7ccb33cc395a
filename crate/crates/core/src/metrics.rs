//! Accuracy criteria on (actual, predicted) effort pairs in person-hours.

use crate::math::sqrt;
use crate::{Error, Result};

pub const DEFAULT_PRED_THRESHOLD: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EvaluationPair {
    pub actual: f64,
    pub predicted: f64,
    pub project_id: Option<u32>,
}

impl EvaluationPair {
    pub fn new(actual: f64, predicted: f64) -> Self {
        EvaluationPair {
            actual,
            predicted,
            project_id: None,
        }
    }

    pub fn for_project(project_id: u32, actual: f64, predicted: f64) -> Self {
        EvaluationPair {
            actual,
            predicted,
            project_id: Some(project_id),
        }
    }

    fn error(&self) -> f64 {
        self.actual - self.predicted
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MetricsReport {
    pub mmre: f64,
    /// Fraction in [0, 1].
    pub pred_25: f64,
    pub rmse: f64,
    /// Mean of `actual − predicted`; positive means underestimation.
    pub mean_error: f64,
    /// Raw-scale `1 − SSE/SST`; `None` when the actuals are constant or n < 2.
    pub r_squared: Option<f64>,
    pub n: usize,
}

/// Magnitude of relative error `|actual − predicted| / actual`.
pub fn mre(pair: &EvaluationPair) -> Result<f64> {
    if !(pair.actual > 0.0) {
        return Err(Error::domain(alloc::format!(
            "actual effort must be positive, got {}",
            pair.actual
        )));
    }
    Ok(pair.error().abs() / pair.actual)
}

fn non_empty(pairs: &[EvaluationPair]) -> Result<()> {
    if pairs.is_empty() {
        Err(Error::domain("metrics need at least one pair"))
    } else {
        Ok(())
    }
}

pub fn mmre(pairs: &[EvaluationPair]) -> Result<f64> {
    non_empty(pairs)?;
    let mut sum = 0.0;
    for p in pairs {
        sum += mre(p)?;
    }
    Ok(sum / pairs.len() as f64)
}

/// Fraction of pairs with MRE ≤ `x`.
pub fn pred(pairs: &[EvaluationPair], x: f64) -> Result<f64> {
    non_empty(pairs)?;
    let mut hits = 0usize;
    for p in pairs {
        if mre(p)? <= x {
            hits += 1;
        }
    }
    Ok(hits as f64 / pairs.len() as f64)
}

pub fn rmse(pairs: &[EvaluationPair]) -> Result<f64> {
    non_empty(pairs)?;
    let sse: f64 = pairs.iter().map(|p| p.error() * p.error()).sum();
    Ok(sqrt(sse / pairs.len() as f64))
}

pub fn mean_error(pairs: &[EvaluationPair]) -> Result<f64> {
    non_empty(pairs)?;
    Ok(pairs.iter().map(EvaluationPair::error).sum::<f64>() / pairs.len() as f64)
}

/// `1 − Σ(actual − predicted)² / Σ(actual − mean(actual))²`. May be negative.
pub fn r_squared(pairs: &[EvaluationPair]) -> Result<f64> {
    if pairs.len() < 2 {
        return Err(Error::Degenerate("R² needs at least two pairs".into()));
    }
    let mean = pairs.iter().map(|p| p.actual).sum::<f64>() / pairs.len() as f64;
    let sst: f64 = pairs
        .iter()
        .map(|p| (p.actual - mean) * (p.actual - mean))
        .sum();
    if !(sst > 0.0) {
        return Err(Error::Degenerate(
            "R² is undefined for constant actuals".into(),
        ));
    }
    let sse: f64 = pairs.iter().map(|p| p.error() * p.error()).sum();
    Ok(1.0 - sse / sst)
}

/// All five criteria on the same pairs. A degenerate R² is reported as `None`
/// rather than failing the whole report.
pub fn evaluate(pairs: &[EvaluationPair]) -> Result<MetricsReport> {
    let r_squared = match r_squared(pairs) {
        Ok(r) => Some(r),
        Err(Error::Degenerate(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(MetricsReport {
        mmre: mmre(pairs)?,
        pred_25: pred(pairs, DEFAULT_PRED_THRESHOLD)?,
        rmse: rmse(pairs)?,
        mean_error: mean_error(pairs)?,
        r_squared,
        n: pairs.len(),
    })
}
