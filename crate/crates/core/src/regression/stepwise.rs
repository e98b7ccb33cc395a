use alloc::string::String;
use alloc::vec::Vec;

use super::frame::{build_frame_with, ModelFrame, Predictor};
use crate::dataset::ProjectRecord;
use crate::numerics::{f_upper_tail_p, solve_least_squares};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum StepAction {
    Add,
    Remove,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StepwiseStep {
    pub action: StepAction,
    /// Columns that moved together (both dummies for Language).
    pub predictors: Vec<Predictor>,
    /// Partial F-test p-value at the time of the decision.
    pub p_value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum StepwiseStop {
    /// No candidate enters and no member leaves.
    Converged,
    /// A previously visited selection came round again.
    Cycle,
    IterationLimit,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StepwiseTrace {
    pub alpha: f64,
    pub steps: Vec<StepwiseStep>,
    /// Selected columns in frame order.
    pub selected: Vec<Predictor>,
    /// Candidate columns never selected (or removed), in frame order.
    pub excluded: Vec<Predictor>,
    pub stop: StepwiseStop,
}

impl StepwiseTrace {
    /// Applies the recorded actions to an empty model, returning the
    /// resulting selection in `order`.
    pub fn replay(&self, order: &[Predictor]) -> Vec<Predictor> {
        let mut active: Vec<Predictor> = Vec::new();
        for step in &self.steps {
            match step.action {
                StepAction::Add => active.extend(step.predictors.iter().copied()),
                StepAction::Remove => active.retain(|p| !step.predictors.contains(p)),
            }
        }
        order
            .iter()
            .copied()
            .filter(|p| active.contains(p))
            .collect()
    }

    pub fn is_selected(&self, predictor: Predictor) -> bool {
        self.selected.contains(&predictor)
    }
}

/// Frame over the eight stepwise candidates (ln size, ln transactions,
/// ln entities, L1, L2, TExp, MExp, Env).
pub fn build_stepwise_frame(records: &[ProjectRecord]) -> Result<ModelFrame> {
    build_frame_with(records, &Predictor::STEPWISE_CANDIDATES)
}

/// Groups frame columns into decision units; L1 and L2 form one unit when
/// both are present.
fn units(predictors: &[Predictor]) -> Vec<Vec<Predictor>> {
    let pair = predictors.contains(&Predictor::L1) && predictors.contains(&Predictor::L2);
    let mut out: Vec<Vec<Predictor>> = Vec::new();
    for &p in predictors {
        match p {
            Predictor::L1 | Predictor::L2 if pair => {
                if !out.iter().any(|u| u.contains(&Predictor::L1)) {
                    out.push(alloc::vec![Predictor::L1, Predictor::L2]);
                }
            }
            _ => out.push(alloc::vec![p]),
        }
    }
    out
}

/// Residual sum of squares and parameter count; `None` if rank deficient.
fn rss_of(frame: &ModelFrame, predictors: &[Predictor]) -> Result<Option<(f64, usize)>> {
    let sub = frame.subset(predictors)?;
    match solve_least_squares(&sub.design, &sub.response) {
        Ok(s) => Ok(Some((s.residual_sum_of_squares, sub.p()))),
        Err(Error::Collinear { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Partial F-test p-value for the `q` extra columns of the larger model.
fn partial_p(rss_small: f64, rss_big: f64, q: usize, n: usize, p_big: usize) -> Result<f64> {
    if n <= p_big {
        return Ok(1.0);
    }
    let df2 = n - p_big;
    let denom = rss_big / df2 as f64;
    let f = if denom > 0.0 {
        ((rss_small - rss_big).max(0.0) / q as f64) / denom
    } else if rss_small > rss_big {
        f64::INFINITY
    } else {
        0.0
    };
    f_upper_tail_p(f, q as u32, df2 as u32)
}

/// Bidirectional stepwise selection by partial F tests, entering and
/// staying at `alpha`. Starts from the intercept-only model; each round
/// adds the most significant outside unit (if p < alpha) then drops the
/// least significant member (if p > alpha). Ties go to the smaller p, then
/// the leftmost column.
pub fn stepwise_select(frame: &ModelFrame, alpha: f64) -> Result<StepwiseTrace> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(alloc::format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    let n = frame.n();
    let all_units = units(&frame.predictors);
    let max_iterations = 2 * all_units.len();
    let mut inside: Vec<bool> = alloc::vec![false; all_units.len()];
    let mut steps = Vec::new();
    let mut seen: Vec<Vec<bool>> = alloc::vec![inside.clone()];
    let mut stop = StepwiseStop::Converged;

    let active = |inside: &[bool]| -> Vec<Predictor> {
        let members: Vec<Predictor> = all_units
            .iter()
            .zip(inside)
            .filter(|(_, &b)| b)
            .flat_map(|(u, _)| u.iter().copied())
            .collect();
        frame
            .predictors
            .iter()
            .copied()
            .filter(|p| members.contains(p))
            .collect()
    };

    loop {
        let mut changed = false;

        // Forward step.
        let current = active(&inside);
        let (rss_now, _) = rss_of(frame, &current)?
            .ok_or_else(|| Error::domain("current stepwise model became rank deficient"))?;
        let mut best: Option<(usize, f64)> = None;
        for (u, unit) in all_units.iter().enumerate() {
            if inside[u] {
                continue;
            }
            let mut trial = inside.clone();
            trial[u] = true;
            let Some((rss_big, p_big)) = rss_of(frame, &active(&trial))? else {
                continue;
            };
            let p = partial_p(rss_now, rss_big, unit.len(), n, p_big)?;
            if best.is_none_or(|(_, bp)| p < bp) {
                best = Some((u, p));
            }
        }
        if let Some((u, p)) = best {
            if p < alpha {
                inside[u] = true;
                steps.push(StepwiseStep {
                    action: StepAction::Add,
                    predictors: all_units[u].clone(),
                    p_value: p,
                });
                changed = true;
            }
        }

        // Backward step.
        let current = active(&inside);
        if let Some((rss_now, p_now)) = rss_of(frame, &current)? {
            let mut worst: Option<(usize, f64)> = None;
            for (u, unit) in all_units.iter().enumerate() {
                if !inside[u] {
                    continue;
                }
                let mut trial = inside.clone();
                trial[u] = false;
                let Some((rss_small, _)) = rss_of(frame, &active(&trial))? else {
                    continue;
                };
                let p = partial_p(rss_small, rss_now, unit.len(), n, p_now)?;
                if worst.is_none_or(|(_, wp)| p > wp) {
                    worst = Some((u, p));
                }
            }
            if let Some((u, p)) = worst {
                if p > alpha {
                    inside[u] = false;
                    steps.push(StepwiseStep {
                        action: StepAction::Remove,
                        predictors: all_units[u].clone(),
                        p_value: p,
                    });
                    changed = true;
                }
            }
        }

        if !changed {
            break;
        }
        if seen.contains(&inside) {
            stop = StepwiseStop::Cycle;
            break;
        }
        seen.push(inside.clone());
        if steps.len() >= max_iterations {
            stop = StepwiseStop::IterationLimit;
            break;
        }
    }

    let selected = active(&inside);
    let excluded = frame
        .predictors
        .iter()
        .copied()
        .filter(|p| !selected.contains(p))
        .collect();
    Ok(StepwiseTrace {
        alpha,
        steps,
        selected,
        excluded,
        stop,
    })
}

/// Human-readable unit label, e.g. `L1+L2`.
pub fn unit_label(predictors: &[Predictor]) -> String {
    let mut s = String::new();
    for (i, p) in predictors.iter().enumerate() {
        if i > 0 {
            s.push('+');
        }
        s.push_str(p.name());
    }
    s
}
