//! One-hidden-layer perceptron effort model.
//!
//! Logistic hidden units, a linear output, standardized inputs and an
//! ln(effort) target. Training minimises half the summed squared error with
//! Polak–Ribière conjugate gradient (Armijo backtracking, periodic restarts)
//! and keeps the weights with the lowest holdout error.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::ProjectRecord;
use crate::math::{exp, round, sqrt};
use crate::numerics::Matrix;
use crate::regression::{build_frame, FeatureSet, Predictor};
use crate::{Error, Result};

pub const MIN_TRAINING_RECORDS: usize = 10;

const ARMIJO_C: f64 = 1e-4;
const MIN_STEP: f64 = 1e-20;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AnnConfig {
    /// Defaults to the number of inputs.
    pub hidden_nodes: Option<usize>,
    pub max_iterations: usize,
    /// Relative training-SSE decrease treated as a stall.
    pub convergence_tolerance: f64,
    /// Absolute SSE decrease that counts as an improvement (training stall
    /// and holdout patience).
    pub min_improvement_delta: f64,
    pub min_gradient: f64,
    pub holdout_fraction: f64,
    /// Iterations without holdout improvement before stopping.
    pub patience: usize,
    pub seed: u64,
}

impl Default for AnnConfig {
    fn default() -> Self {
        AnnConfig {
            hidden_nodes: None,
            max_iterations: 10_000,
            convergence_tolerance: 1.0e-5,
            min_improvement_delta: 1.0e-6,
            min_gradient: 1.0e-6,
            holdout_fraction: 0.20,
            patience: 50,
            seed: 0,
        }
    }
}

impl AnnConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("convergence_tolerance", self.convergence_tolerance),
            ("min_improvement_delta", self.min_improvement_delta),
            ("min_gradient", self.min_gradient),
        ];
        for (name, v) in positive {
            if !(v > 0.0) {
                return Err(Error::domain(format!("{name} must be > 0, got {v}")));
            }
        }
        if !(self.holdout_fraction > 0.0 && self.holdout_fraction <= 0.5) {
            return Err(Error::domain(format!(
                "holdout_fraction must lie in (0, 0.5], got {}",
                self.holdout_fraction
            )));
        }
        if self.hidden_nodes == Some(0) {
            return Err(Error::domain("hidden_nodes must be positive"));
        }
        Ok(())
    }
}

/// Response scale of the network output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum TargetTransform {
    LnEffort,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AnnModel {
    pub input_names: Vec<String>,
    /// Input columns when the model was trained on project records.
    pub predictors: Vec<Predictor>,
    pub input_mean: Vec<f64>,
    pub input_sd: Vec<f64>,
    /// hidden × inputs.
    pub hidden_weights: Matrix,
    pub hidden_biases: Vec<f64>,
    pub output_weights: Vec<f64>,
    pub output_bias: f64,
    pub target: TargetTransform,
}

#[inline]
fn logistic(z: f64) -> f64 {
    1.0 / (1.0 + exp(-z))
}

impl AnnModel {
    pub fn n_inputs(&self) -> usize {
        self.hidden_weights.cols()
    }

    pub fn n_hidden(&self) -> usize {
        self.hidden_weights.rows()
    }

    /// Hidden weights (row-major), hidden biases, output weights, output bias.
    pub fn n_params(&self) -> usize {
        let h = self.n_hidden();
        h * self.n_inputs() + 2 * h + 1
    }

    pub fn params(&self) -> Vec<f64> {
        let mut p = Vec::with_capacity(self.n_params());
        p.extend_from_slice(self.hidden_weights.values());
        p.extend_from_slice(&self.hidden_biases);
        p.extend_from_slice(&self.output_weights);
        p.push(self.output_bias);
        p
    }

    pub fn set_params(&mut self, params: &[f64]) -> Result<()> {
        if params.len() != self.n_params() {
            return Err(Error::domain(format!(
                "expected {} parameters, got {}",
                self.n_params(),
                params.len()
            )));
        }
        let (h, n) = (self.n_hidden(), self.n_inputs());
        self.hidden_weights = Matrix::from_row_major(h, n, params[..h * n].to_vec());
        self.hidden_biases = params[h * n..h * n + h].to_vec();
        self.output_weights = params[h * n + h..h * n + 2 * h].to_vec();
        self.output_bias = params[h * n + 2 * h];
        Ok(())
    }

    fn standardize(&self, inputs: &[f64]) -> Result<Vec<f64>> {
        if inputs.len() != self.n_inputs() {
            return Err(Error::domain(format!(
                "network has {} inputs, got {}",
                self.n_inputs(),
                inputs.len()
            )));
        }
        Ok(inputs
            .iter()
            .zip(&self.input_mean)
            .zip(&self.input_sd)
            .map(|((x, m), s)| (x - m) / s)
            .collect())
    }

    fn forward_standardized(&self, z: &[f64], hidden: &mut [f64]) -> f64 {
        let mut out = self.output_bias;
        for (k, a) in hidden.iter_mut().enumerate() {
            let pre = self.hidden_biases[k]
                + self
                    .hidden_weights
                    .row(k)
                    .iter()
                    .zip(z)
                    .map(|(w, x)| w * x)
                    .sum::<f64>();
            *a = logistic(pre);
            out += self.output_weights[k] * *a;
        }
        out
    }

    /// Accumulates the gradient of `½(out − target)²` into `grad`; returns the
    /// squared error.
    fn accumulate_gradient(
        &self,
        z: &[f64],
        target: f64,
        hidden: &mut [f64],
        grad: &mut [f64],
    ) -> f64 {
        let (h, n) = (self.n_hidden(), self.n_inputs());
        let r = self.forward_standardized(z, hidden) - target;
        let (w_hidden, rest) = grad.split_at_mut(h * n);
        let (b_hidden, rest) = rest.split_at_mut(h);
        let (w_out, b_out) = rest.split_at_mut(h);
        b_out[0] += r;
        for k in 0..h {
            let a = hidden[k];
            w_out[k] += r * a;
            let delta = r * self.output_weights[k] * a * (1.0 - a);
            b_hidden[k] += delta;
            for (g, x) in w_hidden[k * n..(k + 1) * n].iter_mut().zip(z) {
                *g += delta * x;
            }
        }
        r * r
    }
}

/// Fresh network with identity input scaling and weights drawn uniformly
/// from [−0.5, 0.5] by a ChaCha8 generator seeded from `config.seed`.
pub fn init_network(n_inputs: usize, config: &AnnConfig) -> Result<AnnModel> {
    if n_inputs == 0 {
        return Err(Error::domain("network needs at least one input"));
    }
    config.validate()?;
    let h = config.hidden_nodes.unwrap_or(n_inputs);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut draw =
        |len: usize| -> Vec<f64> { (0..len).map(|_| rng.random_range(-0.5..=0.5)).collect() };
    let hidden = draw(h * n_inputs);
    let hidden_biases = draw(h);
    let output_weights = draw(h);
    let output_bias = draw(1)[0];
    Ok(AnnModel {
        input_names: (1..=n_inputs).map(|i| format!("x{i}")).collect(),
        predictors: Vec::new(),
        input_mean: vec![0.0; n_inputs],
        input_sd: vec![1.0; n_inputs],
        hidden_weights: Matrix::from_row_major(h, n_inputs, hidden),
        hidden_biases,
        output_weights,
        output_bias,
        target: TargetTransform::LnEffort,
    })
}

/// Network output (predicted ln-effort) for raw, unstandardized inputs.
pub fn forward(model: &AnnModel, inputs: &[f64]) -> Result<f64> {
    let z = model.standardize(inputs)?;
    let mut hidden = vec![0.0; model.n_hidden()];
    Ok(model.forward_standardized(&z, &mut hidden))
}

/// Gradient of `½ Σ (output − target)²` over the batch, in [`AnnModel::params`] order.
pub fn gradient(model: &AnnModel, batch: &[(Vec<f64>, f64)]) -> Result<Vec<f64>> {
    if batch.is_empty() {
        return Err(Error::domain("gradient needs a non-empty batch"));
    }
    let mut grad = vec![0.0; model.n_params()];
    let mut hidden = vec![0.0; model.n_hidden()];
    for (inputs, target) in batch {
        let z = model.standardize(inputs)?;
        model.accumulate_gradient(&z, *target, &mut hidden, &mut grad);
    }
    Ok(grad)
}

/// Summed squared error over a batch of raw inputs.
pub fn sum_squared_error(model: &AnnModel, batch: &[(Vec<f64>, f64)]) -> Result<f64> {
    let mut hidden = vec![0.0; model.n_hidden()];
    let mut sse = 0.0;
    for (inputs, target) in batch {
        let z = model.standardize(inputs)?;
        let r = model.forward_standardized(&z, &mut hidden) - target;
        sse += r * r;
    }
    Ok(sse)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum StopReason {
    MaxIterations,
    GradientBelowMin,
    ImprovementBelowDelta,
    HoldoutWorsening,
}

impl StopReason {
    pub const fn as_str(self) -> &'static str {
        match self {
            StopReason::MaxIterations => "max_iterations",
            StopReason::GradientBelowMin => "gradient_below_min",
            StopReason::ImprovementBelowDelta => "improvement_below_delta",
            StopReason::HoldoutWorsening => "holdout_worsening",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TraceEntry {
    pub iteration: usize,
    pub training_sse: f64,
    pub holdout_sse: f64,
    pub gradient_norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrainingTrace {
    /// Entry 0 is the initial network.
    pub entries: Vec<TraceEntry>,
    pub stop_reason: StopReason,
    /// Iteration whose weights were returned.
    pub best_iteration: usize,
    pub best_holdout_sse: f64,
    pub training_ids: Vec<u32>,
    pub holdout_ids: Vec<u32>,
    pub target: TargetTransform,
    pub seed: u64,
}

struct Problem {
    train: Vec<(Vec<f64>, f64)>,
    holdout: Vec<(Vec<f64>, f64)>,
}

impl Problem {
    /// Half SSE and its gradient over the (already standardized) training rows.
    fn loss_and_gradient(&self, model: &AnnModel, grad: &mut [f64], hidden: &mut [f64]) -> f64 {
        grad.iter_mut().for_each(|g| *g = 0.0);
        let mut sse = 0.0;
        for (z, t) in &self.train {
            sse += model.accumulate_gradient(z, *t, hidden, grad);
        }
        0.5 * sse
    }

    fn sse(rows: &[(Vec<f64>, f64)], model: &AnnModel, hidden: &mut [f64]) -> f64 {
        rows.iter()
            .map(|(z, t)| {
                let r = model.forward_standardized(z, hidden) - t;
                r * r
            })
            .sum()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Trains on the records' ln(effort) with the feature set's columns as inputs.
pub fn train(
    records: &[ProjectRecord],
    features: &FeatureSet,
    config: &AnnConfig,
) -> Result<(AnnModel, TrainingTrace)> {
    config.validate()?;
    if records.len() < MIN_TRAINING_RECORDS {
        return Err(Error::InsufficientData {
            needed: MIN_TRAINING_RECORDS,
            got: records.len(),
        });
    }
    let frame = build_frame(records, features)?;
    let n = frame.n();
    let n_in = frame.p() - 1;

    // Seeded uniform holdout sample.
    let n_holdout = (round(config.holdout_fraction * n as f64) as usize).clamp(1, n - 1);
    let mut order: Vec<usize> = (0..n).collect();
    let mut split_rng = ChaCha8Rng::seed_from_u64(config.seed);
    split_rng.set_stream(1);
    order.shuffle(&mut split_rng);
    let mut holdout_idx = order[..n_holdout].to_vec();
    let mut train_idx = order[n_holdout..].to_vec();
    holdout_idx.sort_unstable();
    train_idx.sort_unstable();

    let inputs = |i: usize| -> Vec<f64> { frame.design.row(i)[1..].to_vec() };

    // Standardization from the training split.
    let mut mean = vec![0.0; n_in];
    let mut sd = vec![0.0; n_in];
    for &i in &train_idx {
        for (m, x) in mean.iter_mut().zip(inputs(i)) {
            *m += x;
        }
    }
    let nt = train_idx.len() as f64;
    mean.iter_mut().for_each(|m| *m /= nt);
    for &i in &train_idx {
        for ((s, m), x) in sd.iter_mut().zip(&mean).zip(inputs(i)) {
            *s += (x - m) * (x - m);
        }
    }
    for s in &mut sd {
        *s = if nt > 1.0 { sqrt(*s / (nt - 1.0)) } else { 0.0 };
        if !(*s > 1e-12) {
            *s = 1.0;
        }
    }

    let mut model = init_network(n_in, config)?;
    model.input_names = frame.column_names[1..].to_vec();
    model.predictors = frame.predictors.clone();
    model.input_mean = mean;
    model.input_sd = sd;
    model.output_bias = train_idx.iter().map(|&i| frame.response[i]).sum::<f64>() / nt;

    let standardized = |idx: &[usize], model: &AnnModel| -> Result<Vec<(Vec<f64>, f64)>> {
        idx.iter()
            .map(|&i| Ok((model.standardize(&inputs(i))?, frame.response[i])))
            .collect()
    };
    let problem = Problem {
        train: standardized(&train_idx, &model)?,
        holdout: standardized(&holdout_idx, &model)?,
    };

    let trace_ids = |idx: &[usize]| idx.iter().map(|&i| frame.row_ids[i]).collect::<Vec<_>>();
    let (best, trace) = conjugate_gradient(model, &problem, config)?;
    let trace = TrainingTrace {
        training_ids: trace_ids(&train_idx),
        holdout_ids: trace_ids(&holdout_idx),
        ..trace
    };
    Ok((best, trace))
}

fn conjugate_gradient(
    mut model: AnnModel,
    problem: &Problem,
    config: &AnnConfig,
) -> Result<(AnnModel, TrainingTrace)> {
    let np = model.n_params();
    let mut hidden = vec![0.0; model.n_hidden()];
    let mut theta = model.params();
    let mut grad = vec![0.0; np];
    let mut loss = problem.loss_and_gradient(&model, &mut grad, &mut hidden);
    let mut holdout_sse = Problem::sse(&problem.holdout, &model, &mut hidden);

    let mut entries = vec![TraceEntry {
        iteration: 0,
        training_sse: 2.0 * loss,
        holdout_sse,
        gradient_norm: sqrt(dot(&grad, &grad)),
    }];
    let mut best_theta = theta.clone();
    let mut best_holdout = holdout_sse;
    let mut best_iteration = 0;
    let mut stale = 0usize;

    let mut direction: Vec<f64> = grad.iter().map(|g| -g).collect();
    let mut steepest = true;
    let mut since_restart = 0usize;
    let mut step = 1.0 / sqrt(dot(&grad, &grad)).max(1.0);
    let mut trial = vec![0.0; np];
    let mut trial_grad = vec![0.0; np];
    let mut stop_reason = StopReason::MaxIterations;

    let mut iteration = 0;
    while iteration < config.max_iterations {
        let gnorm = sqrt(dot(&grad, &grad));
        if gnorm < config.min_gradient {
            stop_reason = StopReason::GradientBelowMin;
            break;
        }
        let mut slope = dot(&grad, &direction);
        if !(slope < 0.0) {
            direction.iter_mut().zip(&grad).for_each(|(d, g)| *d = -g);
            slope = -gnorm * gnorm;
            steepest = true;
            since_restart = 0;
        }

        // Armijo backtracking from twice the last accepted step.
        let mut t = (2.0 * step).min(1e6);
        let accepted = loop {
            for ((x, th), d) in trial.iter_mut().zip(&theta).zip(&direction) {
                *x = th + t * d;
            }
            model.set_params(&trial)?;
            let trial_loss = problem.loss_and_gradient(&model, &mut trial_grad, &mut hidden);
            if trial_loss.is_finite() && trial_loss <= loss + ARMIJO_C * t * slope {
                break Some(trial_loss);
            }
            t *= 0.5;
            if t < MIN_STEP {
                break None;
            }
        };
        let Some(new_loss) = accepted else {
            model.set_params(&theta)?;
            if steepest {
                stop_reason = StopReason::ImprovementBelowDelta;
                break;
            }
            direction.iter_mut().zip(&grad).for_each(|(d, g)| *d = -g);
            steepest = true;
            since_restart = 0;
            continue;
        };
        iteration += 1;
        step = t;

        // Polak–Ribière with non-negativity and restarts every `np` steps.
        let gg = dot(&grad, &grad);
        let beta = if gg > 0.0 {
            (trial_grad
                .iter()
                .zip(&grad)
                .map(|(gn, g)| gn * (gn - g))
                .sum::<f64>()
                / gg)
                .max(0.0)
        } else {
            0.0
        };
        since_restart += 1;
        let restart = since_restart >= np;
        for (d, gn) in direction.iter_mut().zip(&trial_grad) {
            *d = if restart { -gn } else { -gn + beta * *d };
        }
        if restart {
            since_restart = 0;
        }
        steepest = restart || beta == 0.0;

        let decrease = loss - new_loss;
        let previous = loss;
        core::mem::swap(&mut theta, &mut trial);
        core::mem::swap(&mut grad, &mut trial_grad);
        loss = new_loss;
        holdout_sse = Problem::sse(&problem.holdout, &model, &mut hidden);
        entries.push(TraceEntry {
            iteration,
            training_sse: 2.0 * loss,
            holdout_sse,
            gradient_norm: sqrt(dot(&grad, &grad)),
        });

        if holdout_sse < best_holdout {
            if best_holdout - holdout_sse >= config.min_improvement_delta {
                stale = 0;
            } else {
                stale += 1;
            }
            best_holdout = holdout_sse;
            best_theta.copy_from_slice(&theta);
            best_iteration = iteration;
        } else {
            stale += 1;
        }

        let sse_decrease = 2.0 * decrease;
        if sse_decrease < config.min_improvement_delta
            && sse_decrease < config.convergence_tolerance * 2.0 * previous
        {
            stop_reason = StopReason::ImprovementBelowDelta;
            break;
        }
        if stale >= config.patience {
            stop_reason = StopReason::HoldoutWorsening;
            break;
        }
    }

    model.set_params(&best_theta)?;
    Ok((
        model,
        TrainingTrace {
            entries,
            stop_reason,
            best_iteration,
            best_holdout_sse: best_holdout,
            training_ids: Vec::new(),
            holdout_ids: Vec::new(),
            target: TargetTransform::LnEffort,
            seed: config.seed,
        },
    ))
}

/// Effort in person-hours: `exp` of the network output.
pub fn predict_effort_ann(model: &AnnModel, record: &ProjectRecord) -> Result<f64> {
    if model.predictors.len() != model.n_inputs() {
        return Err(Error::domain(
            "network inputs are not bound to project attributes",
        ));
    }
    let inputs = model
        .predictors
        .iter()
        .map(|p| p.value(record))
        .collect::<Result<Vec<_>>>()?;
    Ok(exp(forward(model, &inputs)?))
}
