//! Log-linear effort regression: model frames, OLS with ANOVA and VIF
//! diagnostics, stepwise selection and back-transformed prediction.

mod frame;
mod ols;
mod stepwise;

pub use frame::{
    build_frame, build_frame_with, encode_language, encode_language_code, FeatureSet, ModelFrame,
    NfrAttribute, Predictor, INTERCEPT,
};
pub use ols::{
    fit_ols, predict_effort, predict_effort_with, vif, BackTransform, Coefficient, RegressionFit,
};
pub use stepwise::{
    build_stepwise_frame, stepwise_select, unit_label, StepAction, StepwiseStep, StepwiseStop,
    StepwiseTrace,
};
