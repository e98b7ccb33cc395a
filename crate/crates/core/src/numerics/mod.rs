//! Dense least squares, special functions, t/F tail probabilities and a
//! normality test. Only what the effort pipeline needs.

mod dist;
mod lstsq;
mod matrix;
mod normality;
mod special;

pub use dist::{f_upper_tail_p, normal_cdf, t_two_sided_p};
pub use lstsq::{
    solve_least_squares, solve_least_squares_named, LinearSystemSolution, PIVOT_THRESHOLD,
};
pub use matrix::Matrix;
pub use normality::{
    normality_test, NormalityReport, AD_CRITICAL_VALUE_5_PERCENT, MIN_NORMALITY_SAMPLE,
};
pub use special::{ln_gamma, regularized_incomplete_beta};
