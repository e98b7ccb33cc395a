use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::Matrix;
use crate::math::sqrt;
use crate::{Error, Result};

/// A column whose Householder pivot falls below this fraction of its own
/// norm is treated as linearly dependent on the columns before it.
pub const PIVOT_THRESHOLD: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LinearSystemSolution {
    pub coefficients: Vec<f64>,
    pub residual_sum_of_squares: f64,
    /// `(XᵀX)⁻¹`, computed as `R⁻¹R⁻ᵀ` from the QR factor.
    pub unscaled_covariance: Matrix,
    pub rank: usize,
}

/// Least squares by Householder QR in column order.
///
/// Fails with [`Error::Collinear`] naming the first column (by index) whose
/// residual after projecting out the earlier columns is negligible.
pub fn solve_least_squares(design: &Matrix, response: &[f64]) -> Result<LinearSystemSolution> {
    solve_impl(design, response).map_err(|e| e.into_error(|j| format!("column {j}")))
}

/// As [`solve_least_squares`], reporting a dependent column by name.
pub fn solve_least_squares_named(
    design: &Matrix,
    response: &[f64],
    names: &[String],
) -> Result<LinearSystemSolution> {
    solve_impl(design, response).map_err(|e| {
        e.into_error(|j| {
            names
                .get(j)
                .cloned()
                .unwrap_or_else(|| format!("column {j}"))
        })
    })
}

enum SolveError {
    Shape(Error),
    Dependent(usize),
}

impl SolveError {
    fn into_error(self, name: impl Fn(usize) -> String) -> Error {
        match self {
            SolveError::Shape(e) => e,
            SolveError::Dependent(j) => Error::Collinear { column: name(j) },
        }
    }
}

fn solve_impl(design: &Matrix, response: &[f64]) -> Result<LinearSystemSolution, SolveError> {
    let (n, p) = (design.rows(), design.cols());
    if p == 0 {
        return Err(SolveError::Shape(Error::domain("design has no columns")));
    }
    if response.len() != n {
        return Err(SolveError::Shape(Error::domain(format!(
            "response length {} does not match {} design rows",
            response.len(),
            n
        ))));
    }
    if n < p {
        return Err(SolveError::Shape(Error::InsufficientData {
            needed: p,
            got: n,
        }));
    }
    if design.values().iter().any(|v| !v.is_finite()) || response.iter().any(|v| !v.is_finite()) {
        return Err(SolveError::Shape(Error::domain(
            "non-finite value in least-squares input",
        )));
    }

    let mut a = design.clone();
    let mut qty = response.to_vec();
    let mut v = vec![0.0; n];

    for j in 0..p {
        let original_norm = sqrt((0..n).map(|i| design[(i, j)] * design[(i, j)]).sum());
        let norm = sqrt((j..n).map(|i| a[(i, j)] * a[(i, j)]).sum());
        if original_norm == 0.0 || norm <= PIVOT_THRESHOLD * original_norm {
            return Err(SolveError::Dependent(j));
        }
        let alpha = if a[(j, j)] > 0.0 { -norm } else { norm };
        for i in j..n {
            v[i] = a[(i, j)];
        }
        v[j] -= alpha;
        let vnorm2: f64 = (j..n).map(|i| v[i] * v[i]).sum();
        if vnorm2 > 0.0 {
            for k in j + 1..p {
                let dot: f64 = (j..n).map(|i| v[i] * a[(i, k)]).sum();
                let s = 2.0 * dot / vnorm2;
                for i in j..n {
                    a[(i, k)] -= s * v[i];
                }
            }
            let dot: f64 = (j..n).map(|i| v[i] * qty[i]).sum();
            let s = 2.0 * dot / vnorm2;
            for i in j..n {
                qty[i] -= s * v[i];
            }
        }
        a[(j, j)] = alpha;
        for i in j + 1..n {
            a[(i, j)] = 0.0;
        }
    }

    // Back substitution R β = (Qᵀy)[..p].
    let mut beta = vec![0.0; p];
    for j in (0..p).rev() {
        let tail: f64 = (j + 1..p).map(|k| a[(j, k)] * beta[k]).sum();
        beta[j] = (qty[j] - tail) / a[(j, j)];
    }
    let rss: f64 = qty[p..].iter().map(|r| r * r).sum();

    // R⁻¹ (upper triangular), then (XᵀX)⁻¹ = R⁻¹ R⁻ᵀ.
    let mut rinv = Matrix::zeros(p, p);
    for col in 0..p {
        for j in (0..=col).rev() {
            let rhs = if j == col { 1.0 } else { 0.0 };
            let tail: f64 = (j + 1..=col).map(|k| a[(j, k)] * rinv[(k, col)]).sum();
            rinv[(j, col)] = (rhs - tail) / a[(j, j)];
        }
    }
    let mut cov = Matrix::zeros(p, p);
    for i in 0..p {
        for k in i..p {
            let s: f64 = (k.max(i)..p).map(|m| rinv[(i, m)] * rinv[(k, m)]).sum();
            cov[(i, k)] = s;
            cov[(k, i)] = s;
        }
    }

    Ok(LinearSystemSolution {
        coefficients: beta,
        residual_sum_of_squares: rss,
        unscaled_covariance: cov,
        rank: p,
    })
}
