use alloc::string::String;
use alloc::vec::Vec;

use super::frame::{ModelFrame, Predictor};
use crate::dataset::ProjectRecord;
use crate::math::{exp, sqrt};
use crate::numerics::{
    f_upper_tail_p, solve_least_squares, solve_least_squares_named, t_two_sided_p, Matrix,
};
use crate::{Error, Result};

/// R²_j at or above this is treated as perfect collinearity in VIF.
const VIF_SINGULAR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Coefficient {
    pub name: String,
    /// `None` for the intercept.
    pub predictor: Option<Predictor>,
    pub estimate: f64,
    pub std_error: f64,
    pub t_statistic: f64,
    pub p_value: f64,
    /// `None` for the intercept.
    pub vif: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RegressionFit {
    /// Intercept first, then predictors in frame order.
    pub coefficients: Vec<Coefficient>,
    pub n: usize,
    pub residual_df: usize,
    pub rss: f64,
    pub tss: f64,
    /// Log-scale `1 − RSS/TSS`.
    pub r_squared: f64,
    pub adj_r_squared: f64,
    pub residual_std_error: f64,
    /// Overall F test against the intercept-only model (`None` without predictors).
    pub f_statistic: Option<f64>,
    pub model_p_value: Option<f64>,
    /// Duan's smearing factor `mean(exp(residual))`, used only when requested.
    pub smearing_factor: f64,
    pub row_ids: Vec<u32>,
}

/// How a log-scale prediction is mapped back to person-hours.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum BackTransform {
    /// `exp(ŷ)`.
    #[default]
    Plain,
    /// `exp(ŷ) · mean(exp(residual))`.
    Smearing,
}

impl RegressionFit {
    pub fn predictors(&self) -> Vec<Predictor> {
        self.coefficients
            .iter()
            .filter_map(|c| c.predictor)
            .collect()
    }

    pub fn coefficient(&self, predictor: Predictor) -> Option<&Coefficient> {
        self.coefficients
            .iter()
            .find(|c| c.predictor == Some(predictor))
    }

    pub fn intercept(&self) -> &Coefficient {
        &self.coefficients[0]
    }

    /// Log-scale prediction from predictor values in the fit's column order
    /// (intercept excluded).
    pub fn predict_log_row(&self, values: &[f64]) -> Result<f64> {
        if values.len() + 1 != self.coefficients.len() {
            return Err(Error::domain(alloc::format!(
                "expected {} predictor values, got {}",
                self.coefficients.len() - 1,
                values.len()
            )));
        }
        Ok(self.coefficients[0].estimate
            + self.coefficients[1..]
                .iter()
                .zip(values)
                .map(|(c, v)| c.estimate * v)
                .sum::<f64>())
    }

    pub fn predict_log(&self, record: &ProjectRecord) -> Result<f64> {
        let values = self
            .coefficients
            .iter()
            .filter_map(|c| c.predictor)
            .map(|p| p.value(record))
            .collect::<Result<Vec<_>>>()?;
        self.predict_log_row(&values)
    }
}

/// Ordinary least squares with coefficient t tests, the overall F test and
/// per-predictor VIF.
pub fn fit_ols(frame: &ModelFrame) -> Result<RegressionFit> {
    let (n, p) = (frame.n(), frame.p());
    if n <= p {
        return Err(Error::InsufficientData {
            needed: p + 1,
            got: n,
        });
    }
    let sol = solve_least_squares_named(&frame.design, &frame.response, &frame.column_names)?;
    let residual_df = n - p;
    let rss = sol.residual_sum_of_squares;
    let mean_y = frame.response.iter().sum::<f64>() / n as f64;
    let tss: f64 = frame
        .response
        .iter()
        .map(|y| (y - mean_y) * (y - mean_y))
        .sum();
    let sigma2 = rss / residual_df as f64;
    let r_squared = if tss > 0.0 { 1.0 - rss / tss } else { 1.0 };
    let adj_r_squared = 1.0 - (1.0 - r_squared) * (n - 1) as f64 / residual_df as f64;

    let (f_statistic, model_p_value) = if p > 1 {
        let f = if rss > 0.0 {
            ((tss - rss) / (p - 1) as f64) / sigma2
        } else {
            f64::INFINITY
        };
        let f = f.max(0.0);
        (
            Some(f),
            Some(f_upper_tail_p(f, (p - 1) as u32, residual_df as u32)?),
        )
    } else {
        (None, None)
    };

    let vifs = vif(frame)?;
    let fitted = frame.design.mul_vec(&sol.coefficients);
    let smearing_factor = frame
        .response
        .iter()
        .zip(&fitted)
        .map(|(y, f)| exp(y - f))
        .sum::<f64>()
        / n as f64;

    let mut coefficients = Vec::with_capacity(p);
    for j in 0..p {
        let estimate = sol.coefficients[j];
        let std_error = sqrt(sigma2 * sol.unscaled_covariance[(j, j)]);
        let t_statistic = if std_error > 0.0 {
            estimate / std_error
        } else if estimate == 0.0 {
            0.0
        } else {
            f64::INFINITY.copysign(estimate)
        };
        coefficients.push(Coefficient {
            name: frame.column_names[j].clone(),
            predictor: if j == 0 {
                None
            } else {
                Some(frame.predictors[j - 1])
            },
            estimate,
            std_error,
            t_statistic,
            p_value: t_two_sided_p(t_statistic, residual_df as u32)?,
            vif: if j == 0 { None } else { Some(vifs[j - 1].1) },
        });
    }

    Ok(RegressionFit {
        coefficients,
        n,
        residual_df,
        rss,
        tss,
        r_squared,
        adj_r_squared,
        residual_std_error: sqrt(sigma2),
        f_statistic,
        model_p_value,
        smearing_factor,
        row_ids: frame.row_ids.clone(),
    })
}

/// Variance inflation factors `1 / (1 − R²_j)` for each non-intercept column,
/// from regressing the column on an intercept and the other predictors.
/// A lone predictor has VIF 1.
pub fn vif(frame: &ModelFrame) -> Result<Vec<(Predictor, f64)>> {
    let k = frame.predictors.len();
    let n = frame.n();
    let mut out = Vec::with_capacity(k);
    for j in 0..k {
        let predictor = frame.predictors[j];
        let infinite = || Error::InfiniteVif {
            predictor: String::from(predictor.name()),
        };
        let target = frame.design.column(j + 1);
        let mean = target.iter().sum::<f64>() / n as f64;
        let sst: f64 = target.iter().map(|v| (v - mean) * (v - mean)).sum();
        if !(sst > 0.0) {
            return Err(infinite());
        }
        if k == 1 {
            out.push((predictor, 1.0));
            continue;
        }
        let others: Vec<usize> = (0..=k).filter(|&c| c != j + 1).collect();
        let aux: Matrix = frame.design.select_columns(&others);
        let sol = match solve_least_squares(&aux, &target) {
            Ok(s) => s,
            Err(Error::Collinear { .. }) => return Err(infinite()),
            Err(e) => return Err(e),
        };
        let r2 = 1.0 - sol.residual_sum_of_squares / sst;
        if r2 >= 1.0 - VIF_SINGULAR {
            return Err(infinite());
        }
        out.push((predictor, 1.0 / (1.0 - r2)));
    }
    Ok(out)
}

/// Effort in person-hours: `exp` of the log-scale linear predictor.
pub fn predict_effort(fit: &RegressionFit, record: &ProjectRecord) -> Result<f64> {
    predict_effort_with(fit, record, BackTransform::Plain)
}

pub fn predict_effort_with(
    fit: &RegressionFit,
    record: &ProjectRecord,
    back_transform: BackTransform,
) -> Result<f64> {
    let y = exp(fit.predict_log(record)?);
    Ok(match back_transform {
        BackTransform::Plain => y,
        BackTransform::Smearing => y * fit.smearing_factor,
    })
}

#[cfg(test)]
mod tests {
    use super::super::frame::tests::record;
    use super::super::frame::{build_frame, build_frame_with, FeatureSet, INTERCEPT};
    use super::*;
    use crate::dataset::Language;
    use alloc::vec;
    use alloc::vec::Vec;
    use proptest::prelude::*;

    fn frame_from(xs: &[Vec<f64>], y: &[f64], predictors: &[Predictor]) -> ModelFrame {
        let rows: Vec<Vec<f64>> = xs
            .iter()
            .map(|r| {
                let mut v = vec![1.0];
                v.extend(r);
                v
            })
            .collect();
        let mut names = vec![String::from(INTERCEPT)];
        names.extend(predictors.iter().map(|p| String::from(p.name())));
        ModelFrame {
            column_names: names,
            predictors: predictors.to_vec(),
            design: Matrix::from_rows(&rows),
            response: y.to_vec(),
            row_ids: (1..=y.len() as u32).collect(),
        }
    }

    #[test]
    fn noiseless_line() {
        let xs: Vec<Vec<f64>> = (0..6).map(|i| vec![i as f64]).collect();
        let y: Vec<f64> = (0..6).map(|i| 2.0 + 3.0 * i as f64).collect();
        let fit = fit_ols(&frame_from(&xs, &y, &[Predictor::LnSize])).unwrap();
        assert!((fit.coefficients[0].estimate - 2.0).abs() < 1e-12);
        assert!((fit.coefficients[1].estimate - 3.0).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert_eq!(fit.residual_df, 4);
        assert_eq!(fit.coefficients[1].vif, Some(1.0));
    }

    #[test]
    fn textbook_anova_values() {
        // y = 1 + 2x + e with e = (+1, −1, −1, +1, 0): hand-computed OLS.
        let xs: Vec<Vec<f64>> = (1..=5).map(|i| vec![i as f64]).collect();
        let e = [1.0, -1.0, -1.0, 1.0, 0.0];
        let y: Vec<f64> = (1..=5).map(|i| 1.0 + 2.0 * i as f64 + e[i - 1]).collect();
        let fit = fit_ols(&frame_from(&xs, &y, &[Predictor::LnSize])).unwrap();
        // Σ(x−3)e = 0, so the residuals are exactly e and the slope stays 2.
        assert!((fit.coefficients[1].estimate - 2.0).abs() < 1e-12);
        assert!((fit.coefficients[0].estimate - 1.0).abs() < 1e-12);
        assert!((fit.rss - 4.0).abs() < 1e-12);
        // se(slope) = sqrt((4/3)/10); t = 2 / se.
        let se = (4.0f64 / 3.0 / 10.0).sqrt();
        assert!((fit.coefficients[1].std_error - se).abs() < 1e-12);
        let f = fit.f_statistic.unwrap();
        assert!((f - 40.0 / (4.0 / 3.0)).abs() < 1e-9);
        // F(1, ν) = t².
        assert!((f - fit.coefficients[1].t_statistic.powi(2)).abs() < 1e-9);
        assert!((fit.model_p_value.unwrap() - fit.coefficients[1].p_value).abs() < 1e-12);
    }

    #[test]
    fn orthogonal_predictors_have_unit_vif() {
        let xs = vec![
            vec![1.0, 1.0],
            vec![1.0, -1.0],
            vec![-1.0, 1.0],
            vec![-1.0, -1.0],
            vec![1.0, 1.0],
            vec![1.0, -1.0],
            vec![-1.0, 1.0],
            vec![-1.0, -1.0],
        ];
        let y = [1.0, 2.0, 3.0, 5.0, 8.0, 13.0, 21.0, 34.0];
        let frame = frame_from(&xs, &y, &[Predictor::TeamExp, Predictor::ManagerExp]);
        let v = vif(&frame).unwrap();
        assert!((v[0].1 - 1.0).abs() < 1e-12 && (v[1].1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn duplicated_predictor_has_infinite_vif() {
        let xs: Vec<Vec<f64>> = (0..8)
            .map(|i| vec![i as f64, (i * i) as f64, i as f64])
            .collect();
        let y: Vec<f64> = (0..8).map(|i| (i as f64).sin()).collect();
        let frame = frame_from(
            &xs,
            &y,
            &[
                Predictor::TeamExp,
                Predictor::ManagerExp,
                Predictor::Envergure,
            ],
        );
        assert_eq!(
            vif(&frame).unwrap_err(),
            Error::InfiniteVif {
                predictor: "TExp".into()
            }
        );
        assert_eq!(
            fit_ols(&frame).unwrap_err(),
            Error::Collinear {
                column: "Env".into()
            }
        );
    }

    #[test]
    fn vif_matches_two_predictor_correlation_formula() {
        // For two predictors VIF = 1 / (1 − r²).
        let a: Vec<f64> = (0..12).map(|i| i as f64).collect();
        let b: Vec<f64> = (0..12)
            .map(|i| ((i * 7) % 5) as f64 + 0.3 * i as f64)
            .collect();
        let xs: Vec<Vec<f64>> = a.iter().zip(&b).map(|(x, z)| vec![*x, *z]).collect();
        let y: Vec<f64> = (0..12).map(|i| (i as f64 * 0.37).cos()).collect();
        let frame = frame_from(&xs, &y, &[Predictor::TeamExp, Predictor::ManagerExp]);
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let (ma, mb) = (mean(&a), mean(&b));
        let sab: f64 = a.iter().zip(&b).map(|(x, z)| (x - ma) * (z - mb)).sum();
        let saa: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
        let sbb: f64 = b.iter().map(|z| (z - mb).powi(2)).sum();
        let r2 = sab * sab / (saa * sbb);
        let v = vif(&frame).unwrap();
        assert!((v[0].1 - 1.0 / (1.0 - r2)).abs() < 1e-10);
        assert!((v[1].1 - 1.0 / (1.0 - r2)).abs() < 1e-10);
    }

    #[test]
    fn insufficient_rows() {
        let xs: Vec<Vec<f64>> = (0..2).map(|i| vec![i as f64]).collect();
        assert!(matches!(
            fit_ols(&frame_from(&xs, &[1.0, 2.0], &[Predictor::LnSize])),
            Err(Error::InsufficientData { needed: 3, got: 2 })
        ));
    }

    fn log_linear_records(n: u32) -> Vec<ProjectRecord> {
        (1..=n)
            .map(|i| {
                let lang = match i % 3 {
                    0 => Language::BasicCobol,
                    1 => Language::AdvancedCobol,
                    _ => Language::FourthGeneration,
                };
                let mut r = record(i, 1.0, 50.0 + 13.0 * i as f64, lang);
                let (l1, l2) = super::super::frame::encode_language(lang);
                let lp = 1.46 + 0.88 * r.points_non_adjust.ln() + 1.41 * l1 + 1.38 * l2
                    - 0.0471 * r.team_exp as f64
                    + 0.0623 * r.manager_exp as f64
                    + 0.0204 * r.envergure as f64;
                r.effort = lp.exp();
                r
            })
            .collect()
    }

    #[test]
    fn recovers_noiseless_log_linear_effort() {
        let recs = log_linear_records(20);
        let fit = fit_ols(&build_frame(&recs, &FeatureSet::full()).unwrap()).unwrap();
        let want = [1.46, 0.88, 1.41, 1.38, -0.0471, 0.0623, 0.0204];
        for (c, w) in fit.coefficients.iter().zip(want) {
            assert!((c.estimate - w).abs() < 1e-8, "{}: {}", c.name, c.estimate);
        }
        for r in &recs {
            let pred = predict_effort(&fit, r).unwrap();
            assert!((pred - r.effort).abs() / r.effort < 1e-6);
        }
        assert!((fit.smearing_factor - 1.0).abs() < 1e-9);
    }

    #[test]
    fn hand_evaluated_prediction() {
        // Coefficients in model order, size 298, 4GL, TExp = MExp = 2, Env = 30.
        let recs = log_linear_records(20);
        let fit = fit_ols(&build_frame(&recs, &FeatureSet::full()).unwrap()).unwrap();
        let mut r = recs[0].clone();
        r.points_non_adjust = 298.0;
        r.language = Language::FourthGeneration;
        r.team_exp = 2;
        r.manager_exp = 2;
        r.envergure = 30;
        // exp(1.46 + 0.88·ln 298 − 0.0942 + 0.1246 + 0.612) = exp(7.11368...) ≈ 1228.
        let hand = (1.46 + 0.88 * 298f64.ln() - 0.0471 * 2.0 + 0.0623 * 2.0 + 0.0204 * 30.0).exp();
        assert!((hand - 1228.0).abs() < 5.0, "{hand}");
        assert!((predict_effort(&fit, &r).unwrap() - hand).abs() / hand < 1e-6);
    }

    #[test]
    fn intercept_only_prediction() {
        let fit = RegressionFit {
            coefficients: vec![
                Coefficient {
                    name: INTERCEPT.into(),
                    predictor: None,
                    estimate: 7.0,
                    std_error: 0.0,
                    t_statistic: 0.0,
                    p_value: 1.0,
                    vif: None,
                },
                Coefficient {
                    name: "ln(Size)".into(),
                    predictor: Some(Predictor::LnSize),
                    estimate: 0.0,
                    std_error: 0.0,
                    t_statistic: 0.0,
                    p_value: 1.0,
                    vif: Some(1.0),
                },
            ],
            n: 0,
            residual_df: 0,
            rss: 0.0,
            tss: 0.0,
            r_squared: 0.0,
            adj_r_squared: 0.0,
            residual_std_error: 0.0,
            f_statistic: None,
            model_p_value: None,
            smearing_factor: 1.5,
            row_ids: vec![],
        };
        for r in log_linear_records(5) {
            assert!((predict_effort(&fit, &r).unwrap() - 7f64.exp()).abs() < 1e-9);
            let smeared = predict_effort_with(&fit, &r, BackTransform::Smearing).unwrap();
            assert!((smeared - 1.5 * 7f64.exp()).abs() < 1e-9);
        }
        assert!(fit.predict_log_row(&[1.0, 2.0]).is_err());
    }

    fn noisy_records(seed: u64, n: u32) -> Vec<ProjectRecord> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut recs = log_linear_records(n);
        for r in &mut recs {
            r.team_exp = rng.random_range(0..5);
            r.manager_exp = rng.random_range(0..8);
            r.envergure = rng.random_range(5..50);
            r.effort *= rng.random_range(0.6..1.6);
        }
        recs
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn predictions_ignore_column_order(seed in 0u64..1000, rot in 1usize..6) {
            let recs = noisy_records(seed, 25);
            let mut order = Predictor::MODEL_ORDER.to_vec();
            order.rotate_left(rot);
            let a = fit_ols(&build_frame(&recs, &FeatureSet::full()).unwrap()).unwrap();
            let b = fit_ols(&build_frame_with(&recs, &order).unwrap()).unwrap();
            for r in &recs {
                let (pa, pb) = (predict_effort(&a, r).unwrap(), predict_effort(&b, r).unwrap());
                prop_assert!((pa - pb).abs() / pa < 1e-9);
            }
            prop_assert!((a.r_squared - b.r_squared).abs() < 1e-10);
        }

        #[test]
        fn r_squared_invariant_under_affine_rescaling(seed in 0u64..1000, scale in 0.1f64..50.0, shift in -20.0f64..20.0) {
            let recs = noisy_records(seed, 25);
            let frame = build_frame(&recs, &FeatureSet::full()).unwrap();
            let mut scaled = frame.clone();
            let j = 4; // TExp column
            for i in 0..scaled.n() {
                scaled.design[(i, j)] = scale * scaled.design[(i, j)] + shift;
            }
            let a = fit_ols(&frame).unwrap();
            let b = fit_ols(&scaled).unwrap();
            prop_assert!((a.r_squared - b.r_squared).abs() < 1e-10);
            prop_assert!((a.coefficients[j].estimate - scale * b.coefficients[j].estimate).abs() < 1e-9);
            prop_assert!((a.coefficients[j].p_value - b.coefficients[j].p_value).abs() < 1e-8);
        }

        #[test]
        fn residuals_orthogonal_to_design(seed in 0u64..1000) {
            let recs = noisy_records(seed, 30);
            let frame = build_frame(&recs, &FeatureSet::full()).unwrap();
            let fit = fit_ols(&frame).unwrap();
            let beta: Vec<f64> = fit.coefficients.iter().map(|c| c.estimate).collect();
            let fitted = frame.design.mul_vec(&beta);
            let resid: Vec<f64> = frame.response.iter().zip(&fitted).map(|(y, f)| y - f).collect();
            for j in 0..frame.p() {
                let col = frame.design.column(j);
                let norm = col.iter().map(|v| v * v).sum::<f64>().sqrt();
                let dot: f64 = col.iter().zip(&resid).map(|(c, r)| c * r).sum();
                prop_assert!(dot.abs() <= 1e-8 * norm.max(1.0));
            }
            for c in &fit.coefficients[1..] {
                prop_assert!(c.vif.unwrap() >= 1.0 - 1e-12);
            }
        }

        #[test]
        fn nested_models_never_fit_better(seed in 0u64..1000) {
            let recs = noisy_records(seed, 30);
            let full = fit_ols(&build_frame(&recs, &FeatureSet::full()).unwrap()).unwrap();
            for attr in super::super::frame::NfrAttribute::ALL {
                let fs = FeatureSet::full().without(attr);
                let sub = fit_ols(&build_frame(&recs, &fs).unwrap()).unwrap();
                prop_assert!(sub.rss >= full.rss - 1e-9);
                let size = fit_ols(&build_frame(&recs, &FeatureSet::size_only()).unwrap()).unwrap();
                prop_assert!(size.rss >= sub.rss - 1e-9);
            }
        }
    }
}
