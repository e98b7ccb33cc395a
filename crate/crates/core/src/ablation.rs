//! Leave-one-out elimination of the quality attributes.
//!
//! Six scenarios (all attributes, each one removed, all removed) are fitted
//! independently with the regression and/or network model and scored
//! in-sample on every record.

use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;
use core::fmt;

use crate::ann::{predict_effort_ann, train, AnnConfig, AnnModel, StopReason};
use crate::dataset::ProjectRecord;
use crate::metrics::{evaluate, EvaluationPair, MetricsReport};
use crate::regression::{
    build_frame, fit_ols, predict_effort, FeatureSet, NfrAttribute, RegressionFit,
};
use crate::{Error, Result};

pub const MIN_ABLATION_RECORDS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Scenario {
    /// Short identifier, also accepted by the command line (`no-env`, ...).
    pub key: &'static str,
    /// Independent variables in table form, e.g. "Size, Env, Language, TExp, MExp".
    pub label: &'static str,
    pub features: FeatureSet,
    /// The attribute removed relative to the full scenario, if exactly one.
    pub removed: Option<NfrAttribute>,
}

impl Scenario {
    pub fn from_key(key: &str) -> Option<Scenario> {
        scenarios().into_iter().find(|s| s.key == key)
    }
}

/// The six scenarios in table order.
pub fn scenarios() -> [Scenario; 6] {
    let full = FeatureSet::full();
    let minus = |key, label, attribute| Scenario {
        key,
        label,
        features: full.without(attribute),
        removed: Some(attribute),
    };
    [
        Scenario {
            key: "full",
            label: "Size, Env, Language, TExp, MExp",
            features: full,
            removed: None,
        },
        minus(
            "no-env",
            "Size, Language, TExp, MExp",
            NfrAttribute::Envergure,
        ),
        minus(
            "no-language",
            "Size, Env, TExp, MExp",
            NfrAttribute::Language,
        ),
        minus(
            "no-texp",
            "Size, Env, Language, MExp",
            NfrAttribute::TeamExp,
        ),
        minus(
            "no-mexp",
            "Size, Env, Language, TExp",
            NfrAttribute::ManagerExp,
        ),
        Scenario {
            key: "size-only",
            label: "Size",
            features: FeatureSet::size_only(),
            removed: None,
        },
    ]
}

/// One model column of the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ModelKind {
    Regression,
    Ann,
}

impl ModelKind {
    pub const fn name(self) -> &'static str {
        match self {
            ModelKind::Regression => "regression",
            ModelKind::Ann => "ann",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ModelFamily {
    Regression,
    Ann,
    Both,
}

impl ModelFamily {
    pub fn kinds(self) -> &'static [ModelKind] {
        match self {
            ModelFamily::Regression => &[ModelKind::Regression],
            ModelFamily::Ann => &[ModelKind::Ann],
            ModelFamily::Both => &[ModelKind::Regression, ModelKind::Ann],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AblationConfig {
    /// `ann.seed` is the first seed; further runs use seed + 1, seed + 2, ...
    pub ann: AnnConfig,
    /// Network runs per cell; the cell reports the median of each metric.
    pub seeds: usize,
}

impl Default for AblationConfig {
    fn default() -> Self {
        AblationConfig {
            ann: AnnConfig::default(),
            seeds: 1,
        }
    }
}

impl AblationConfig {
    pub fn seed_list(&self) -> Vec<u64> {
        (0..self.seeds as u64)
            .map(|i| self.ann.seed.wrapping_add(i))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct AnnRun {
    pub seed: u64,
    pub metrics: MetricsReport,
    pub stop_reason: StopReason,
    pub iterations: usize,
    pub model: AnnModel,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum FittedModel {
    Regression(RegressionFit),
    Ann(Vec<AnnRun>),
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct AblationCell {
    pub scenario: Scenario,
    pub kind: ModelKind,
    pub metrics: MetricsReport,
    /// Empty for regression cells.
    pub seeds: Vec<u64>,
    pub model: FittedModel,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct AblationTable {
    pub family: ModelFamily,
    pub n_records: usize,
    pub config: AblationConfig,
    /// Scenario-major, then model kind.
    pub cells: Vec<AblationCell>,
}

impl AblationTable {
    pub fn cell(&self, scenario_key: &str, kind: ModelKind) -> Option<&AblationCell> {
        self.cells
            .iter()
            .find(|c| c.scenario.key == scenario_key && c.kind == kind)
    }

    pub fn kinds(&self) -> Vec<ModelKind> {
        let mut kinds: Vec<ModelKind> = self.cells.iter().map(|c| c.kind).collect();
        kinds.sort();
        kinds.dedup();
        kinds
    }

    /// Scenarios present, in first-appearance order.
    pub fn scenarios(&self) -> Vec<Scenario> {
        let mut out: Vec<Scenario> = Vec::new();
        for c in &self.cells {
            if !out.iter().any(|s| s.key == c.scenario.key) {
                out.push(c.scenario);
            }
        }
        out
    }
}

fn evaluate_with<F>(records: &[ProjectRecord], mut predict: F) -> Result<MetricsReport>
where
    F: FnMut(&ProjectRecord) -> Result<f64>,
{
    let pairs = records
        .iter()
        .map(|r| {
            Ok(EvaluationPair::for_project(
                r.project_id,
                r.effort,
                predict(r)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    evaluate(&pairs)
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.total_cmp(b));
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Metric-wise median; R² is `None` if any run has none.
pub fn median_metrics(reports: &[MetricsReport]) -> Result<MetricsReport> {
    let first = reports
        .first()
        .ok_or_else(|| Error::domain("median of zero metric reports"))?;
    let column =
        |f: fn(&MetricsReport) -> f64| median(&mut reports.iter().map(f).collect::<Vec<_>>());
    let r_squared = reports
        .iter()
        .map(|r| r.r_squared)
        .collect::<Option<Vec<f64>>>()
        .map(|mut v| median(&mut v));
    Ok(MetricsReport {
        mmre: column(|r| r.mmre),
        pred_25: column(|r| r.pred_25),
        rmse: column(|r| r.rmse),
        mean_error: column(|r| r.mean_error),
        r_squared,
        n: first.n,
    })
}

fn regression_cell(records: &[ProjectRecord], scenario: Scenario) -> Result<AblationCell> {
    let fit = fit_ols(&build_frame(records, &scenario.features)?)?;
    let metrics = evaluate_with(records, |r| predict_effort(&fit, r))?;
    Ok(AblationCell {
        scenario,
        kind: ModelKind::Regression,
        metrics,
        seeds: Vec::new(),
        model: FittedModel::Regression(fit),
    })
}

fn ann_cell(
    records: &[ProjectRecord],
    scenario: Scenario,
    config: &AblationConfig,
) -> Result<AblationCell> {
    let seeds = config.seed_list();
    let mut runs = Vec::with_capacity(seeds.len());
    for &seed in &seeds {
        let (model, trace) = train(
            records,
            &scenario.features,
            &config.ann.clone().with_seed(seed),
        )?;
        let metrics = evaluate_with(records, |r| predict_effort_ann(&model, r))?;
        runs.push(AnnRun {
            seed,
            metrics,
            stop_reason: trace.stop_reason,
            iterations: trace.entries.len() - 1,
            model,
        });
    }
    let metrics = median_metrics(&runs.iter().map(|r| r.metrics).collect::<Vec<_>>())?;
    Ok(AblationCell {
        scenario,
        kind: ModelKind::Ann,
        metrics,
        seeds,
        model: FittedModel::Ann(runs),
    })
}

/// Fits every scenario for each model in `family` and scores it on all records.
pub fn run_ablation(
    records: &[ProjectRecord],
    family: ModelFamily,
    config: &AblationConfig,
) -> Result<AblationTable> {
    if records.len() < MIN_ABLATION_RECORDS {
        return Err(Error::InsufficientData {
            needed: MIN_ABLATION_RECORDS,
            got: records.len(),
        });
    }
    if config.seeds == 0 {
        return Err(Error::domain("at least one network seed is required"));
    }
    let mut cells = Vec::new();
    for scenario in scenarios() {
        for &kind in family.kinds() {
            let cell = match kind {
                ModelKind::Regression => regression_cell(records, scenario),
                ModelKind::Ann => ann_cell(records, scenario, config),
            }
            .map_err(|e| Error::Scenario {
                label: format!("{} ({})", scenario.key, kind),
                source: alloc::boxed::Box::new(e),
            })?;
            cells.push(cell);
        }
    }
    Ok(AblationTable {
        family,
        n_records: records.len(),
        config: config.clone(),
        cells,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RankedAttribute {
    pub attribute: NfrAttribute,
    /// MMRE without the attribute minus MMRE of the full scenario.
    pub delta_mmre: f64,
    /// Same difference for R²; `None` when either side is undefined.
    pub delta_r_squared: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AttributeRanking {
    pub kind: ModelKind,
    /// Most significant first.
    pub entries: Vec<RankedAttribute>,
}

/// Orders the four attributes by MMRE degradation when removed (largest
/// first), then by R² loss, then by design-column order.
pub fn rank_attributes(table: &AblationTable, kind: ModelKind) -> Result<AttributeRanking> {
    let metrics = |key: &str| -> Result<MetricsReport> {
        table.cell(key, kind).map(|c| c.metrics).ok_or_else(|| {
            Error::domain(format!(
                "ablation table has no {kind} cell for scenario {key}"
            ))
        })
    };
    let full = metrics("full")?;
    let mut entries = Vec::with_capacity(4);
    for scenario in scenarios() {
        let Some(attribute) = scenario.removed else {
            continue;
        };
        let m = metrics(scenario.key)?;
        entries.push(RankedAttribute {
            attribute,
            delta_mmre: m.mmre - full.mmre,
            delta_r_squared: m.r_squared.zip(full.r_squared).map(|(a, b)| a - b),
        });
    }
    entries.sort_by(|a, b| {
        b.delta_mmre
            .total_cmp(&a.delta_mmre)
            .then_with(|| {
                let (x, y) = (
                    a.delta_r_squared.unwrap_or(0.0),
                    b.delta_r_squared.unwrap_or(0.0),
                );
                x.total_cmp(&y)
            })
            .then_with(|| {
                a.attribute
                    .column_position()
                    .cmp(&b.attribute.column_position())
            })
    });
    Ok(AttributeRanking { kind, entries })
}

impl fmt::Display for AttributeRanking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.entries.iter().enumerate() {
            let r2 = e
                .delta_r_squared
                .map_or_else(|| "n/a".to_string(), |d| format!("{:+.1}", 100.0 * d));
            writeln!(
                f,
                "{}. {} (dMMRE {:+.2}, dR2 {})",
                i + 1,
                e.attribute.name(),
                e.delta_mmre,
                r2
            )?;
        }
        Ok(())
    }
}
