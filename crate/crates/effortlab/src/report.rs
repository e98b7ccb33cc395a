//! Markdown, CSV and JSON renderings of the analysis results.
//!
//! Markdown rounds the way the published tables do (MMRE to two decimals,
//! PRED as a whole percentage, RMSE and mean error as integers, R² as a
//! percentage with one decimal). CSV and JSON keep full precision. Every
//! renderer is a pure function of its inputs, so output is byte-stable.

use std::fmt::Write as _;

use effortlab_core::ablation::{AblationTable, AttributeRanking, FittedModel, ModelKind};
use effortlab_core::ann::StopReason;
use effortlab_core::dataset::{format_ids, Attribute, DatasetSummary, Violation};
use effortlab_core::metrics::MetricsReport;
use effortlab_core::numerics::NormalityReport;
use effortlab_core::regression::{RegressionFit, StepAction, StepwiseStop, StepwiseTrace};
use serde_json::{json, Value};

pub const SCHEMA_ID: &str = "effortlab-report/1";

/// JSON Schema that every `--format json` report validates against.
pub const REPORT_SCHEMA: &str = include_str!("../schema/report.schema.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Markdown,
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetInfo {
    pub path: String,
    pub sha256: String,
    pub records_parsed: usize,
    pub records_complete: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReportContext {
    pub dataset: Option<DatasetInfo>,
}

impl ReportContext {
    fn json(&self) -> Value {
        match &self.dataset {
            Some(d) => json!({
                "path": d.path,
                "sha256": d.sha256,
                "records_parsed": d.records_parsed,
                "records_complete": d.records_complete,
            }),
            None => Value::Null,
        }
    }

    fn markdown_preamble(&self, out: &mut String) {
        if let Some(d) = &self.dataset {
            let _ = writeln!(
                out,
                "Dataset: {} (sha256 {}), {} parsed, {} complete\n",
                d.path, d.sha256, d.records_parsed, d.records_complete
            );
        }
    }
}

fn envelope(kind: &str, ctx: &ReportContext, body: Value) -> String {
    let mut doc = json!({
        "schema": SCHEMA_ID,
        "kind": kind,
        "tool": { "name": env!("CARGO_PKG_NAME"), "version": env!("CARGO_PKG_VERSION") },
        "dataset": ctx.json(),
    });
    if let (Value::Object(d), Value::Object(b)) = (&mut doc, body) {
        d.extend(b);
    }
    let mut s = serde_json::to_string_pretty(&doc).expect("report values serialize");
    s.push('\n');
    s
}

/// Fixed decimals without a "-0" artifact.
pub fn fixed(x: f64, decimals: usize) -> String {
    let s = format!("{x:.decimals$}");
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

/// Roughly `digits` significant figures, never fewer than two decimals.
pub fn significant(x: f64, digits: i32) -> String {
    if x == 0.0 || !x.is_finite() {
        return fixed(x, 2);
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (digits - 1 - magnitude).clamp(2, 10) as usize;
    fixed(x, decimals)
}

/// Like [`fixed`] with an explicit `+` on non-negative values.
pub fn signed(x: f64, decimals: usize) -> String {
    let s = fixed(x, decimals);
    if s.starts_with('-') {
        s
    } else {
        format!("+{s}")
    }
}

pub fn mmre_text(m: f64) -> String {
    fixed(m, 2)
}

pub fn pred_text(p: f64) -> String {
    fixed(100.0 * p, 0)
}

pub fn whole(x: f64) -> String {
    fixed(x, 0)
}

pub fn r_squared_text(r: Option<f64>) -> String {
    r.map_or_else(|| "n/a".to_string(), |r| fixed(100.0 * r, 1))
}

pub fn p_value_text(p: f64) -> String {
    fixed(p, 3)
}

fn metrics_json(m: &MetricsReport) -> Value {
    json!({
        "n": m.n,
        "mmre": m.mmre,
        "pred_25": m.pred_25,
        "rmse": m.rmse,
        "mean_error": m.mean_error,
        "r_squared": m.r_squared,
    })
}

fn metric_cells(m: &MetricsReport) -> [String; 5] {
    [
        mmre_text(m.mmre),
        pred_text(m.pred_25),
        whole(m.rmse),
        whole(m.mean_error),
        r_squared_text(m.r_squared),
    ]
}

fn csv_text(rows: &[Vec<String>]) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

fn opt_num(x: Option<f64>) -> String {
    x.map_or_else(String::new, |v| v.to_string())
}

fn md_row(out: &mut String, cells: &[String]) {
    let _ = writeln!(out, "| {} |", cells.join(" | "));
}

fn md_header(out: &mut String, cells: &[&str]) {
    let _ = writeln!(out, "| {} |", cells.join(" | "));
    let rule: Vec<&str> = cells.iter().map(|_| "---").collect();
    let _ = writeln!(out, "|{}|", rule.join("|"));
}

const METRIC_HEADERS: [&str; 5] = ["MMRE", "PRED(.25)", "RMSE", "MEAN", "R²"];

// ---------------------------------------------------------------- ablation

pub fn render_ablation(
    table: &AblationTable,
    rankings: &[AttributeRanking],
    ctx: &ReportContext,
    format: OutputFormat,
) -> String {
    match format {
        OutputFormat::Markdown => ablation_markdown(table, rankings, ctx),
        OutputFormat::Csv => ablation_csv(table),
        OutputFormat::Json => ablation_json(table, rankings, ctx),
    }
}

fn ablation_markdown(
    table: &AblationTable,
    rankings: &[AttributeRanking],
    ctx: &ReportContext,
) -> String {
    let mut out = String::new();
    ctx.markdown_preamble(&mut out);
    let kinds = table.family.kinds();
    let mut header = vec!["Independent Variables".to_string()];
    for kind in kinds {
        let prefix = match kind {
            ModelKind::Regression => "Regression",
            ModelKind::Ann => "ANN",
        };
        header.extend(METRIC_HEADERS.iter().map(|h| format!("{prefix} {h}")));
    }
    md_header(
        &mut out,
        &header.iter().map(String::as_str).collect::<Vec<_>>(),
    );
    for scenario in table.scenarios() {
        let mut row = vec![scenario.label.to_string()];
        for &kind in kinds {
            match table.cell(scenario.key, kind) {
                Some(c) => row.extend(metric_cells(&c.metrics)),
                None => row.extend(std::iter::repeat_n(String::new(), 5)),
            }
        }
        md_row(&mut out, &row);
    }
    if table.cells.iter().any(|c| c.kind == ModelKind::Ann) {
        let seeds: Vec<String> = table
            .config
            .seed_list()
            .iter()
            .map(u64::to_string)
            .collect();
        let _ = writeln!(
            out,
            "\nANN cells: median over seed(s) {}.",
            seeds.join(", ")
        );
    }
    for ranking in rankings {
        let _ = writeln!(out, "\nAttribute ranking ({}):\n", ranking.kind);
        md_header(&mut out, &["Rank", "Attribute", "ΔMMRE", "ΔR² (points)"]);
        for (i, e) in ranking.entries.iter().enumerate() {
            md_row(
                &mut out,
                &[
                    (i + 1).to_string(),
                    e.attribute.name().to_string(),
                    signed(e.delta_mmre, 2),
                    e.delta_r_squared
                        .map_or_else(|| "n/a".to_string(), |d| signed(100.0 * d, 1)),
                ],
            );
        }
    }
    out
}

fn ablation_csv(table: &AblationTable) -> String {
    let mut rows = vec![[
        "scenario",
        "label",
        "model",
        "n",
        "mmre",
        "pred_25",
        "rmse",
        "mean_error",
        "r_squared",
        "seeds",
    ]
    .map(String::from)
    .to_vec()];
    for c in &table.cells {
        let m = &c.metrics;
        rows.push(vec![
            c.scenario.key.to_string(),
            c.scenario.label.to_string(),
            c.kind.name().to_string(),
            m.n.to_string(),
            m.mmre.to_string(),
            m.pred_25.to_string(),
            m.rmse.to_string(),
            m.mean_error.to_string(),
            opt_num(m.r_squared),
            c.seeds
                .iter()
                .map(u64::to_string)
                .collect::<Vec<_>>()
                .join(";"),
        ]);
    }
    csv_text(&rows)
}

fn ablation_json(
    table: &AblationTable,
    rankings: &[AttributeRanking],
    ctx: &ReportContext,
) -> String {
    let cells: Vec<Value> = table
        .cells
        .iter()
        .map(|c| {
            let model = match &c.model {
                FittedModel::Regression(fit) => json!({
                    "coefficients": fit.coefficients.iter().map(|k| json!({
                        "name": k.name, "estimate": k.estimate, "p_value": k.p_value,
                    })).collect::<Vec<_>>(),
                    "log_r_squared": fit.r_squared,
                }),
                FittedModel::Ann(runs) => json!({
                    "runs": runs.iter().map(|r| json!({
                        "seed": r.seed,
                        "stop_reason": r.stop_reason.as_str(),
                        "iterations": r.iterations,
                        "hidden_nodes": r.model.n_hidden(),
                        "metrics": metrics_json(&r.metrics),
                    })).collect::<Vec<_>>(),
                }),
            };
            json!({
                "scenario": c.scenario.key,
                "label": c.scenario.label,
                "model": c.kind.name(),
                "features": c.scenario.features.predictors().iter().map(|p| p.name()).collect::<Vec<_>>(),
                "metrics": metrics_json(&c.metrics),
                "seeds": c.seeds,
                "fit": model,
            })
        })
        .collect();
    let ann = &table.config.ann;
    let body = json!({
        "config": {
            "family": table.family.kinds().iter().map(|k| k.name()).collect::<Vec<_>>(),
            "records": table.n_records,
            "seeds": table.config.seed_list(),
            "ann": {
                "hidden_nodes": ann.hidden_nodes,
                "max_iterations": ann.max_iterations,
                "convergence_tolerance": ann.convergence_tolerance,
                "min_improvement_delta": ann.min_improvement_delta,
                "min_gradient": ann.min_gradient,
                "holdout_fraction": ann.holdout_fraction,
                "patience": ann.patience,
            },
        },
        "cells": cells,
        "rankings": rankings.iter().map(|r| json!({
            "model": r.kind.name(),
            "entries": r.entries.iter().map(|e| json!({
                "attribute": e.attribute.name(),
                "delta_mmre": e.delta_mmre,
                "delta_r_squared": e.delta_r_squared,
            })).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    });
    envelope("ablation", ctx, body)
}

// ---------------------------------------------------------------- fit

#[derive(Debug, Clone, PartialEq)]
pub struct AnnFitSummary {
    pub runs: Vec<AnnRunSummary>,
    /// Median over runs.
    pub metrics: MetricsReport,
    pub hidden_nodes: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnRunSummary {
    pub seed: u64,
    pub stop_reason: StopReason,
    pub iterations: usize,
    pub metrics: MetricsReport,
}

/// Everything the `fit` command can report.
#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub scenario: String,
    pub regression: Option<(RegressionFit, MetricsReport)>,
    pub ann: Option<AnnFitSummary>,
    pub stepwise: Option<StepwiseTrace>,
}

pub fn render_fit(report: &FitReport, ctx: &ReportContext, format: OutputFormat) -> String {
    match format {
        OutputFormat::Markdown => fit_markdown(report, ctx),
        OutputFormat::Csv => fit_csv(report),
        OutputFormat::Json => fit_json(report, ctx),
    }
}

fn fit_markdown(report: &FitReport, ctx: &ReportContext) -> String {
    let mut out = String::new();
    ctx.markdown_preamble(&mut out);
    if let Some((fit, metrics)) = &report.regression {
        let terms: Vec<&str> = fit.coefficients[1..]
            .iter()
            .map(|c| c.name.as_str())
            .collect();
        let _ = writeln!(
            out,
            "Regression: ln(Effort) ~ {} (n = {})\n",
            if terms.is_empty() {
                "1".to_string()
            } else {
                terms.join(" + ")
            },
            fit.n
        );
        md_header(
            &mut out,
            &["Predictor", "Coefficient", "Std. Error", "t", "p", "VIF"],
        );
        for c in &fit.coefficients {
            md_row(
                &mut out,
                &[
                    c.name.clone(),
                    significant(c.estimate, 3),
                    significant(c.std_error, 3),
                    fixed(c.t_statistic, 2),
                    p_value_text(c.p_value),
                    c.vif.map_or_else(String::new, |v| fixed(v, 3)),
                ],
            );
        }
        let _ = writeln!(
            out,
            "\nR² (log scale) = {}, adjusted = {}, residual SE = {}",
            fixed(fit.r_squared, 3),
            fixed(fit.adj_r_squared, 3),
            fixed(fit.residual_std_error, 3)
        );
        if let (Some(f), Some(p)) = (fit.f_statistic, fit.model_p_value) {
            let _ = writeln!(
                out,
                "F({}, {}) = {}, p = {}",
                fit.coefficients.len() - 1,
                fit.residual_df,
                fixed(f, 2),
                p_value_text(p)
            );
        }
        let _ = writeln!(out);
        md_header(
            &mut out,
            &["Model", "MMRE", "PRED(.25)", "RMSE", "MEAN", "R²"],
        );
        let mut row = vec!["Regression".to_string()];
        row.extend(metric_cells(metrics));
        md_row(&mut out, &row);
    }
    if let Some(ann) = &report.ann {
        if report.regression.is_some() {
            out.push('\n');
        }
        let _ = writeln!(
            out,
            "ANN ({} hidden nodes), {}:\n",
            ann.hidden_nodes, report.scenario
        );
        md_header(
            &mut out,
            &[
                "Seed",
                "Stop",
                "Iterations",
                "MMRE",
                "PRED(.25)",
                "RMSE",
                "MEAN",
                "R²",
            ],
        );
        for r in &ann.runs {
            let mut row = vec![
                r.seed.to_string(),
                r.stop_reason.as_str().to_string(),
                r.iterations.to_string(),
            ];
            row.extend(metric_cells(&r.metrics));
            md_row(&mut out, &row);
        }
        let mut row = vec!["median".to_string(), String::new(), String::new()];
        row.extend(metric_cells(&ann.metrics));
        md_row(&mut out, &row);
    }
    if let Some(trace) = &report.stepwise {
        let _ = writeln!(out, "\nStepwise selection (alpha = {}):\n", trace.alpha);
        md_header(&mut out, &["Step", "Action", "Columns", "p"]);
        for (i, s) in trace.steps.iter().enumerate() {
            let action = match s.action {
                StepAction::Add => "add",
                StepAction::Remove => "remove",
            };
            md_row(
                &mut out,
                &[
                    (i + 1).to_string(),
                    action.to_string(),
                    effortlab_core::regression::unit_label(&s.predictors),
                    p_value_text(s.p_value),
                ],
            );
        }
        let names = |ps: &[effortlab_core::regression::Predictor]| {
            ps.iter().map(|p| p.name()).collect::<Vec<_>>().join(", ")
        };
        let stop = match trace.stop {
            StepwiseStop::Converged => "converged",
            StepwiseStop::Cycle => "cycle",
            StepwiseStop::IterationLimit => "iteration limit",
        };
        let _ = writeln!(out, "\nSelected: {}", names(&trace.selected));
        let _ = writeln!(out, "Excluded: {}", names(&trace.excluded));
        let _ = writeln!(out, "Stopped: {stop}");
    }
    out
}

fn fit_csv(report: &FitReport) -> String {
    let mut rows = vec![[
        "model",
        "term",
        "estimate",
        "std_error",
        "t",
        "p_value",
        "vif",
    ]
    .map(String::from)
    .to_vec()];
    if let Some((fit, _)) = &report.regression {
        for c in &fit.coefficients {
            rows.push(vec![
                "regression".into(),
                c.name.clone(),
                c.estimate.to_string(),
                c.std_error.to_string(),
                c.t_statistic.to_string(),
                c.p_value.to_string(),
                opt_num(c.vif),
            ]);
        }
    }
    let mut out = csv_text(&rows);
    let mut metric_rows = vec![[
        "model",
        "seed",
        "n",
        "mmre",
        "pred_25",
        "rmse",
        "mean_error",
        "r_squared",
    ]
    .map(String::from)
    .to_vec()];
    let metric_row = |model: &str, seed: String, m: &MetricsReport| {
        vec![
            model.to_string(),
            seed,
            m.n.to_string(),
            m.mmre.to_string(),
            m.pred_25.to_string(),
            m.rmse.to_string(),
            m.mean_error.to_string(),
            opt_num(m.r_squared),
        ]
    };
    if let Some((_, m)) = &report.regression {
        metric_rows.push(metric_row("regression", String::new(), m));
    }
    if let Some(ann) = &report.ann {
        for r in &ann.runs {
            metric_rows.push(metric_row("ann", r.seed.to_string(), &r.metrics));
        }
        metric_rows.push(metric_row("ann", "median".into(), &ann.metrics));
    }
    out.push('\n');
    out.push_str(&csv_text(&metric_rows));
    out
}

fn fit_json(report: &FitReport, ctx: &ReportContext) -> String {
    let regression = report.regression.as_ref().map(|(fit, m)| {
        json!({
            "coefficients": fit.coefficients.iter().map(|c| json!({
                "name": c.name,
                "estimate": c.estimate,
                "std_error": c.std_error,
                "t": c.t_statistic,
                "p_value": c.p_value,
                "vif": c.vif,
            })).collect::<Vec<_>>(),
            "n": fit.n,
            "residual_df": fit.residual_df,
            "rss": fit.rss,
            "log_r_squared": fit.r_squared,
            "adj_r_squared": fit.adj_r_squared,
            "residual_std_error": fit.residual_std_error,
            "f_statistic": fit.f_statistic,
            "model_p_value": fit.model_p_value,
            "metrics": metrics_json(m),
        })
    });
    let ann = report.ann.as_ref().map(|a| {
        json!({
            "hidden_nodes": a.hidden_nodes,
            "runs": a.runs.iter().map(|r| json!({
                "seed": r.seed,
                "stop_reason": r.stop_reason.as_str(),
                "iterations": r.iterations,
                "metrics": metrics_json(&r.metrics),
            })).collect::<Vec<_>>(),
            "metrics": metrics_json(&a.metrics),
        })
    });
    let stepwise = report.stepwise.as_ref().map(|t| {
        json!({
            "alpha": t.alpha,
            "steps": t.steps.iter().map(|s| json!({
                "action": match s.action { StepAction::Add => "add", StepAction::Remove => "remove" },
                "columns": s.predictors.iter().map(|p| p.name()).collect::<Vec<_>>(),
                "p_value": s.p_value,
            })).collect::<Vec<_>>(),
            "selected": t.selected.iter().map(|p| p.name()).collect::<Vec<_>>(),
            "excluded": t.excluded.iter().map(|p| p.name()).collect::<Vec<_>>(),
        })
    });
    envelope(
        "fit",
        ctx,
        json!({
            "scenario": report.scenario,
            "regression": regression,
            "ann": ann,
            "stepwise": stepwise,
        }),
    )
}

// ---------------------------------------------------------------- metrics

/// One row per labelled metrics report.
pub fn render_metrics(
    rows: &[(String, MetricsReport)],
    ctx: &ReportContext,
    format: OutputFormat,
) -> String {
    match format {
        OutputFormat::Markdown => {
            let mut out = String::new();
            ctx.markdown_preamble(&mut out);
            md_header(
                &mut out,
                &["Source", "n", "MMRE", "PRED(.25)", "RMSE", "MEAN", "R²"],
            );
            for (source, m) in rows {
                let mut row = vec![source.clone(), m.n.to_string()];
                row.extend(metric_cells(m));
                md_row(&mut out, &row);
            }
            out
        }
        OutputFormat::Csv => {
            let mut table = vec![[
                "source",
                "n",
                "mmre",
                "pred_25",
                "rmse",
                "mean_error",
                "r_squared",
            ]
            .map(String::from)
            .to_vec()];
            for (source, m) in rows {
                table.push(vec![
                    source.clone(),
                    m.n.to_string(),
                    m.mmre.to_string(),
                    m.pred_25.to_string(),
                    m.rmse.to_string(),
                    m.mean_error.to_string(),
                    opt_num(m.r_squared),
                ]);
            }
            csv_text(&table)
        }
        OutputFormat::Json => envelope(
            "metrics",
            ctx,
            json!({
                "rows": rows.iter().map(|(source, m)| json!({
                    "source": source,
                    "metrics": metrics_json(m),
                })).collect::<Vec<_>>(),
            }),
        ),
    }
}

// ---------------------------------------------------------------- validation

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub parsed: usize,
    pub complete: usize,
    pub incomplete_ids: Vec<u32>,
    pub violations: Vec<Violation>,
}

pub fn render_validation(
    report: &ValidationReport,
    ctx: &ReportContext,
    format: OutputFormat,
) -> String {
    match format {
        OutputFormat::Markdown => {
            let mut out = String::new();
            ctx.markdown_preamble(&mut out);
            let _ = writeln!(out, "Parsed records: {}", report.parsed);
            let _ = writeln!(out, "Complete records: {}", report.complete);
            let ids = if report.incomplete_ids.is_empty() {
                "none".to_string()
            } else {
                format_ids(report.incomplete_ids.iter().copied())
            };
            let _ = writeln!(out, "Incomplete projects: {ids}");
            let _ = writeln!(out, "Violations: {}", report.violations.len());
            for v in &report.violations {
                let _ = writeln!(out, "- {v}");
            }
            out
        }
        OutputFormat::Csv => {
            let mut rows = vec![["project", "attribute", "rule", "expected", "actual"]
                .map(String::from)
                .to_vec()];
            for v in &report.violations {
                rows.push(vec![
                    v.project_id.to_string(),
                    v.attribute.name().to_string(),
                    format!("{:?}", v.rule),
                    v.expected.to_string(),
                    v.actual.to_string(),
                ]);
            }
            csv_text(&rows)
        }
        OutputFormat::Json => envelope(
            "validation",
            ctx,
            json!({
                "parsed": report.parsed,
                "complete": report.complete,
                "incomplete_ids": report.incomplete_ids,
                "violations": report.violations.iter().map(|v| json!({
                    "project": v.project_id,
                    "attribute": v.attribute.name(),
                    "rule": format!("{:?}", v.rule),
                    "expected": v.expected,
                    "actual": v.actual,
                })).collect::<Vec<_>>(),
            }),
        ),
    }
}

// ---------------------------------------------------------------- summary

pub fn render_summary(
    summary: &DatasetSummary,
    normality: &[(String, NormalityReport)],
    ctx: &ReportContext,
    format: OutputFormat,
) -> String {
    match format {
        OutputFormat::Markdown => {
            let mut out = String::new();
            ctx.markdown_preamble(&mut out);
            md_header(&mut out, &["Attribute", "n", "Mean", "Min", "Max", "SD"]);
            for a in &summary.attributes {
                md_row(
                    &mut out,
                    &[
                        a.attribute.name().to_string(),
                        a.count.to_string(),
                        fixed(a.mean, 2),
                        fixed(a.min, 2),
                        fixed(a.max, 2),
                        fixed(a.sd, 2),
                    ],
                );
            }
            if !normality.is_empty() {
                let _ = writeln!(out, "\nNormality (Anderson-Darling, alpha = 0.05):\n");
                md_header(&mut out, &["Variable", "n", "A² (adj.)", "p", "Normal"]);
                for (name, r) in normality {
                    md_row(
                        &mut out,
                        &[
                            name.clone(),
                            r.n.to_string(),
                            fixed(r.statistic, 3),
                            p_value_text(r.p_value),
                            if r.is_normal_at_95 { "yes" } else { "no" }.to_string(),
                        ],
                    );
                }
            }
            out
        }
        OutputFormat::Csv => {
            let mut rows = vec![["attribute", "n", "mean", "min", "max", "sd"]
                .map(String::from)
                .to_vec()];
            for a in &summary.attributes {
                rows.push(vec![
                    a.attribute.name().to_string(),
                    a.count.to_string(),
                    a.mean.to_string(),
                    a.min.to_string(),
                    a.max.to_string(),
                    a.sd.to_string(),
                ]);
            }
            csv_text(&rows)
        }
        OutputFormat::Json => envelope(
            "summary",
            ctx,
            json!({
                "count": summary.count,
                "attributes": summary.attributes.iter().map(|a| json!({
                    "attribute": a.attribute.name(),
                    "n": a.count,
                    "mean": a.mean,
                    "min": a.min,
                    "max": a.max,
                    "sd": a.sd,
                })).collect::<Vec<_>>(),
                "normality": normality.iter().map(|(name, r)| json!({
                    "variable": name,
                    "test": r.test,
                    "n": r.n,
                    "statistic": r.statistic,
                    "p_value": r.p_value,
                    "normal_at_95": r.is_normal_at_95,
                })).collect::<Vec<_>>(),
            }),
        ),
    }
}

/// Attributes whose raw and log values are tested for normality by `summarize`.
pub const NORMALITY_ATTRIBUTES: [Attribute; 4] = [
    Attribute::Effort,
    Attribute::PointsNonAdjust,
    Attribute::Transactions,
    Attribute::Entities,
];
