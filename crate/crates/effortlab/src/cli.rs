//! The `effortlab` command line.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use effortlab_core::ablation::{
    median_metrics, rank_attributes, run_ablation, AblationConfig, ModelFamily, Scenario,
};
use effortlab_core::ann::{predict_effort_ann, train, AnnConfig};
use effortlab_core::dataset::{
    filter_complete, summarize, validate, validate_domain, ProjectRecord, Rule, Violation,
};
use effortlab_core::metrics::{evaluate, EvaluationPair, MetricsReport};
use effortlab_core::numerics::normality_test;
use effortlab_core::regression::{
    build_frame, build_stepwise_frame, fit_ols, predict_effort, stepwise_select, FeatureSet,
};

use crate::error::DataError;
use crate::io::{load_dataset, LoadedDataset};
use crate::report::{
    render_ablation, render_fit, render_metrics, render_summary, render_validation, AnnFitSummary,
    AnnRunSummary, DatasetInfo, FitReport, OutputFormat, ReportContext, ValidationReport,
    NORMALITY_ATTRIBUTES,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DATA: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub const DEFAULT_DATASET: &str = "data/desharnais.csv";

#[derive(Debug, Parser)]
#[command(
    name = "effortlab",
    version,
    about = "Effort models and quality-attribute ablation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[arg(long, global = true, env = "EFFORTLAB_DATASET", default_value = DEFAULT_DATASET)]
    pub dataset: PathBuf,

    /// Defaults to `both` for ablate and `regression` elsewhere.
    #[arg(long, global = true, value_enum)]
    pub model: Option<ModelArg>,

    #[arg(long, global = true, value_enum, default_value_t = FeaturesArg::Full)]
    pub features: FeaturesArg,

    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Markdown)]
    pub format: OutputFormat,

    /// First network seed.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Network runs per fit; metrics are the median over runs.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub seeds: u64,

    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub hidden: Option<u64>,

    #[arg(long = "max-iter", global = true)]
    pub max_iter: Option<usize>,

    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse the dataset and check derived-attribute consistency.
    Validate,
    /// Descriptive statistics and normality checks.
    Summarize,
    /// Fit one feature set.
    Fit {
        /// Also run bidirectional stepwise selection over all candidates.
        #[arg(long)]
        stepwise: bool,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
    },
    /// Six-scenario attribute ablation.
    Ablate,
    /// Accuracy criteria for an in-sample fit, or for a file of pairs.
    Metrics {
        /// CSV with `actual` and `predicted` columns (optional `project`).
        #[arg(long)]
        pairs: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Regression,
    Ann,
    Both,
}

impl From<ModelArg> for ModelFamily {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Regression => ModelFamily::Regression,
            ModelArg::Ann => ModelFamily::Ann,
            ModelArg::Both => ModelFamily::Both,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FeaturesArg {
    Full,
    NoEnv,
    NoLanguage,
    NoTexp,
    NoMexp,
    SizeOnly,
}

impl FeaturesArg {
    pub fn scenario(self) -> Scenario {
        let key = self
            .to_possible_value()
            .expect("no skipped variants")
            .get_name()
            .to_string();
        Scenario::from_key(&key).expect("every flag value names a scenario")
    }
}

struct Outcome {
    report: String,
    status: i32,
}

impl Cli {
    fn family(&self, default: ModelArg) -> ModelFamily {
        self.model.unwrap_or(default).into()
    }

    fn ablation_config(&self) -> AblationConfig {
        let defaults = AnnConfig::default();
        AblationConfig {
            ann: AnnConfig {
                hidden_nodes: self.hidden.map(|h| h as usize),
                max_iterations: self.max_iter.unwrap_or(defaults.max_iterations),
                seed: self.seed,
                ..defaults
            },
            seeds: self.seeds as usize,
        }
    }
}

/// Parses `args` (program name first) and runs the command, writing the
/// report to `out` (or `--out`) and diagnostics to `err`.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
                return EXIT_USAGE;
            }
            let _ = write!(out, "{text}");
            return EXIT_OK;
        }
    };
    match execute(&cli, err) {
        Ok(outcome) => {
            let written = match &cli.out {
                Some(path) => fs::write(path, &outcome.report).map_err(|source| DataError::Io {
                    path: path.clone(),
                    source,
                }),
                None => out
                    .write_all(outcome.report.as_bytes())
                    .map_err(|source| DataError::Io {
                        path: PathBuf::from("<stdout>"),
                        source,
                    }),
            };
            match written {
                Ok(()) => outcome.status,
                Err(e) => {
                    let _ = writeln!(err, "error: {e}");
                    EXIT_DATA
                }
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_DATA
        }
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let code = run_with(args, &mut stdout.lock(), &mut stderr.lock());
    let _ = stdout.lock().flush();
    code
}

struct Loaded {
    dataset: LoadedDataset,
    complete: Vec<ProjectRecord>,
    ctx: ReportContext,
}

fn load(path: &Path) -> Result<Loaded, DataError> {
    let dataset = load_dataset(path)?;
    let complete = filter_complete(&dataset.records);
    let ctx = ReportContext {
        dataset: Some(DatasetInfo {
            path: path.display().to_string(),
            sha256: dataset.sha256.clone(),
            records_parsed: dataset.records.len(),
            records_complete: complete.len(),
        }),
    };
    Ok(Loaded {
        dataset,
        complete,
        ctx,
    })
}

fn describe(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| format!("  {v}"))
        .collect::<Vec<_>>()
        .join("\n")
}

/// Rejects impossible values and warns about derived-attribute drift.
fn checked(loaded: &Loaded, err: &mut dyn Write) -> Result<(), DataError> {
    let domain: Vec<Violation> = loaded.complete.iter().flat_map(validate_domain).collect();
    if !domain.is_empty() {
        return Err(DataError::Invalid {
            count: domain.len(),
            details: describe(&domain),
        });
    }
    let derived: Vec<Violation> = loaded
        .complete
        .iter()
        .flat_map(validate)
        .filter(|v| matches!(v.rule, Rule::SizeSum | Rule::Adjustment))
        .collect();
    if !derived.is_empty() {
        let _ = writeln!(
            err,
            "warning: {} derived-attribute inconsistencies\n{}",
            derived.len(),
            describe(&derived)
        );
    }
    Ok(())
}

fn in_sample<F>(records: &[ProjectRecord], predict: F) -> Result<MetricsReport, DataError>
where
    F: Fn(&ProjectRecord) -> effortlab_core::Result<f64>,
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
        .collect::<effortlab_core::Result<Vec<_>>>()?;
    Ok(evaluate(&pairs)?)
}

fn fit_ann(
    records: &[ProjectRecord],
    features: &FeatureSet,
    config: &AblationConfig,
) -> Result<AnnFitSummary, DataError> {
    let mut runs = Vec::new();
    let mut hidden_nodes = 0;
    for seed in config.seed_list() {
        let (model, trace) = train(records, features, &config.ann.clone().with_seed(seed))?;
        hidden_nodes = model.n_hidden();
        runs.push(AnnRunSummary {
            seed,
            stop_reason: trace.stop_reason,
            iterations: trace.entries.len() - 1,
            metrics: in_sample(records, |r| predict_effort_ann(&model, r))?,
        });
    }
    let metrics = median_metrics(&runs.iter().map(|r| r.metrics).collect::<Vec<_>>())?;
    Ok(AnnFitSummary {
        runs,
        metrics,
        hidden_nodes,
    })
}

fn execute(cli: &Cli, err: &mut dyn Write) -> Result<Outcome, DataError> {
    let ok = |report| {
        Ok(Outcome {
            report,
            status: EXIT_OK,
        })
    };
    match &cli.command {
        Command::Validate => {
            let loaded = load(&cli.dataset)?;
            let incomplete_ids = loaded
                .dataset
                .records
                .iter()
                .filter(|r| !r.is_complete())
                .map(|r| r.project_id)
                .collect();
            let violations: Vec<Violation> = loaded.complete.iter().flat_map(validate).collect();
            let status = if violations.is_empty() {
                EXIT_OK
            } else {
                EXIT_DATA
            };
            let report = ValidationReport {
                parsed: loaded.dataset.records.len(),
                complete: loaded.complete.len(),
                incomplete_ids,
                violations,
            };
            Ok(Outcome {
                report: render_validation(&report, &loaded.ctx, cli.format),
                status,
            })
        }
        Command::Summarize => {
            let loaded = load(&cli.dataset)?;
            let summary = summarize(&loaded.complete)?;
            let mut normality = Vec::new();
            for attr in NORMALITY_ATTRIBUTES {
                let raw: Vec<f64> = loaded.complete.iter().map(|r| r.value(attr)).collect();
                normality.push((attr.name().to_string(), normality_test(&raw, 0.05)?));
                if raw.iter().all(|&v| v > 0.0) {
                    let logs: Vec<f64> = raw.iter().map(|v| v.ln()).collect();
                    normality.push((format!("ln({})", attr.name()), normality_test(&logs, 0.05)?));
                }
            }
            ok(render_summary(
                &summary,
                &normality,
                &loaded.ctx,
                cli.format,
            ))
        }
        Command::Fit { stepwise, alpha } => {
            let loaded = load(&cli.dataset)?;
            checked(&loaded, err)?;
            let scenario = cli.features.scenario();
            let family = cli.family(ModelArg::Regression);
            let records = &loaded.complete;
            let mut report = FitReport {
                scenario: scenario.label.to_string(),
                regression: None,
                ann: None,
                stepwise: None,
            };
            if family != ModelFamily::Ann {
                let fit = fit_ols(&build_frame(records, &scenario.features)?)?;
                let metrics = in_sample(records, |r| predict_effort(&fit, r))?;
                report.regression = Some((fit, metrics));
            }
            if family != ModelFamily::Regression {
                report.ann = Some(fit_ann(
                    records,
                    &scenario.features,
                    &cli.ablation_config(),
                )?);
            }
            if *stepwise {
                report.stepwise = Some(stepwise_select(&build_stepwise_frame(records)?, *alpha)?);
            }
            ok(render_fit(&report, &loaded.ctx, cli.format))
        }
        Command::Ablate => {
            let loaded = load(&cli.dataset)?;
            checked(&loaded, err)?;
            let family = cli.family(ModelArg::Both);
            let table = run_ablation(&loaded.complete, family, &cli.ablation_config())?;
            let rankings = family
                .kinds()
                .iter()
                .map(|&k| rank_attributes(&table, k))
                .collect::<effortlab_core::Result<Vec<_>>>()?;
            ok(render_ablation(&table, &rankings, &loaded.ctx, cli.format))
        }
        Command::Metrics { pairs: Some(path) } => {
            let bytes = fs::read(path).map_err(|source| DataError::Io {
                path: path.clone(),
                source,
            })?;
            let pairs = parse_pairs(bytes.as_slice())?;
            let metrics = evaluate(&pairs)?;
            ok(render_metrics(
                &[(path.display().to_string(), metrics)],
                &ReportContext::default(),
                cli.format,
            ))
        }
        Command::Metrics { pairs: None } => {
            let loaded = load(&cli.dataset)?;
            checked(&loaded, err)?;
            let scenario = cli.features.scenario();
            let family = cli.family(ModelArg::Regression);
            let records = &loaded.complete;
            let mut rows = Vec::new();
            if family != ModelFamily::Ann {
                let fit = fit_ols(&build_frame(records, &scenario.features)?)?;
                rows.push((
                    format!("regression: {}", scenario.label),
                    in_sample(records, |r| predict_effort(&fit, r))?,
                ));
            }
            if family != ModelFamily::Regression {
                let ann = fit_ann(records, &scenario.features, &cli.ablation_config())?;
                rows.push((format!("ann: {}", scenario.label), ann.metrics));
            }
            ok(render_metrics(&rows, &loaded.ctx, cli.format))
        }
    }
}

/// Reads `actual,predicted[,project]` rows (header required, any column order).
pub fn parse_pairs<R: std::io::Read>(reader: R) -> Result<Vec<EvaluationPair>, DataError> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let find = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
    let (Some(actual), Some(predicted)) = (find("actual"), find("predicted")) else {
        return Err(DataError::Header(
            "pairs file needs `actual` and `predicted` columns".into(),
        ));
    };
    let project = find("project");
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = i + 1;
        let num = |col: usize, what: &str| -> Result<f64, DataError> {
            let tok = rec.get(col).unwrap_or("");
            tok.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| DataError::Row {
                    row,
                    message: format!("{what}: expected a number, found {tok:?}"),
                })
        };
        let mut pair = EvaluationPair::new(num(actual, "actual")?, num(predicted, "predicted")?);
        if let Some(col) = project {
            pair.project_id = rec.get(col).and_then(|t| t.parse().ok());
        }
        out.push(pair);
    }
    Ok(out)
}
