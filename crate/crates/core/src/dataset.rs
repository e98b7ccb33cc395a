//! Desharnais project records: completeness filtering, derived-attribute
//! checks and descriptive summaries.
//!
//! Text parsing lives in the `effortlab` crate; everything here works on
//! already-tokenized values.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::math::sqrt;
use crate::{Error, Result};

/// Relative tolerance for `PointsAdjust = PointsNonAdjust × (0.65 + 0.01 × Envergure)`.
/// The published values are rounded to whole points.
pub const ADJUSTMENT_TOLERANCE: f64 = 0.02;

/// The twelve attributes of a project row, in canonical column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Attribute {
    Project,
    TeamExp,
    ManagerExp,
    YearEnd,
    Length,
    Effort,
    Transactions,
    Entities,
    PointsNonAdjust,
    Envergure,
    PointsAdjust,
    Language,
}

impl Attribute {
    pub const ALL: [Attribute; 12] = [
        Attribute::Project,
        Attribute::TeamExp,
        Attribute::ManagerExp,
        Attribute::YearEnd,
        Attribute::Length,
        Attribute::Effort,
        Attribute::Transactions,
        Attribute::Entities,
        Attribute::PointsNonAdjust,
        Attribute::Envergure,
        Attribute::PointsAdjust,
        Attribute::Language,
    ];

    pub const fn name(self) -> &'static str {
        match self {
            Attribute::Project => "Project",
            Attribute::TeamExp => "TeamExp",
            Attribute::ManagerExp => "ManagerExp",
            Attribute::YearEnd => "YearEnd",
            Attribute::Length => "Length",
            Attribute::Effort => "Effort",
            Attribute::Transactions => "Transactions",
            Attribute::Entities => "Entities",
            Attribute::PointsNonAdjust => "PointsNonAdjust",
            Attribute::Envergure => "Envergure",
            Attribute::PointsAdjust => "PointsAdjust",
            Attribute::Language => "Language",
        }
    }

    /// Case-insensitive lookup. Also accepts the spellings used by the
    /// PROMISE ARFF copy (`Adjustment`, `PointsAjust`).
    pub fn from_name(name: &str) -> Option<Attribute> {
        let name = name.trim().trim_matches(|c| c == '"' || c == '\'');
        let lower = |s: &str| s.eq_ignore_ascii_case(name);
        if lower("Adjustment") {
            return Some(Attribute::Envergure);
        }
        if lower("PointsAjust") {
            return Some(Attribute::PointsAdjust);
        }
        Attribute::ALL.iter().copied().find(|a| lower(a.name()))
    }

    /// Attributes stored as integers in the source data.
    pub const fn is_integer(self) -> bool {
        !matches!(
            self,
            Attribute::Effort | Attribute::PointsNonAdjust | Attribute::PointsAdjust
        )
    }
}

impl fmt::Display for Attribute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Development language category.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Language {
    BasicCobol = 1,
    AdvancedCobol = 2,
    FourthGeneration = 3,
}

impl Language {
    pub fn from_code(code: i64) -> Result<Language> {
        match code {
            1 => Ok(Language::BasicCobol),
            2 => Ok(Language::AdvancedCobol),
            3 => Ok(Language::FourthGeneration),
            other => Err(Error::domain(alloc::format!(
                "language code must be 1, 2 or 3, got {other}"
            ))),
        }
    }

    pub const fn code(self) -> u8 {
        self as u8
    }
}

/// A parsed row in which every attribute except the project id may be absent.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RawRecord {
    pub project_id: u32,
    pub team_exp: Option<i64>,
    pub manager_exp: Option<i64>,
    pub year_end: Option<i64>,
    pub length: Option<i64>,
    pub effort: Option<f64>,
    pub transactions: Option<i64>,
    pub entities: Option<i64>,
    pub points_non_adjust: Option<f64>,
    pub envergure: Option<i64>,
    pub points_adjust: Option<f64>,
    pub language: Option<Language>,
}

impl RawRecord {
    pub fn is_complete(&self) -> bool {
        self.to_complete().is_some()
    }

    pub fn to_complete(&self) -> Option<ProjectRecord> {
        Some(ProjectRecord {
            project_id: self.project_id,
            team_exp: self.team_exp?,
            manager_exp: self.manager_exp?,
            year_end: self.year_end?,
            length: self.length?,
            effort: self.effort?,
            transactions: self.transactions?,
            entities: self.entities?,
            points_non_adjust: self.points_non_adjust?,
            envergure: self.envergure?,
            points_adjust: self.points_adjust?,
            language: self.language?,
        })
    }
}

impl From<&ProjectRecord> for RawRecord {
    fn from(r: &ProjectRecord) -> Self {
        RawRecord {
            project_id: r.project_id,
            team_exp: Some(r.team_exp),
            manager_exp: Some(r.manager_exp),
            year_end: Some(r.year_end),
            length: Some(r.length),
            effort: Some(r.effort),
            transactions: Some(r.transactions),
            entities: Some(r.entities),
            points_non_adjust: Some(r.points_non_adjust),
            envergure: Some(r.envergure),
            points_adjust: Some(r.points_adjust),
            language: Some(r.language),
        }
    }
}

/// A complete project row. Domain constraints (positive effort and size,
/// non-negative experience) are checked by [`validate_domain`] rather than
/// by construction so that bad rows can be reported instead of dropped.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ProjectRecord {
    pub project_id: u32,
    /// Years.
    pub team_exp: i64,
    /// Years.
    pub manager_exp: i64,
    pub year_end: i64,
    /// Months.
    pub length: i64,
    /// Person-hours.
    pub effort: f64,
    pub transactions: i64,
    pub entities: i64,
    /// Unadjusted function points.
    pub points_non_adjust: f64,
    pub envergure: i64,
    /// Adjusted function points.
    pub points_adjust: f64,
    pub language: Language,
}

impl ProjectRecord {
    /// Numeric value of an attribute (`Language` yields its code).
    pub fn value(&self, attribute: Attribute) -> f64 {
        match attribute {
            Attribute::Project => self.project_id as f64,
            Attribute::TeamExp => self.team_exp as f64,
            Attribute::ManagerExp => self.manager_exp as f64,
            Attribute::YearEnd => self.year_end as f64,
            Attribute::Length => self.length as f64,
            Attribute::Effort => self.effort,
            Attribute::Transactions => self.transactions as f64,
            Attribute::Entities => self.entities as f64,
            Attribute::PointsNonAdjust => self.points_non_adjust,
            Attribute::Envergure => self.envergure as f64,
            Attribute::PointsAdjust => self.points_adjust,
            Attribute::Language => self.language.code() as f64,
        }
    }

    /// `PointsNonAdjust × (0.65 + 0.01 × Envergure)`.
    pub fn expected_points_adjust(&self) -> f64 {
        self.points_non_adjust * (0.65 + 0.01 * self.envergure as f64)
    }
}

/// Keeps the records with all twelve attributes present, in input order.
pub fn filter_complete(records: &[RawRecord]) -> Vec<ProjectRecord> {
    records.iter().filter_map(RawRecord::to_complete).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Rule {
    /// `PointsNonAdjust = Transactions + Entities`.
    SizeSum,
    /// `PointsAdjust ≈ PointsNonAdjust × (0.65 + 0.01 × Envergure)`.
    Adjustment,
    /// Value must be strictly positive.
    Positive,
    /// Value must be zero or more.
    NonNegative,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Violation {
    pub project_id: u32,
    pub attribute: Attribute,
    pub rule: Rule,
    /// Expected value, or the bound for `Positive` / `NonNegative`.
    pub expected: f64,
    pub actual: f64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.rule {
            Rule::SizeSum | Rule::Adjustment => write!(
                f,
                "project {}: {} expected {} but found {}",
                self.project_id, self.attribute, self.expected, self.actual
            ),
            Rule::Positive => write!(
                f,
                "project {}: {} must be > 0, found {}",
                self.project_id, self.attribute, self.actual
            ),
            Rule::NonNegative => write!(
                f,
                "project {}: {} must be >= 0, found {}",
                self.project_id, self.attribute, self.actual
            ),
        }
    }
}

/// Checks the two derivation formulas that tie the size columns together.
pub fn validate_derived(record: &ProjectRecord) -> Vec<Violation> {
    let mut out = Vec::new();
    let sum = (record.transactions + record.entities) as f64;
    if (record.points_non_adjust - sum).abs() > 1e-9 {
        out.push(Violation {
            project_id: record.project_id,
            attribute: Attribute::PointsNonAdjust,
            rule: Rule::SizeSum,
            expected: sum,
            actual: record.points_non_adjust,
        });
    }
    let expected = record.expected_points_adjust();
    let scale = expected.abs().max(f64::MIN_POSITIVE);
    if (record.points_adjust - expected).abs() / scale > ADJUSTMENT_TOLERANCE {
        out.push(Violation {
            project_id: record.project_id,
            attribute: Attribute::PointsAdjust,
            rule: Rule::Adjustment,
            expected,
            actual: record.points_adjust,
        });
    }
    out
}

/// Checks value ranges: sizes, effort and duration positive; experience and
/// Envergure non-negative.
pub fn validate_domain(record: &ProjectRecord) -> Vec<Violation> {
    let mut out = Vec::new();
    let positive = [
        Attribute::Effort,
        Attribute::PointsNonAdjust,
        Attribute::PointsAdjust,
        Attribute::Transactions,
        Attribute::Entities,
        Attribute::Length,
    ];
    for attribute in positive {
        let actual = record.value(attribute);
        if !(actual > 0.0) {
            out.push(Violation {
                project_id: record.project_id,
                attribute,
                rule: Rule::Positive,
                expected: 0.0,
                actual,
            });
        }
    }
    for attribute in [
        Attribute::TeamExp,
        Attribute::ManagerExp,
        Attribute::Envergure,
    ] {
        let actual = record.value(attribute);
        if actual < 0.0 {
            out.push(Violation {
                project_id: record.project_id,
                attribute,
                rule: Rule::NonNegative,
                expected: 0.0,
                actual,
            });
        }
    }
    out
}

/// Domain and derivation checks for a record, domain checks first.
pub fn validate(record: &ProjectRecord) -> Vec<Violation> {
    let mut out = validate_domain(record);
    out.extend(validate_derived(record));
    out
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AttributeSummary {
    pub attribute: Attribute,
    pub count: usize,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    /// Sample standard deviation (n − 1 denominator; 0 for a single record).
    pub sd: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DatasetSummary {
    pub count: usize,
    pub attributes: Vec<AttributeSummary>,
}

impl DatasetSummary {
    pub fn get(&self, attribute: Attribute) -> Option<&AttributeSummary> {
        self.attributes.iter().find(|s| s.attribute == attribute)
    }
}

/// Numeric attributes covered by [`summarize`].
pub const SUMMARY_ATTRIBUTES: [Attribute; 10] = [
    Attribute::TeamExp,
    Attribute::ManagerExp,
    Attribute::YearEnd,
    Attribute::Length,
    Attribute::Effort,
    Attribute::Transactions,
    Attribute::Entities,
    Attribute::PointsNonAdjust,
    Attribute::Envergure,
    Attribute::PointsAdjust,
];

pub fn summarize(records: &[ProjectRecord]) -> Result<DatasetSummary> {
    if records.is_empty() {
        return Err(Error::domain("cannot summarize an empty record set"));
    }
    let n = records.len();
    let attributes = SUMMARY_ATTRIBUTES
        .iter()
        .map(|&attribute| {
            let values = records.iter().map(|r| r.value(attribute));
            let (mut min, mut max, mut sum) = (f64::INFINITY, f64::NEG_INFINITY, 0.0);
            for v in values.clone() {
                min = min.min(v);
                max = max.max(v);
                sum += v;
            }
            let mean = sum / n as f64;
            let sd = if n > 1 {
                let ss: f64 = values.map(|v| (v - mean) * (v - mean)).sum();
                sqrt(ss / (n - 1) as f64)
            } else {
                0.0
            };
            AttributeSummary {
                attribute,
                count: n,
                mean,
                min,
                max,
                sd,
            }
        })
        .collect();
    Ok(DatasetSummary {
        count: n,
        attributes,
    })
}

/// Renders a project id list such as `38, 44, 65, 75`.
pub fn format_ids(ids: impl IntoIterator<Item = u32>) -> String {
    use core::fmt::Write;
    let mut s = String::new();
    for (i, id) in ids.into_iter().enumerate() {
        if i > 0 {
            s.push_str(", ");
        }
        let _ = write!(s, "{id}");
    }
    s
}
