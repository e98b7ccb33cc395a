use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::dataset::{Language, ProjectRecord};
use crate::math::ln;
use crate::numerics::Matrix;
use crate::{Error, Result};

/// The four quality (non-functional) attributes, in elimination order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum NfrAttribute {
    Envergure,
    Language,
    TeamExp,
    ManagerExp,
}

impl NfrAttribute {
    pub const ALL: [NfrAttribute; 4] = [
        NfrAttribute::Envergure,
        NfrAttribute::Language,
        NfrAttribute::TeamExp,
        NfrAttribute::ManagerExp,
    ];

    pub const fn name(self) -> &'static str {
        match self {
            NfrAttribute::Envergure => "Envergure",
            NfrAttribute::Language => "Language",
            NfrAttribute::TeamExp => "TeamExp",
            NfrAttribute::ManagerExp => "ManagerExp",
        }
    }

    /// Design-matrix columns contributed by the attribute.
    pub fn predictors(self) -> &'static [Predictor] {
        match self {
            NfrAttribute::Envergure => &[Predictor::Envergure],
            NfrAttribute::Language => &[Predictor::L1, Predictor::L2],
            NfrAttribute::TeamExp => &[Predictor::TeamExp],
            NfrAttribute::ManagerExp => &[Predictor::ManagerExp],
        }
    }

    /// Position of the attribute's first column in a full frame.
    pub fn column_position(self) -> usize {
        let first = self.predictors()[0];
        Predictor::MODEL_ORDER
            .iter()
            .position(|&p| p == first)
            .unwrap_or(usize::MAX)
    }
}

impl fmt::Display for NfrAttribute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A non-intercept design column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Predictor {
    /// ln(PointsNonAdjust).
    LnSize,
    LnTransactions,
    LnEntities,
    /// 1 for Basic Cobol.
    L1,
    /// 1 for Advanced Cobol.
    L2,
    TeamExp,
    ManagerExp,
    Envergure,
}

impl Predictor {
    /// Column order of effort-model frames.
    pub const MODEL_ORDER: [Predictor; 6] = [
        Predictor::LnSize,
        Predictor::L1,
        Predictor::L2,
        Predictor::TeamExp,
        Predictor::ManagerExp,
        Predictor::Envergure,
    ];

    /// Candidate pool for stepwise selection, in tie-break order.
    pub const STEPWISE_CANDIDATES: [Predictor; 8] = [
        Predictor::LnSize,
        Predictor::LnTransactions,
        Predictor::LnEntities,
        Predictor::L1,
        Predictor::L2,
        Predictor::TeamExp,
        Predictor::ManagerExp,
        Predictor::Envergure,
    ];

    pub const fn name(self) -> &'static str {
        match self {
            Predictor::LnSize => "ln(Size)",
            Predictor::LnTransactions => "ln(Transactions)",
            Predictor::LnEntities => "ln(Entities)",
            Predictor::L1 => "L1",
            Predictor::L2 => "L2",
            Predictor::TeamExp => "TExp",
            Predictor::ManagerExp => "MExp",
            Predictor::Envergure => "Env",
        }
    }

    pub fn value(self, record: &ProjectRecord) -> Result<f64> {
        let log = |v: f64, attribute: &'static str| {
            if v > 0.0 && v.is_finite() {
                Ok(ln(v))
            } else {
                Err(Error::Transform {
                    project_id: record.project_id,
                    attribute,
                })
            }
        };
        Ok(match self {
            Predictor::LnSize => log(record.points_non_adjust, "PointsNonAdjust")?,
            Predictor::LnTransactions => log(record.transactions as f64, "Transactions")?,
            Predictor::LnEntities => log(record.entities as f64, "Entities")?,
            Predictor::L1 => encode_language(record.language).0,
            Predictor::L2 => encode_language(record.language).1,
            Predictor::TeamExp => record.team_exp as f64,
            Predictor::ManagerExp => record.manager_exp as f64,
            Predictor::Envergure => record.envergure as f64,
        })
    }
}

impl fmt::Display for Predictor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Dummy coding with 4GL as the reference level.
pub fn encode_language(language: Language) -> (f64, f64) {
    match language {
        Language::BasicCobol => (1.0, 0.0),
        Language::AdvancedCobol => (0.0, 1.0),
        Language::FourthGeneration => (0.0, 0.0),
    }
}

/// Dummy coding of a raw language code.
pub fn encode_language_code(code: i64) -> Result<(f64, f64)> {
    Language::from_code(code).map(encode_language)
}

/// Size plus a subset of the quality attributes. Size is always included.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FeatureSet {
    members: [bool; 4],
}

impl FeatureSet {
    pub const fn full() -> Self {
        FeatureSet { members: [true; 4] }
    }

    pub const fn size_only() -> Self {
        FeatureSet {
            members: [false; 4],
        }
    }

    pub fn from_members(members: &[NfrAttribute]) -> Self {
        let mut set = Self::size_only();
        for &m in members {
            set.members[m as usize] = true;
        }
        set
    }

    pub fn without(mut self, attribute: NfrAttribute) -> Self {
        self.members[attribute as usize] = false;
        self
    }

    pub fn with(mut self, attribute: NfrAttribute) -> Self {
        self.members[attribute as usize] = true;
        self
    }

    pub const fn uses_size(&self) -> bool {
        true
    }

    pub fn contains(&self, attribute: NfrAttribute) -> bool {
        self.members[attribute as usize]
    }

    pub fn nfr_members(&self) -> Vec<NfrAttribute> {
        NfrAttribute::ALL
            .iter()
            .copied()
            .filter(|&a| self.contains(a))
            .collect()
    }

    /// Predictor columns in model order (size first, then L1, L2, TExp, MExp, Env).
    pub fn predictors(&self) -> Vec<Predictor> {
        Predictor::MODEL_ORDER
            .iter()
            .copied()
            .filter(|p| match p {
                Predictor::LnSize => true,
                Predictor::L1 | Predictor::L2 => self.contains(NfrAttribute::Language),
                Predictor::TeamExp => self.contains(NfrAttribute::TeamExp),
                Predictor::ManagerExp => self.contains(NfrAttribute::ManagerExp),
                Predictor::Envergure => self.contains(NfrAttribute::Envergure),
                Predictor::LnTransactions | Predictor::LnEntities => false,
            })
            .collect()
    }
}

pub const INTERCEPT: &str = "(Intercept)";

/// Design matrix (leading intercept column) and ln(effort) response.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ModelFrame {
    pub column_names: Vec<String>,
    pub predictors: Vec<Predictor>,
    pub design: Matrix,
    pub response: Vec<f64>,
    pub row_ids: Vec<u32>,
}

impl ModelFrame {
    pub fn n(&self) -> usize {
        self.design.rows()
    }

    pub fn p(&self) -> usize {
        self.design.cols()
    }

    /// Frame restricted to the given predictors (intercept kept).
    pub fn subset(&self, predictors: &[Predictor]) -> Result<ModelFrame> {
        let mut columns = alloc::vec![0usize];
        for p in predictors {
            let j = self
                .predictors
                .iter()
                .position(|q| q == p)
                .ok_or_else(|| Error::domain(alloc::format!("frame has no column {p}")))?;
            columns.push(j + 1);
        }
        Ok(ModelFrame {
            column_names: columns
                .iter()
                .map(|&j| self.column_names[j].clone())
                .collect(),
            predictors: predictors.to_vec(),
            design: self.design.select_columns(&columns),
            response: self.response.clone(),
            row_ids: self.row_ids.clone(),
        })
    }
}

/// Frame for a feature set, in model column order.
pub fn build_frame(records: &[ProjectRecord], features: &FeatureSet) -> Result<ModelFrame> {
    build_frame_with(records, &features.predictors())
}

/// Frame with an explicit predictor list (any order, no duplicates).
pub fn build_frame_with(records: &[ProjectRecord], predictors: &[Predictor]) -> Result<ModelFrame> {
    if records.is_empty() {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    for (i, p) in predictors.iter().enumerate() {
        if predictors[..i].contains(p) {
            return Err(Error::domain(alloc::format!("predictor {p} listed twice")));
        }
    }
    let p = predictors.len() + 1;
    let mut data = Vec::with_capacity(records.len() * p);
    let mut response = Vec::with_capacity(records.len());
    for r in records {
        if !(r.effort > 0.0 && r.effort.is_finite()) {
            return Err(Error::Transform {
                project_id: r.project_id,
                attribute: "Effort",
            });
        }
        data.push(1.0);
        for pred in predictors {
            data.push(pred.value(r)?);
        }
        response.push(ln(r.effort));
    }
    let mut column_names = alloc::vec![INTERCEPT.to_string()];
    column_names.extend(predictors.iter().map(|p| p.name().to_string()));
    Ok(ModelFrame {
        column_names,
        predictors: predictors.to_vec(),
        design: Matrix::from_row_major(records.len(), p, data),
        response,
        row_ids: records.iter().map(|r| r.project_id).collect(),
    })
}
