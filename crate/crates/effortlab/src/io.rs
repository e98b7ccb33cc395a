//! Dataset files: CSV (header + rows) and a minimal ARFF dialect.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use effortlab_core::dataset::{Attribute, Language, RawRecord};
use sha2::{Digest, Sha256};

use crate::error::DataError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataFormat {
    Csv,
    Arff,
}

impl DataFormat {
    /// `.arff` selects ARFF; anything else is read as CSV.
    pub fn from_path(path: &Path) -> DataFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("arff") => DataFormat::Arff,
            _ => DataFormat::Csv,
        }
    }
}

/// A dataset file as loaded from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedDataset {
    pub path: PathBuf,
    pub format: DataFormat,
    /// Lowercase hex SHA-256 of the file bytes.
    pub sha256: String,
    pub records: Vec<RawRecord>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn load_dataset(path: impl AsRef<Path>) -> Result<LoadedDataset, DataError> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|source| DataError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let format = DataFormat::from_path(path);
    let records = parse_dataset(bytes.as_slice(), format)?;
    Ok(LoadedDataset {
        path: path.to_path_buf(),
        format,
        sha256: sha256_hex(&bytes),
        records,
    })
}

pub fn parse_dataset<R: Read>(
    mut reader: R,
    format: DataFormat,
) -> Result<Vec<RawRecord>, DataError> {
    match format {
        DataFormat::Csv => parse_csv(reader),
        DataFormat::Arff => {
            let mut text = String::new();
            reader
                .read_to_string(&mut text)
                .map_err(|e| DataError::Header(format!("input is not UTF-8 text: {e}")))?;
            parse_arff(&text)
        }
    }
}

pub fn parse_str(text: &str, format: DataFormat) -> Result<Vec<RawRecord>, DataError> {
    parse_dataset(text.as_bytes(), format)
}

/// Maps each of the twelve attributes to its column. Unknown columns are ignored.
fn column_map<'a>(
    names: impl IntoIterator<Item = &'a str>,
) -> Result<Vec<Option<Attribute>>, DataError> {
    let mut columns = Vec::new();
    let mut seen: HashMap<Attribute, usize> = HashMap::new();
    for (i, name) in names.into_iter().enumerate() {
        let attr = Attribute::from_name(name);
        if let Some(a) = attr {
            if seen.insert(a, i).is_some() {
                return Err(DataError::Header(format!("attribute {a} appears twice")));
            }
        }
        columns.push(attr);
    }
    let missing: Vec<&str> = Attribute::ALL
        .iter()
        .filter(|a| !seen.contains_key(a))
        .map(|a| a.name())
        .collect();
    if !missing.is_empty() {
        return Err(DataError::Header(format!(
            "missing attributes: {}",
            missing.join(", ")
        )));
    }
    Ok(columns)
}

fn is_missing(token: &str) -> bool {
    token.is_empty() || token == "?"
}

fn parse_float(token: &str, attr: Attribute, row: usize) -> Result<f64, DataError> {
    match token.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(DataError::Row {
            row,
            message: format!("{attr}: expected a number, found {token:?}"),
        }),
    }
}

/// Integer columns also accept integral decimals such as `12.0`.
fn parse_int(token: &str, attr: Attribute, row: usize) -> Result<i64, DataError> {
    if let Ok(v) = token.parse::<i64>() {
        return Ok(v);
    }
    let v = parse_float(token, attr, row)?;
    if v.fract() == 0.0 && v.abs() < 9.0e15 {
        Ok(v as i64)
    } else {
        Err(DataError::Row {
            row,
            message: format!("{attr}: expected an integer, found {token:?}"),
        })
    }
}

struct RowBuilder {
    columns: Vec<Option<Attribute>>,
    ids: HashMap<u32, usize>,
}

impl RowBuilder {
    fn build(&mut self, fields: &[&str], row: usize) -> Result<RawRecord, DataError> {
        if fields.len() != self.columns.len() {
            return Err(DataError::Row {
                row,
                message: format!(
                    "expected {} fields, found {}",
                    self.columns.len(),
                    fields.len()
                ),
            });
        }
        let mut rec = RawRecord::default();
        let mut id = None;
        for (token, attr) in fields.iter().zip(&self.columns) {
            let Some(attr) = *attr else { continue };
            let token = token.trim().trim_matches(|c| c == '"' || c == '\'');
            if is_missing(token) {
                if attr == Attribute::Project {
                    return Err(DataError::Row {
                        row,
                        message: "Project id is missing".into(),
                    });
                }
                continue;
            }
            match attr {
                Attribute::Project => {
                    let v = parse_int(token, attr, row)?;
                    id = Some(u32::try_from(v).ok().filter(|&v| v > 0).ok_or_else(|| {
                        DataError::Row {
                            row,
                            message: format!(
                                "Project id must be a positive integer, found {token}"
                            ),
                        }
                    })?);
                }
                Attribute::TeamExp => rec.team_exp = Some(parse_int(token, attr, row)?),
                Attribute::ManagerExp => rec.manager_exp = Some(parse_int(token, attr, row)?),
                Attribute::YearEnd => rec.year_end = Some(parse_int(token, attr, row)?),
                Attribute::Length => rec.length = Some(parse_int(token, attr, row)?),
                Attribute::Effort => rec.effort = Some(parse_float(token, attr, row)?),
                Attribute::Transactions => rec.transactions = Some(parse_int(token, attr, row)?),
                Attribute::Entities => rec.entities = Some(parse_int(token, attr, row)?),
                Attribute::PointsNonAdjust => {
                    rec.points_non_adjust = Some(parse_float(token, attr, row)?)
                }
                Attribute::Envergure => rec.envergure = Some(parse_int(token, attr, row)?),
                Attribute::PointsAdjust => rec.points_adjust = Some(parse_float(token, attr, row)?),
                Attribute::Language => {
                    let code = parse_int(token, attr, row)?;
                    rec.language = Some(Language::from_code(code).map_err(|e| DataError::Row {
                        row,
                        message: e.to_string(),
                    })?);
                }
            }
        }
        let id = id.expect("project column is required by the header check");
        if let Some(&first_row) = self.ids.get(&id) {
            return Err(DataError::DuplicateProject {
                project_id: id,
                first_row,
                row,
            });
        }
        self.ids.insert(id, row);
        rec.project_id = id;
        Ok(rec)
    }
}

fn parse_csv<R: Read>(reader: R) -> Result<Vec<RawRecord>, DataError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let columns = column_map(headers.iter())?;
    let mut builder = RowBuilder {
        columns,
        ids: HashMap::new(),
    };
    let mut out = Vec::new();
    let mut row = 0;
    for result in rdr.records() {
        let record = result?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        row += 1;
        let fields: Vec<&str> = record.iter().collect();
        out.push(builder.build(&fields, row)?);
    }
    Ok(out)
}

fn parse_arff(text: &str) -> Result<Vec<RawRecord>, DataError> {
    let mut names = Vec::new();
    let mut builder = None;
    let mut out = Vec::new();
    let mut row = 0;
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let Some(builder) = builder.as_mut() else {
            let lower = line.to_ascii_lowercase();
            if lower.starts_with("@attribute") {
                let rest = line["@attribute".len()..].trim_start();
                let name = match rest.chars().next() {
                    Some(q @ ('\'' | '"')) => rest[1..].split(q).next().unwrap_or(""),
                    _ => rest.split_whitespace().next().unwrap_or(""),
                };
                names.push(name.to_string());
            } else if lower.starts_with("@data") {
                let columns = column_map(names.iter().map(String::as_str))?;
                builder = Some(RowBuilder {
                    columns,
                    ids: HashMap::new(),
                });
            } else if !lower.starts_with("@relation") {
                return Err(DataError::Header(format!(
                    "unexpected line before @data: {line}"
                )));
            }
            continue;
        };
        row += 1;
        let fields: Vec<&str> = line.split(',').collect();
        out.push(builder.build(&fields, row)?);
    }
    if builder.is_none() {
        return Err(DataError::Header("no @data section".into()));
    }
    Ok(out)
}

fn field_text(rec: &RawRecord, attr: Attribute, missing: &str) -> String {
    fn opt<T: ToString>(v: Option<T>, missing: &str) -> String {
        v.map_or_else(|| missing.to_string(), |v| v.to_string())
    }
    match attr {
        Attribute::Project => rec.project_id.to_string(),
        Attribute::TeamExp => opt(rec.team_exp, missing),
        Attribute::ManagerExp => opt(rec.manager_exp, missing),
        Attribute::YearEnd => opt(rec.year_end, missing),
        Attribute::Length => opt(rec.length, missing),
        Attribute::Effort => opt(rec.effort, missing),
        Attribute::Transactions => opt(rec.transactions, missing),
        Attribute::Entities => opt(rec.entities, missing),
        Attribute::PointsNonAdjust => opt(rec.points_non_adjust, missing),
        Attribute::Envergure => opt(rec.envergure, missing),
        Attribute::PointsAdjust => opt(rec.points_adjust, missing),
        Attribute::Language => opt(rec.language.map(Language::code), missing),
    }
}

/// CSV with the canonical header; absent values are empty fields.
pub fn to_csv_string(records: &[RawRecord]) -> String {
    let mut out = String::new();
    let header: Vec<&str> = Attribute::ALL.iter().map(|a| a.name()).collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for rec in records {
        let row: Vec<String> = Attribute::ALL
            .iter()
            .map(|&a| field_text(rec, a, ""))
            .collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// ARFF with numeric attributes; absent values are `?`.
pub fn to_arff_string(records: &[RawRecord], relation: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "@relation {relation}\n");
    for a in Attribute::ALL {
        let _ = writeln!(out, "@attribute {} numeric", a.name());
    }
    out.push_str("\n@data\n");
    for rec in records {
        let row: Vec<String> = Attribute::ALL
            .iter()
            .map(|&a| field_text(rec, a, "?"))
            .collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn serialize(records: &[RawRecord], format: DataFormat) -> String {
    match format {
        DataFormat::Csv => to_csv_string(records),
        DataFormat::Arff => to_arff_string(records, "effort"),
    }
}
