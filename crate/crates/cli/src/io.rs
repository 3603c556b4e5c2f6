//! Delimited-text ingestion with listwise deletion.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use l2boost_core::{RawTable, RealMatrix};

const MISSING: [&str; 4] = ["", "NA", "NaN", "."];

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("cannot read {path}: {message}")]
    Read { path: PathBuf, message: String },

    #[error("malformed delimited text: {0}")]
    Malformed(String),

    #[error("unknown column '{0}'")]
    UnknownColumn(String),

    #[error("non-numeric value '{value}' in column '{column}' at data row {row}")]
    NonNumeric {
        row: usize,
        column: String,
        value: String,
    },

    #[error("no usable rows after dropping {dropped} with missing values")]
    NoUsableRows { dropped: usize },

    #[error("invalid column roles: {0}")]
    Roles(String),
}

impl IoError {
    pub fn code(&self) -> &'static str {
        match self {
            IoError::Read { .. } => "read_failed",
            IoError::Malformed(_) => "malformed_input",
            IoError::UnknownColumn(_) => "unknown_column",
            IoError::NonNumeric { .. } => "non_numeric",
            IoError::NoUsableRows { .. } => "no_usable_rows",
            IoError::Roles(_) => "invalid_roles",
        }
    }
}

/// Which dataset column plays which part in an analysis.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ColumnRoleMap {
    pub outcome: String,
    pub treatment: Option<String>,
    pub endogenous: Option<String>,
    pub instruments: Vec<String>,
    pub controls: Vec<String>,
}

impl ColumnRoleMap {
    pub fn validate(&self) -> Result<(), IoError> {
        if self.outcome.is_empty() {
            return Err(IoError::Roles("an outcome column is required".into()));
        }
        if self.treatment.is_some() && self.endogenous.is_some() {
            return Err(IoError::Roles(
                "treatment and endogenous regressor are mutually exclusive".into(),
            ));
        }
        let mut seen = HashSet::new();
        for name in self.used() {
            if !seen.insert(name) {
                return Err(IoError::Roles(format!("column '{name}' is given two roles")));
            }
        }
        Ok(())
    }

    /// Every referenced column, outcome first.
    pub fn used(&self) -> Vec<&str> {
        let mut v = vec![self.outcome.as_str()];
        v.extend(self.treatment.as_deref());
        v.extend(self.endogenous.as_deref());
        v.extend(self.instruments.iter().map(String::as_str));
        v.extend(self.controls.iter().map(String::as_str));
        v
    }

    /// The treatment or endogenous column, whichever is set.
    pub fn regressor(&self) -> Option<&str> {
        self.treatment.as_deref().or(self.endogenous.as_deref())
    }
}

/// Header plus unparsed cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn column_index(&self, name: &str) -> Result<usize, IoError> {
        self.headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| IoError::UnknownColumn(name.to_string()))
    }

    /// Parses the listed columns, keeping only rows complete in all of them.
    /// Returns the columns and the number of dropped rows.
    pub fn complete_columns(&self, cols: &[usize]) -> Result<(Vec<Vec<f64>>, usize), IoError> {
        let mut out = vec![Vec::with_capacity(self.rows.len()); cols.len()];
        let mut cells = Vec::with_capacity(cols.len());
        let mut dropped = 0;
        for (i, row) in self.rows.iter().enumerate() {
            cells.clear();
            for &c in cols {
                let raw = row.get(c).map_or("", String::as_str);
                cells.push(parse_cell(raw, i + 1, &self.headers[c])?);
            }
            if cells.iter().any(Option::is_none) {
                dropped += 1;
                continue;
            }
            for (dst, v) in out.iter_mut().zip(&cells) {
                dst.push(v.unwrap_or_default());
            }
        }
        if dropped == self.rows.len() {
            return Err(IoError::NoUsableRows { dropped });
        }
        Ok((out, dropped))
    }

    pub fn columns_by_name(&self, names: &[String]) -> Result<(Vec<Vec<f64>>, usize), IoError> {
        let idx = names
            .iter()
            .map(|n| self.column_index(n))
            .collect::<Result<Vec<_>, _>>()?;
        self.complete_columns(&idx)
    }

    /// Named columns, listwise-deleted, as a [`RawTable`].
    pub fn raw_table(&self, names: &[String]) -> Result<(RawTable, usize), IoError> {
        let (cols, dropped) = self.columns_by_name(names)?;
        let table = RawTable::new(names.to_vec(), cols)
            .map_err(|e| IoError::Malformed(e.to_string()))?;
        Ok((table, dropped))
    }

    /// Headers not in `exclude`, in file order.
    pub fn other_columns(&self, exclude: &[&str]) -> Vec<String> {
        self.headers
            .iter()
            .filter(|h| !exclude.contains(&h.as_str()))
            .cloned()
            .collect()
    }
}

/// Arrays for one analysis after listwise deletion.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedData {
    pub y: Vec<f64>,
    /// Treatment or endogenous regressor; empty if the role map has neither.
    pub d: Vec<f64>,
    pub controls: RealMatrix,
    pub instruments: RealMatrix,
    pub rows_dropped: usize,
}

impl LoadedData {
    pub fn n(&self) -> usize {
        self.y.len()
    }
}

/// Picks whichever of comma, semicolon and tab is most frequent in `line`.
pub fn detect_delimiter(line: &str) -> u8 {
    let mut best = b',';
    let mut best_count = 0;
    for &cand in b",;\t" {
        let count = line.bytes().filter(|&b| b == cand).count();
        if count > best_count {
            best = cand;
            best_count = count;
        }
    }
    best
}

fn parse_cell(raw: &str, row: usize, column: &str) -> Result<Option<f64>, IoError> {
    let t = raw.trim();
    if MISSING.contains(&t) {
        return Ok(None);
    }
    match t.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(Some(v)),
        _ => Err(IoError::NonNumeric {
            row,
            column: column.to_string(),
            value: t.to_string(),
        }),
    }
}

pub fn read_table(path: &Path, delimiter: Option<u8>) -> Result<Table, IoError> {
    let text = fs::read_to_string(path).map_err(|e| IoError::Read {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    parse_table(&text, delimiter)
}

pub fn parse_table(text: &str, delimiter: Option<u8>) -> Result<Table, IoError> {
    let delim = delimiter.unwrap_or_else(|| detect_delimiter(text.lines().next().unwrap_or("")));
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delim)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| IoError::Malformed(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    if headers.iter().all(String::is_empty) {
        return Err(IoError::Malformed("missing header row".into()));
    }
    let mut seen = HashSet::new();
    if let Some(dup) = headers.iter().find(|h| !seen.insert(h.as_str())) {
        return Err(IoError::Malformed(format!("duplicate column '{dup}'")));
    }
    let rows = reader
        .records()
        .map(|rec| {
            rec.map(|r| r.iter().map(str::to_string).collect())
                .map_err(|e| IoError::Malformed(e.to_string()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Table { headers, rows })
}

/// Loads the columns named in `roles`, dropping rows with a missing value in
/// any of them. Columns the role map does not mention are never parsed.
pub fn load_csv(
    path: &Path,
    roles: &ColumnRoleMap,
    delimiter: Option<u8>,
) -> Result<LoadedData, IoError> {
    roles.validate()?;
    load_table(&read_table(path, delimiter)?, roles)
}

pub fn load_from_str(
    text: &str,
    roles: &ColumnRoleMap,
    delimiter: Option<u8>,
) -> Result<LoadedData, IoError> {
    roles.validate()?;
    load_table(&parse_table(text, delimiter)?, roles)
}

pub fn load_table(table: &Table, roles: &ColumnRoleMap) -> Result<LoadedData, IoError> {
    roles.validate()?;
    let used: Vec<String> = roles.used().into_iter().map(String::from).collect();
    let (cols, dropped) = table.columns_by_name(&used)?;
    let n = cols[0].len();

    let mut it = cols.into_iter();
    let y = it.next().unwrap_or_default();
    let d = if roles.regressor().is_some() {
        it.next().unwrap_or_default()
    } else {
        Vec::new()
    };
    let to_matrix = |cs: Vec<Vec<f64>>| {
        RealMatrix::from_columns(n, &cs).map_err(|e| IoError::Malformed(e.to_string()))
    };
    let instruments = to_matrix(it.by_ref().take(roles.instruments.len()).collect())?;
    let controls = to_matrix(it.collect())?;
    Ok(LoadedData {
        y,
        d,
        controls,
        instruments,
        rows_dropped: dropped,
    })
}

/// Writes named columns as comma-separated text with round-trip precision.
pub fn write_columns(path: &Path, names: &[&str], columns: &[&[f64]]) -> Result<(), IoError> {
    let to_err = |e: csv::Error| IoError::Malformed(e.to_string());
    let mut w = csv::Writer::from_path(path).map_err(to_err)?;
    w.write_record(names).map_err(to_err)?;
    let n = columns.first().map_or(0, |c| c.len());
    for i in 0..n {
        w.write_record(columns.iter().map(|c| c[i].to_string()))
            .map_err(to_err)?;
    }
    w.flush().map_err(|e| IoError::Read {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}
