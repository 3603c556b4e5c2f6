//! Design-matrix expansion: main effects, two-way interactions and the two
//! column filters (near-duplicate correlation, sparse 0/1 indicators).
//!
//! Candidates are visited in a fixed order (main effects, then products
//! `a:b` for `a < b`) and each is either kept or dropped with exactly one
//! recorded reason.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::boosting::DesignMatrix;
use crate::error::{Error, Result};
use crate::numerics::{check_finite, dot, mean, RealMatrix};

/// Named numeric columns of equal length.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTable {
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
    rows: usize,
}

impl RawTable {
    pub fn new(names: Vec<String>, columns: Vec<Vec<f64>>) -> Result<Self> {
        if names.len() != columns.len() {
            return Err(Error::InvalidInput(format!(
                "{} names for {} columns",
                names.len(),
                columns.len()
            )));
        }
        let rows = columns.first().map_or(0, Vec::len);
        for (name, c) in names.iter().zip(&columns) {
            if c.len() != rows {
                return Err(Error::InvalidInput(format!(
                    "column '{name}' has {} rows, expected {rows}",
                    c.len()
                )));
            }
            check_finite(c)?;
        }
        Ok(Self {
            names,
            columns,
            rows,
        })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.columns.len()
    }
}

/// Which previously kept columns a candidate is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrelationScope {
    /// Every kept column, main effects included.
    AllKept,
    /// Only interactions, and only against kept interactions.
    InteractionsOnly,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpansionConfig {
    pub include_interactions: bool,
    pub corr_cutoff: f64,
    pub min_ones: usize,
    pub corr_scope: CorrelationScope,
}

impl Default for ExpansionConfig {
    fn default() -> Self {
        Self {
            include_interactions: true,
            corr_cutoff: 0.95,
            min_ones: 20,
            corr_scope: CorrelationScope::AllKept,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DropReason {
    /// 0/1 column with fewer than `min_ones` ones.
    SparseIndicator { ones: usize },
    /// No variation across rows.
    Constant,
    /// `|corr|` with an earlier kept column exceeds the cutoff.
    Correlated { with: String, corr: f64 },
}

impl core::fmt::Display for DropReason {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            DropReason::SparseIndicator { ones } => write!(f, "sparse indicator ({ones} ones)"),
            DropReason::Constant => f.write_str("constant"),
            DropReason::Correlated { with, corr } => write!(f, "correlated with {with} ({corr:.4})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DroppedColumn {
    pub name: String,
    pub reason: DropReason,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpandedDesign {
    pub names: Vec<String>,
    pub design: DesignMatrix,
    pub dropped: Vec<DroppedColumn>,
}

fn ones_if_indicator(col: &[f64]) -> Option<usize> {
    let mut ones = 0;
    for &v in col {
        if v == 1.0 {
            ones += 1;
        } else if v != 0.0 {
            return None;
        }
    }
    Some(ones)
}

/// Centred column scaled to unit Euclidean norm, or `None` if constant.
fn unit_centred(col: &[f64]) -> Option<Vec<f64>> {
    let m = mean(col);
    let c: Vec<f64> = col.iter().map(|v| v - m).collect();
    let norm = libm::sqrt(dot(&c, &c));
    let magnitude = col.iter().fold(0.0f64, |a, v| a.max(libm::fabs(*v)));
    if norm == 0.0 || norm <= 1e-12 * magnitude * libm::sqrt(col.len() as f64) {
        return None;
    }
    Some(c.into_iter().map(|v| v / norm).collect())
}

struct Kept {
    name: String,
    unit: Vec<f64>,
    raw: Vec<f64>,
    interaction: bool,
}

pub fn expand_design(table: &RawTable, cfg: &ExpansionConfig) -> Result<ExpandedDesign> {
    if table.ncols() == 0 {
        return Err(Error::InvalidInput("no covariate columns to expand".into()));
    }
    if !(cfg.corr_cutoff > 0.0 && cfg.corr_cutoff <= 1.0) {
        return Err(Error::InvalidInput("corr_cutoff must lie in (0, 1]".into()));
    }

    let k = table.ncols();
    let mut candidates: Vec<(String, Vec<f64>, bool)> = table
        .names()
        .iter()
        .cloned()
        .zip(table.columns().iter().cloned())
        .map(|(n, c)| (n, c, false))
        .collect();
    if cfg.include_interactions {
        for a in 0..k {
            for b in a + 1..k {
                let prod = table.columns()[a]
                    .iter()
                    .zip(&table.columns()[b])
                    .map(|(u, v)| u * v)
                    .collect();
                candidates.push((format!("{}:{}", table.names()[a], table.names()[b]), prod, true));
            }
        }
    }

    let mut kept: Vec<Kept> = Vec::new();
    let mut dropped = Vec::new();
    'candidates: for (name, col, interaction) in candidates {
        if let Some(ones) = ones_if_indicator(&col) {
            if ones < cfg.min_ones {
                dropped.push(DroppedColumn {
                    name,
                    reason: DropReason::SparseIndicator { ones },
                });
                continue;
            }
        }
        let Some(unit) = unit_centred(&col) else {
            dropped.push(DroppedColumn {
                name,
                reason: DropReason::Constant,
            });
            continue;
        };
        let check = match cfg.corr_scope {
            CorrelationScope::AllKept => true,
            CorrelationScope::InteractionsOnly => interaction,
        };
        if check {
            for other in &kept {
                if cfg.corr_scope == CorrelationScope::InteractionsOnly && !other.interaction {
                    continue;
                }
                let corr = dot(&unit, &other.unit);
                if libm::fabs(corr) > cfg.corr_cutoff {
                    dropped.push(DroppedColumn {
                        name,
                        reason: DropReason::Correlated {
                            with: other.name.clone(),
                            corr,
                        },
                    });
                    continue 'candidates;
                }
            }
        }
        kept.push(Kept {
            name,
            unit,
            raw: col,
            interaction,
        });
    }

    if kept.is_empty() {
        return Err(Error::EmptyDesign);
    }
    let rows = table.rows();
    let mut raw = RealMatrix::zeros(rows, 0);
    let mut names = Vec::with_capacity(kept.len());
    for k in kept {
        raw.push_column(&k.raw)?;
        names.push(k.name);
    }
    Ok(ExpandedDesign {
        names,
        design: DesignMatrix::new(raw)?,
        dropped,
    })
}
