//! Column-oriented predictor tables and datasets.

use std::collections::HashSet;

use crate::error::{NvsdError, Result};

/// Named numeric columns of equal length.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
    n_rows: usize,
}

impl Frame {
    pub fn new(names: Vec<String>, columns: Vec<Vec<f64>>) -> Result<Self> {
        if names.len() != columns.len() {
            return Err(NvsdError::Schema(format!(
                "{} names for {} columns",
                names.len(),
                columns.len()
            )));
        }
        let mut seen = HashSet::new();
        if let Some(dup) = names.iter().find(|n| !seen.insert(n.as_str())) {
            return Err(NvsdError::Schema(format!("duplicate column name {dup:?}")));
        }
        let n_rows = columns.first().map_or(0, Vec::len);
        if let Some((j, _)) = columns.iter().enumerate().find(|(_, c)| c.len() != n_rows) {
            return Err(NvsdError::Schema(format!(
                "column {:?} has {} rows, expected {n_rows}",
                names[j],
                columns[j].len()
            )));
        }
        for (name, col) in names.iter().zip(&columns) {
            if col.iter().any(|v| !v.is_finite()) {
                return Err(NvsdError::Schema(format!("column {name:?} has non-finite values")));
            }
        }
        Ok(Self {
            names,
            columns,
            n_rows,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[j]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn column_by_name(&self, name: &str) -> Option<&[f64]> {
        self.index_of(name).map(|j| self.column(j))
    }

    /// Columns `idx`, in that order.
    pub fn select(&self, idx: &[usize]) -> Frame {
        Frame {
            names: idx.iter().map(|&j| self.names[j].clone()).collect(),
            columns: idx.iter().map(|&j| self.columns[j].clone()).collect(),
            n_rows: self.n_rows,
        }
    }

    /// Rows `rows`, in that order.
    pub fn rows(&self, rows: &[usize]) -> Frame {
        Frame {
            names: self.names.clone(),
            columns: self
                .columns
                .iter()
                .map(|c| rows.iter().map(|&i| c[i]).collect())
                .collect(),
            n_rows: rows.len(),
        }
    }
}

/// Predictors plus a continuous response.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    predictors: Frame,
    response: Vec<f64>,
    response_name: String,
}

impl Dataset {
    pub fn new(predictors: Frame, response: Vec<f64>, response_name: impl Into<String>) -> Result<Self> {
        let response_name = response_name.into();
        if response.len() < 3 {
            return Err(NvsdError::InvalidSample(format!(
                "need at least 3 observations, got {}",
                response.len()
            )));
        }
        if predictors.n_cols() > 0 && predictors.n_rows() != response.len() {
            return Err(NvsdError::Schema(format!(
                "{} predictor rows but {} responses",
                predictors.n_rows(),
                response.len()
            )));
        }
        if response.iter().any(|v| !v.is_finite()) {
            return Err(NvsdError::Schema("response has non-finite values".into()));
        }
        if predictors.index_of(&response_name).is_some() {
            return Err(NvsdError::Schema(format!(
                "response {response_name:?} also appears among the predictors"
            )));
        }
        Ok(Self {
            predictors,
            response,
            response_name,
        })
    }

    pub fn n(&self) -> usize {
        self.response.len()
    }

    pub fn p(&self) -> usize {
        self.predictors.n_cols()
    }

    pub fn predictors(&self) -> &Frame {
        &self.predictors
    }

    pub fn names(&self) -> &[String] {
        self.predictors.names()
    }

    pub fn column(&self, j: usize) -> &[f64] {
        self.predictors.column(j)
    }

    pub fn response(&self) -> &[f64] {
        &self.response
    }

    pub fn response_name(&self) -> &str {
        &self.response_name
    }

    /// Same rows, predictors restricted to `idx`.
    pub fn select_columns(&self, idx: &[usize]) -> Dataset {
        Dataset {
            predictors: self.predictors.select(idx),
            response: self.response.clone(),
            response_name: self.response_name.clone(),
        }
    }

    /// Same rows, with the predictors in `drop` removed. Returns the dataset
    /// and the original indices of the kept columns.
    pub fn without_columns(&self, drop: &[usize]) -> (Dataset, Vec<usize>) {
        let keep: Vec<usize> = (0..self.p()).filter(|j| !drop.contains(j)).collect();
        (self.select_columns(&keep), keep)
    }

    pub fn subset_rows(&self, rows: &[usize]) -> Result<Dataset> {
        Dataset::new(
            self.predictors.rows(rows),
            rows.iter().map(|&i| self.response[i]).collect(),
            self.response_name.clone(),
        )
    }

    pub fn with_response(&self, response: Vec<f64>) -> Result<Dataset> {
        Dataset::new(self.predictors.clone(), response, self.response_name.clone())
    }
}
