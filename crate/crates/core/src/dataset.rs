//! Dataset preparation: dummy coding of categorical columns and
//! standardization of every feature column.
//!
//! A categorical column with `L` levels becomes `L - 1` dummy features.
//! Levels are ordered by first appearance and the last-appearing level is
//! the reference. Dummies are standardized like real features so that
//! they enter projections on the same scale; the raw 0/1 copies are kept
//! for indicator ridges.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::math;

#[derive(Debug, Clone, PartialEq)]
pub enum RawValues {
    Numeric(Vec<Option<f64>>),
    Text(Vec<Option<String>>),
}

impl RawValues {
    pub fn len(&self) -> usize {
        match self {
            RawValues::Numeric(v) => v.len(),
            RawValues::Text(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawColumn {
    pub name: String,
    pub values: RawValues,
}

impl RawColumn {
    pub fn numeric(name: &str, values: &[f64]) -> Self {
        Self { name: name.to_string(), values: RawValues::Numeric(values.iter().map(|&v| Some(v)).collect()) }
    }

    pub fn text(name: &str, values: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            values: RawValues::Text(values.iter().map(|v| Some(v.to_string())).collect()),
        }
    }
}

/// Columns of equal length, addressed by name.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RawTable {
    pub columns: Vec<RawColumn>,
}

impl RawTable {
    pub fn new(columns: Vec<RawColumn>) -> Self {
        Self { columns }
    }

    pub fn n_rows(&self) -> usize {
        self.columns.first().map_or(0, |c| c.values.len())
    }

    pub fn column(&self, name: &str) -> Option<&RawColumn> {
        self.columns.iter().find(|c| c.name == name)
    }

    /// Builds a purely numeric table from row-major feature rows named
    /// `x1..xp` plus an optional response column `y`.
    pub fn from_rows(p: usize, rows: &[Vec<f64>], y: Option<&[f64]>) -> Self {
        let mut columns: Vec<RawColumn> = (0..p)
            .map(|j| {
                let vals: Vec<f64> = rows.iter().map(|r| r[j]).collect();
                RawColumn::numeric(&format!("x{}", j + 1), &vals)
            })
            .collect();
        if let Some(y) = y {
            columns.push(RawColumn::numeric("y", y));
        }
        Self { columns }
    }

    fn check_rectangular(&self) -> Result<usize> {
        let n = self.n_rows();
        if self.columns.iter().any(|c| c.values.len() != n) {
            return Err(Error::RaggedTable);
        }
        Ok(n)
    }
}

/// Which columns are responses and which are categorical. All remaining
/// columns are real-valued features.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Roles {
    pub response: Vec<String>,
    pub categorical: Vec<String>,
}

impl Roles {
    pub fn new(response: &str) -> Self {
        Self { response: vec![response.to_string()], categorical: Vec::new() }
    }

    pub fn with_categorical(mut self, names: &[&str]) -> Self {
        self.categorical = names.iter().map(|s| s.to_string()).collect();
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum FeatureSource {
    Numeric { column: String },
    Dummy { column: String, level: String },
}

/// One standardized feature: where it comes from and how it was scaled.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FeatureColumn {
    pub name: String,
    pub source: FeatureSource,
    pub mean: f64,
    pub sd: f64,
}

/// Observed levels of a categorical column; the last one is the reference.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CategoricalLevels {
    pub column: String,
    pub levels: Vec<String>,
}

/// Everything needed to map a raw table onto the training feature space.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Standardization {
    pub features: Vec<FeatureColumn>,
    pub categoricals: Vec<CategoricalLevels>,
    pub response: Vec<String>,
}

/// Standardized design inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct Features {
    /// `n x p`, every column mean zero and unit sample variance on the
    /// training data.
    pub x_std: Matrix,
    /// `n x p_dummy` raw 0/1 dummy values.
    pub dummies_raw: Matrix,
    /// For each feature, its column in `dummies_raw` if it is a dummy.
    pub dummy_slot: Vec<Option<usize>>,
    pub standardization: Standardization,
}

impl Features {
    pub fn n(&self) -> usize {
        self.x_std.rows()
    }

    pub fn p(&self) -> usize {
        self.x_std.cols()
    }

    pub fn p_dummy(&self) -> usize {
        self.dummies_raw.cols()
    }

    pub fn p_real(&self) -> usize {
        self.p() - self.p_dummy()
    }

    pub fn is_dummy(&self, j: usize) -> bool {
        self.dummy_slot[j].is_some()
    }

    pub fn dummy_indices(&self) -> Vec<usize> {
        (0..self.p()).filter(|&j| self.is_dummy(j)).collect()
    }

    /// `X_std * theta`, skipping zero entries.
    pub fn project(&self, theta: &[f64]) -> Vec<f64> {
        self.x_std.matvec(theta)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub features: Features,
    pub y: Vec<f64>,
}

impl Dataset {
    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn p(&self) -> usize {
        self.features.p()
    }
}

/// Prepares a single-response dataset.
pub fn prepare_dataset(table: &RawTable, roles: &Roles) -> Result<Dataset> {
    if roles.response.len() != 1 {
        return Err(Error::InvalidArgument("expected exactly one response column".to_string()));
    }
    let (features, y) = prepare_multivariate(table, roles)?;
    Ok(Dataset { features, y: y.col(0).to_vec() })
}

/// Prepares features plus an `n x D` response matrix (one column per
/// response name, in order).
pub fn prepare_multivariate(table: &RawTable, roles: &Roles) -> Result<(Features, Matrix)> {
    let n = table.check_rectangular()?;
    if n < 2 {
        return Err(Error::TooFewRows { needed: 2, got: n });
    }
    if roles.response.is_empty() {
        return Err(Error::InvalidArgument("no response column".to_string()));
    }
    for name in roles.response.iter().chain(&roles.categorical) {
        if table.column(name).is_none() {
            return Err(Error::MissingColumn(name.clone()));
        }
    }
    let mut responses = Vec::with_capacity(roles.response.len());
    for name in &roles.response {
        let col = table.column(name).expect("checked above");
        responses.push(numeric_values(col)?);
    }
    let y = Matrix::from_columns(n, &responses);

    let mut specs = Vec::new();
    let mut categoricals = Vec::new();
    for col in &table.columns {
        if roles.response.contains(&col.name) {
            continue;
        }
        if roles.categorical.contains(&col.name) {
            let labels = text_values(col)?;
            let mut levels: Vec<String> = Vec::new();
            for l in &labels {
                if !levels.contains(l) {
                    levels.push(l.clone());
                }
            }
            if levels.len() < 2 {
                return Err(Error::TooFewLevels(col.name.clone()));
            }
            for level in &levels[..levels.len() - 1] {
                let raw: Vec<f64> = labels.iter().map(|l| if l == level { 1.0 } else { 0.0 }).collect();
                let source = FeatureSource::Dummy { column: col.name.clone(), level: level.clone() };
                specs.push((format!("{}={}", col.name, level), source, raw));
            }
            categoricals.push(CategoricalLevels { column: col.name.clone(), levels });
        } else {
            let raw = numeric_values(col)?;
            specs.push((col.name.clone(), FeatureSource::Numeric { column: col.name.clone() }, raw));
        }
    }

    let mut features = Vec::with_capacity(specs.len());
    let mut std_cols = Vec::with_capacity(specs.len());
    let mut dummy_cols = Vec::new();
    let mut dummy_slot = Vec::with_capacity(specs.len());
    for (name, source, raw) in specs {
        let mean = math::mean(&raw);
        let sd = math::sqrt(math::variance(&raw));
        if !(sd > 0.0) || sd <= 1e-14 * math::abs(mean).max(1.0) {
            return Err(Error::ConstantColumn(name));
        }
        std_cols.push(raw.iter().map(|v| (v - mean) / sd).collect::<Vec<f64>>());
        if matches!(source, FeatureSource::Dummy { .. }) {
            dummy_slot.push(Some(dummy_cols.len()));
            dummy_cols.push(raw);
        } else {
            dummy_slot.push(None);
        }
        features.push(FeatureColumn { name, source, mean, sd });
    }

    let standardization = Standardization { features, categoricals, response: roles.response.clone() };
    let f = Features {
        x_std: Matrix::from_columns(n, &std_cols),
        dummies_raw: Matrix::from_columns(n, &dummy_cols),
        dummy_slot,
        standardization,
    };
    Ok((f, y))
}

impl Standardization {
    pub fn p(&self) -> usize {
        self.features.len()
    }

    /// Maps a raw table (training schema, response columns optional) onto
    /// the stored feature space.
    pub fn apply(&self, table: &RawTable) -> Result<Features> {
        let n = table.check_rectangular()?;
        let mut std_cols = Vec::with_capacity(self.features.len());
        let mut dummy_cols = Vec::new();
        let mut dummy_slot = Vec::with_capacity(self.features.len());
        let mut labels_cache: Vec<(String, Vec<String>)> = Vec::new();
        for fc in &self.features {
            let raw = match &fc.source {
                FeatureSource::Numeric { column } => {
                    let col = table.column(column).ok_or_else(|| Error::MissingColumn(column.clone()))?;
                    numeric_values(col)?
                }
                FeatureSource::Dummy { column, level } => {
                    if !labels_cache.iter().any(|(c, _)| c == column) {
                        let col = table.column(column).ok_or_else(|| Error::MissingColumn(column.clone()))?;
                        let labels = text_values(col)?;
                        let known = self
                            .categoricals
                            .iter()
                            .find(|c| &c.column == column)
                            .ok_or_else(|| Error::MissingColumn(column.clone()))?;
                        if let Some(bad) = labels.iter().find(|l| !known.levels.contains(l)) {
                            return Err(Error::UnknownLevel { column: column.clone(), level: bad.clone() });
                        }
                        labels_cache.push((column.clone(), labels));
                    }
                    let labels = &labels_cache.iter().find(|(c, _)| c == column).expect("cached").1;
                    labels.iter().map(|l| if l == level { 1.0 } else { 0.0 }).collect()
                }
            };
            std_cols.push(raw.iter().map(|v| (v - fc.mean) / fc.sd).collect::<Vec<f64>>());
            if matches!(fc.source, FeatureSource::Dummy { .. }) {
                dummy_slot.push(Some(dummy_cols.len()));
                dummy_cols.push(raw);
            } else {
                dummy_slot.push(None);
            }
        }
        Ok(Features {
            x_std: Matrix::from_columns(n, &std_cols),
            dummies_raw: Matrix::from_columns(n, &dummy_cols),
            dummy_slot,
            standardization: self.clone(),
        })
    }
}

fn numeric_values(col: &RawColumn) -> Result<Vec<f64>> {
    match &col.values {
        RawValues::Numeric(v) => v
            .iter()
            .enumerate()
            .map(|(row, x)| match x {
                Some(x) if x.is_finite() => Ok(*x),
                _ => Err(Error::MissingValue { column: col.name.clone(), row }),
            })
            .collect(),
        RawValues::Text(_) => Err(Error::NonNumeric(col.name.clone())),
    }
}

fn text_values(col: &RawColumn) -> Result<Vec<String>> {
    match &col.values {
        RawValues::Text(v) => v
            .iter()
            .enumerate()
            .map(|(row, x)| match x {
                Some(s) if !s.is_empty() => Ok(s.clone()),
                _ => Err(Error::MissingValue { column: col.name.clone(), row }),
            })
            .collect(),
        RawValues::Numeric(v) => v
            .iter()
            .enumerate()
            .map(|(row, x)| match x {
                Some(x) if !x.is_nan() => Ok(format!("{x}")),
                _ => Err(Error::MissingValue { column: col.name.clone(), row }),
            })
            .collect(),
    }
}
