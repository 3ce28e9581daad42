//! Model files: one JSON document per fit.
//!
//! ```text
//! {
//!   "schema_version": 1,
//!   "kind": "univariate" | "multivariate",
//!   "hyperparams": {...},          // master settings (seed = master seed)
//!   "standardization": {...},      // feature records for raw-scale prediction
//!   "states": [...],               // retained draws (univariate only)
//!   "traces": {...},               // whole-run sigma / M / tau traces (univariate only)
//!   "basis": {...},                // multivariate: D x D- output basis H
//!   "y_mean": [...],               // multivariate: response centering
//!   "D_minus": 15,                 // multivariate: retained components
//!   "explained_variance": [...],   // multivariate
//!   "components": [{"seed", "states", "traces"}, ...]  // multivariate: one chain per score
//! }
//! ```

use std::fs;
use std::path::Path;

use bppr_core::chain::Traces;
use bppr_core::dataset::Standardization;
use bppr_core::multivariate::{MultivariateFit, ResponseBasis};
use bppr_core::{Hyperparams, Matrix, ModelState, PosteriorChain};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Univariate,
    Multivariate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentRecord {
    pub seed: u64,
    pub states: Vec<ModelState>,
    pub traces: Traces,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    pub schema_version: u32,
    pub kind: ModelKind,
    pub hyperparams: Hyperparams,
    pub standardization: Standardization,
    #[serde(default)]
    pub states: Vec<ModelState>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub traces: Option<Traces>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Matrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_mean: Option<Vec<f64>>,
    #[serde(default, rename = "D_minus", skip_serializing_if = "Option::is_none")]
    pub d_minus: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub explained_variance: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub components: Option<Vec<ComponentRecord>>,
}

/// A fitted model of either kind.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Univariate(PosteriorChain),
    Multivariate { hyper: Hyperparams, fit: MultivariateFit },
}

impl Model {
    pub fn standardization(&self) -> &Standardization {
        match self {
            Model::Univariate(c) => &c.standardization,
            Model::Multivariate { fit, .. } => &fit.chains[0].standardization,
        }
    }

    /// Every chain, in component order.
    pub fn chains(&self) -> Vec<&PosteriorChain> {
        match self {
            Model::Univariate(c) => vec![c],
            Model::Multivariate { fit, .. } => fit.chains.iter().collect(),
        }
    }

    pub fn to_document(&self) -> ModelDocument {
        match self {
            Model::Univariate(c) => ModelDocument {
                schema_version: SCHEMA_VERSION,
                kind: ModelKind::Univariate,
                hyperparams: c.hyper.clone(),
                standardization: c.standardization.clone(),
                states: c.states.clone(),
                traces: Some(c.traces.clone()),
                basis: None,
                y_mean: None,
                d_minus: None,
                explained_variance: None,
                components: None,
            },
            Model::Multivariate { hyper, fit } => ModelDocument {
                schema_version: SCHEMA_VERSION,
                kind: ModelKind::Multivariate,
                hyperparams: hyper.clone(),
                standardization: self.standardization().clone(),
                states: Vec::new(),
                traces: None,
                basis: Some(fit.basis.h.clone()),
                y_mean: Some(fit.basis.y_mean.clone()),
                d_minus: Some(fit.basis.d_minus()),
                explained_variance: Some(fit.basis.explained_variance.clone()),
                components: Some(
                    fit.chains
                        .iter()
                        .map(|c| ComponentRecord { seed: c.hyper.seed, states: c.states.clone(), traces: c.traces.clone() })
                        .collect(),
                ),
            },
        }
    }

    pub fn from_document(doc: ModelDocument) -> Result<Self> {
        if doc.schema_version != SCHEMA_VERSION {
            return Err(version_error(doc.schema_version as u64));
        }
        match doc.kind {
            ModelKind::Univariate => {
                let traces = doc.traces.ok_or_else(|| CliError::schema("univariate model without traces"))?;
                if doc.basis.is_some() || doc.components.is_some() {
                    return Err(CliError::schema("univariate model carries multivariate fields"));
                }
                if doc.states.is_empty() {
                    return Err(CliError::schema("model has no retained states"));
                }
                Ok(Model::Univariate(PosteriorChain {
                    hyper: doc.hyperparams,
                    standardization: doc.standardization,
                    states: doc.states,
                    traces,
                }))
            }
            ModelKind::Multivariate => {
                let missing = |f: &str| CliError::schema(format!("multivariate model without {f}"));
                let h = doc.basis.ok_or_else(|| missing("basis"))?;
                let y_mean = doc.y_mean.ok_or_else(|| missing("y_mean"))?;
                let d_minus = doc.d_minus.ok_or_else(|| missing("D_minus"))?;
                let explained_variance = doc.explained_variance.ok_or_else(|| missing("explained_variance"))?;
                let components = doc.components.ok_or_else(|| missing("components"))?;
                if h.cols() != d_minus
                    || h.rows() != y_mean.len()
                    || explained_variance.len() != d_minus
                    || components.len() != d_minus
                    || d_minus == 0
                {
                    return Err(CliError::schema("multivariate basis dimensions are inconsistent"));
                }
                if components.iter().any(|c| c.states.is_empty())
                    || components.windows(2).any(|w| w[0].states.len() != w[1].states.len())
                {
                    return Err(CliError::schema("component chains must retain the same positive number of states"));
                }
                let chains = components
                    .into_iter()
                    .map(|c| {
                        let mut hyper = doc.hyperparams.clone();
                        hyper.seed = c.seed;
                        PosteriorChain { hyper, standardization: doc.standardization.clone(), states: c.states, traces: c.traces }
                    })
                    .collect();
                Ok(Model::Multivariate {
                    hyper: doc.hyperparams,
                    fit: MultivariateFit { basis: ResponseBasis { h, y_mean, explained_variance }, chains },
                })
            }
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_document()).expect("model documents serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Probe {
            schema_version: Option<serde_json::Value>,
        }
        let probe: Probe = serde_json::from_str(text).map_err(|e| parse_error(text, &e))?;
        match probe.schema_version {
            None => return Err(CliError::schema("model file has no schema_version")),
            Some(v) if v.as_u64() != Some(SCHEMA_VERSION as u64) => {
                return Err(match v.as_u64() {
                    Some(n) => version_error(n),
                    None => CliError::schema(format!("schema_version must be an integer, got {v}")),
                })
            }
            Some(_) => {}
        }
        let doc: ModelDocument = serde_json::from_str(text).map_err(|e| parse_error(text, &e))?;
        Self::from_document(doc)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()).map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }
}

fn version_error(found: u64) -> CliError {
    CliError::schema(format!("unsupported schema_version {found} (expected {SCHEMA_VERSION})"))
}

/// Byte offset of a 1-based line/column position.
fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    let start: usize = text.split_inclusive('\n').take(line.saturating_sub(1)).map(str::len).sum();
    (start + column.saturating_sub(1)).min(text.len())
}

fn parse_error(text: &str, e: &serde_json::Error) -> CliError {
    let offset = byte_offset(text, e.line(), e.column());
    let what = if e.is_syntax() || e.is_eof() { "malformed model file" } else { "model file does not match the schema" };
    CliError::schema(format!("{what} at byte {offset}: {e}"))
}
