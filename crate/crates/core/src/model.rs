//! Ridge components and the sampler's parameter state.

use alloc::vec::Vec;

use crate::basis;
use crate::dataset::Features;
use crate::error::Result;
use crate::linalg::Matrix;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "type", rename_all = "snake_case"))]
pub enum RidgeKind {
    /// Spline of the projection with initial knot `t0` and knots
    /// `t_1..t_{K+1}` fixed from the training projections.
    Spline { t0: f64, knots: Vec<f64> },
    /// Union indicator over dummy-only active sets; a single column.
    Indicator,
}

/// One ridge function's structural parameters.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RidgeComponent {
    /// Sorted active feature indices (zero-based).
    pub features: Vec<usize>,
    /// Unit direction of length `p`, zero off `features`.
    pub direction: Vec<f64>,
    pub kind: RidgeKind,
}

impl RidgeComponent {
    pub fn active(&self) -> usize {
        self.features.len()
    }

    /// Number of design columns this ridge contributes.
    pub fn width(&self) -> usize {
        match &self.kind {
            RidgeKind::Spline { knots, .. } => knots.len() - 1,
            RidgeKind::Indicator => 1,
        }
    }

    pub fn is_indicator(&self) -> bool {
        matches!(self.kind, RidgeKind::Indicator)
    }

    pub fn t0(&self) -> Option<f64> {
        match &self.kind {
            RidgeKind::Spline { t0, .. } => Some(*t0),
            RidgeKind::Indicator => None,
        }
    }
}

/// A full sampler state minus the design cache.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ModelState {
    pub components: Vec<RidgeComponent>,
    /// Intercept followed by each ridge's coefficients in component order.
    pub beta: Vec<f64>,
    pub sigma2: f64,
    pub tau: f64,
}

impl ModelState {
    pub fn m(&self) -> usize {
        self.components.len()
    }

    /// Basis columns excluding the intercept.
    pub fn basis_columns(&self) -> usize {
        self.components.iter().map(RidgeComponent::width).sum()
    }

    pub fn n_coefficients(&self) -> usize {
        1 + self.basis_columns()
    }

    /// Index of the first design column of component `m`.
    pub fn column_offset(&self, m: usize) -> usize {
        1 + self.components[..m].iter().map(RidgeComponent::width).sum::<usize>()
    }

    /// Column offset at which a ridge inserted at `slot` would start.
    pub fn column_offset_or_end(&self, slot: usize) -> usize {
        if slot >= self.m() {
            self.n_coefficients()
        } else {
            self.column_offset(slot)
        }
    }

    /// Recomputes the design `[1 | B_1 | ... | B_M]` from the components.
    pub fn rebuild_design(&self, features: &Features) -> Result<Matrix> {
        basis::build_design(features, &self.components)
    }
}
