//! Ridge-function basis columns.
//!
//! A spline ridge uses a natural cubic spline expansion that is identically
//! zero left of an initial knot `t0`: the first function is the hinge
//! `(u - t0)_+` and the remaining `K - 1` are differences of divided
//! differences over knots `t_1..t_{K+1}` placed at equally spaced quantiles
//! of the projections exceeding `t0`. Beyond `t_{K+1}` every function is
//! affine.

use alloc::vec;
use alloc::vec::Vec;

use crate::dataset::Features;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::math;
use crate::model::{RidgeComponent, RidgeKind};

/// Support of the uniform prior on a ridge's initial knot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KnotBounds {
    pub lower: f64,
    pub upper: f64,
}

impl KnotBounds {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    /// Maps a unit-interval draw onto the bounds.
    pub fn at(&self, unit: f64) -> f64 {
        self.lower + unit * self.width()
    }
}

/// Upper bound at the `q` quantile of the projections and lower bound
/// stretched below the minimum by `1 / p0`.
pub fn knot_bounds(projections: &[f64], q: f64, p0: f64) -> Result<KnotBounds> {
    let mut sorted = projections.to_vec();
    math::sort_floats(&mut sorted);
    knot_bounds_sorted(&sorted, q, p0)
}

pub(crate) fn knot_bounds_sorted(sorted: &[f64], q: f64, p0: f64) -> Result<KnotBounds> {
    if sorted.len() < 2 {
        return Err(Error::DegenerateProjection);
    }
    let min = sorted[0];
    let upper = math::quantile_sorted(sorted, q);
    if !(upper > min) {
        return Err(Error::DegenerateProjection);
    }
    let lower = upper - (upper - min) / p0;
    Ok(KnotBounds { lower, upper })
}

/// Knots `t_1..t_{K+1}` at the `(l - 1) / K` quantiles of the projections
/// strictly above `t0`.
pub fn interior_knots(projections: &[f64], t0: f64, k: usize) -> Result<Vec<f64>> {
    let mut sorted = projections.to_vec();
    math::sort_floats(&mut sorted);
    interior_knots_sorted(&sorted, t0, k)
}

pub(crate) fn interior_knots_sorted(sorted: &[f64], t0: f64, k: usize) -> Result<Vec<f64>> {
    let start = sorted.partition_point(|&v| v <= t0);
    let above = &sorted[start..];
    if above.len() < k + 1 {
        return Err(Error::DegenerateKnots);
    }
    let knots: Vec<f64> = (0..=k).map(|l| math::quantile_sorted(above, l as f64 / k as f64)).collect();
    if k >= 1 && !(knots[k - 1] < knots[k]) {
        return Err(Error::DegenerateKnots);
    }
    Ok(knots)
}

/// Evaluates the `K = knots.len() - 1` basis functions at `u` into `out`.
pub fn eval_spline_basis_into(u: f64, t0: f64, knots: &[f64], out: &mut [f64]) {
    let k = knots.len() - 1;
    debug_assert_eq!(out.len(), k);
    if u <= t0 {
        out.iter_mut().for_each(|o| *o = 0.0);
        return;
    }
    out[0] = u - t0;
    if k == 1 {
        return;
    }
    let last = knots[k];
    let tail = cube_pos(u - last);
    let divided = |l: usize| (cube_pos(u - knots[l]) - tail) / (last - knots[l]);
    let d_k = divided(k - 1);
    for l in 1..k {
        out[l] = divided(l - 1) - d_k;
    }
}

pub fn eval_spline_basis(u: f64, t0: f64, knots: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; knots.len() - 1];
    eval_spline_basis_into(u, t0, knots, &mut out);
    out
}

#[inline]
fn cube_pos(x: f64) -> f64 {
    if x > 0.0 {
        x * x * x
    } else {
        0.0
    }
}

/// Indicator that a row falls in at least one of the listed dummy
/// categories: `1 - prod(1 - d)` over the selected raw dummy columns.
pub fn categorical_ridge_column(dummies_raw: &Matrix, slots: &[usize]) -> Vec<f64> {
    let n = dummies_raw.rows();
    let mut keep = vec![1.0; n];
    for &s in slots {
        for (k, d) in keep.iter_mut().zip(dummies_raw.col(s)) {
            *k *= 1.0 - d;
        }
    }
    keep.into_iter().map(|k| 1.0 - k).collect()
}

/// Spline basis of the projections `u`, one column per basis function.
pub fn spline_block(projections: &[f64], t0: f64, knots: &[f64]) -> Matrix {
    let n = projections.len();
    let k = knots.len() - 1;
    let mut block = Matrix::zeros(n, k);
    let mut row = vec![0.0; k];
    for (i, &u) in projections.iter().enumerate() {
        eval_spline_basis_into(u, t0, knots, &mut row);
        for (l, v) in row.iter().enumerate() {
            block[(i, l)] = *v;
        }
    }
    block
}

/// Basis block of one ridge evaluated on `features` using the ridge's
/// stored knots.
pub fn build_component_basis(features: &Features, component: &RidgeComponent) -> Result<Matrix> {
    match &component.kind {
        RidgeKind::Spline { t0, knots } => {
            if knots.len() < 2 {
                return Err(Error::DegenerateKnots);
            }
            let u = features.project(&component.direction);
            Ok(spline_block(&u, *t0, knots))
        }
        RidgeKind::Indicator => {
            let slots: Vec<usize> = component
                .features
                .iter()
                .map(|&j| features.dummy_slot[j].ok_or(Error::DimensionMismatch("indicator ridge on a real feature")))
                .collect::<Result<_>>()?;
            let col = categorical_ridge_column(&features.dummies_raw, &slots);
            Ok(Matrix::from_columns(col.len(), &[col]))
        }
    }
}

/// Design matrix `[1 | B_1 | ... | B_M]`.
pub fn build_design(features: &Features, components: &[RidgeComponent]) -> Result<Matrix> {
    let n = features.n();
    let mut design = Matrix::from_columns(n, &[vec![1.0; n]]);
    for c in components {
        design.push_columns(&build_component_basis(features, c)?);
    }
    Ok(design)
}
