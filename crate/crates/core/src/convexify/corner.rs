//! Rounding the convex corners of a region.

use crate::convexify::mollify::{mollify, KernelProfile};
use crate::cut::{region_boundary_curvature, CurvatureSummary};
use crate::error::{Error, Result};
use crate::geometry::{dilate, distance_transform, erode, signed_distance};
use crate::grid::{MetricGrid, Region, ScalarField};

/// Depth, in cells, a closing may add before a corner counts as reflex.
const REFLEX_DEPTH_CELLS: f64 = 1.5;

#[derive(Clone, Debug)]
pub struct CornerSmoothing {
    pub region: Region,
    /// The smoothed distance whose δ-sublevel (clipped to the input) is the
    /// result.
    pub field: ScalarField,
    pub curvature: Option<CurvatureSummary>,
    /// Smallest `κ − φ_target` over the sampled boundary nodes.
    pub margin: Option<f64>,
}

/// Erodes `region` by δ, takes the δ-sublevel of the ε-smoothed distance to
/// the eroded set and clips it to `region`. Corners of the input must be
/// convex: a closing of radius `max(δ, 6h)` may not add anything deeper than
/// `1.5h`.
pub fn corner_smooth(
    grid: &MetricGrid,
    region: &Region,
    delta: f64,
    eps: f64,
    phi_target: Option<&ScalarField>,
) -> Result<CornerSmoothing> {
    region.check(grid)?;
    let h = grid.h();
    if !(eps >= 2.0 * h) {
        return Err(Error::KernelUnderResolved);
    }
    if !(delta >= 2.0 * h) {
        return Err(Error::Precondition(format!("δ = {delta} is below 2h")));
    }
    if region.is_empty() {
        return Err(Error::Precondition("empty region".into()));
    }
    let r = delta.max(6.0 * h);
    let closed = erode(grid, &dilate(grid, region, r)?, r)?;
    let added = closed.difference(region);
    if !added.is_empty() {
        let d = distance_transform(grid, region)?;
        let worst = added.indices().filter_map(|k| d.get(k)).fold(0.0, f64::max);
        if worst > REFLEX_DEPTH_CELLS * h {
            return Err(Error::LemmaHypothesis(format!("reflex corner: closing adds cells {worst:.4} deep")));
        }
    }
    let inner = erode(grid, region, delta)?;
    if inner.is_empty() {
        return Err(Error::Precondition(format!("region is thinner than 2δ = {}", 2.0 * delta)));
    }
    let g = signed_distance(grid, &inner)?;
    let field = mollify(grid, &g, eps, KernelProfile::QuarticBump)?;
    let out = field.sublevel(delta).intersection(region);
    let curvature = region_boundary_curvature(grid, &out, h, None, phi_target).ok();
    let margin = match (&curvature, phi_target) {
        (Some(_), Some(_)) => {
            let samples = crate::cut::boundary_curvature_samples(grid, &out, h, None)?;
            samples.iter().map(|&(k, kap)| kap - phi_target.and_then(|p| p.get(k)).unwrap_or(0.0)).reduce(f64::min)
        }
        (Some(c), None) => Some(c.min),
        _ => None,
    };
    Ok(CornerSmoothing { region: out, field, curvature, margin })
}
