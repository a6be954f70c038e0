//! Equidistant sublevels: erosion, dilation and the ρ-accessible part.

use crate::error::{Error, Result};
use crate::geometry::distance::{signed_distance, signed_distance_to_outline};
use crate::grid::{MetricGrid, Region};

/// `{d_U ≤ −ρ}`, where the manifold edge counts as part of ∂U.
pub fn erode(grid: &MetricGrid, region: &Region, rho: f64) -> Result<Region> {
    region.check(grid)?;
    if region.is_empty() {
        return Ok(region.clone());
    }
    let sd = match signed_distance_to_outline(grid, region) {
        Ok(sd) => sd,
        Err(Error::NoBoundary) => return Ok(region.clone()),
        Err(e) => return Err(e),
    };
    let mut out = Region::empty(grid);
    for k in region.indices() {
        if sd.get(k).is_some_and(|v| v <= -rho) {
            out.set(k, true);
        }
    }
    Ok(out)
}

/// `U ∪ {0 < d_U ≤ ρ}`.
pub fn dilate(grid: &MetricGrid, region: &Region, rho: f64) -> Result<Region> {
    region.check(grid)?;
    if region.is_empty() || region.is_full(grid) {
        return Ok(region.clone());
    }
    let sd = signed_distance(grid, region)?;
    let mut out = region.clone();
    for k in 0..grid.len() {
        if !region.contains(k) && sd.get(k).is_some_and(|v| v <= rho) {
            out.set(k, true);
        }
    }
    Ok(out)
}

/// The morphological opening, clipped to the region so that the inclusion
/// `accessible_set(U, ρ) ⊆ U` is exact.
pub fn accessible_set(grid: &MetricGrid, region: &Region, rho: f64) -> Result<Region> {
    let core = erode(grid, region, rho)?;
    Ok(dilate(grid, &core, rho)?.intersection(region))
}
