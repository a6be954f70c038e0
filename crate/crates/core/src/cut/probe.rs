//! Curvature of a region's boundary and its decomposition into curves.

use serde::{Deserialize, Serialize};

use rayon::prelude::*;

use crate::convexify::mollify::{kernel_weights, KernelProfile};
use crate::cut::graph::CutGraph;
use crate::cut::problem::CutSolution;
use crate::error::{Error, Result};
use crate::geometry::{curvature_at, signed_distance};
use crate::grid::{MetricGrid, Region, ScalarField, Step, N4};

/// Target pointwise noise of the probe, in 1/length.
pub const PROBE_NOISE: f64 = 0.05;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureSummary {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    pub count: usize,
    /// Mean of a reference prescription over the same sample nodes.
    pub phi_mean: Option<f64>,
}

/// Default smoothing radius of the probe. Curvature read off a pixel mask
/// carries noise of roughly `20·h²/s³` at smoothing radius `s`; the radius
/// is chosen so this stays near [`PROBE_NOISE`], and never below `4h`.
/// `h` is the median metric cell size.
pub fn default_probe_smoothing(grid: &MetricGrid) -> f64 {
    let mut sizes: Vec<f64> = (0..grid.len()).filter(|&k| grid.in_domain(k)).map(|k| grid.sqrt_det(k).sqrt()).collect();
    let scale = if sizes.is_empty() {
        1.0
    } else {
        let mid = sizes.len() / 2;
        *sizes.select_nth_unstable_by(mid, f64::total_cmp).1
    };
    let h = grid.h() * scale;
    (4.0 * h).max((20.0 * h * h / PROBE_NOISE).cbrt())
}

/// Boundary curvature of a cut solution. See [`region_boundary_curvature`].
pub fn bubble_boundary_curvature(grid: &MetricGrid, solution: &CutSolution, band: f64) -> Result<CurvatureSummary> {
    region_boundary_curvature(grid, &solution.region, band, None, None)
}

/// Curvature of the interface between `region` and its in-domain complement,
/// read off the level curves of the smoothed signed distance at nodes within
/// `band` of the interface. Positive for convex regions. `smoothing`
/// defaults to [`default_probe_smoothing`].
pub fn region_boundary_curvature(
    grid: &MetricGrid,
    region: &Region,
    band: f64,
    smoothing: Option<f64>,
    phi: Option<&ScalarField>,
) -> Result<CurvatureSummary> {
    let samples = boundary_curvature_samples(grid, region, band, smoothing)?;
    let vals: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let phis: Vec<f64> = samples.iter().filter_map(|s| phi.and_then(|p| p.get(s.0))).collect();
    let n = vals.len() as f64;
    Ok(CurvatureSummary {
        mean: vals.iter().sum::<f64>() / n,
        min: vals.iter().copied().fold(f64::INFINITY, f64::min),
        max: vals.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        count: vals.len(),
        phi_mean: (!phis.is_empty()).then(|| phis.iter().sum::<f64>() / phis.len() as f64),
    })
}

/// `(node, curvature)` pairs behind [`region_boundary_curvature`].
pub fn boundary_curvature_samples(
    grid: &MetricGrid,
    region: &Region,
    band: f64,
    smoothing: Option<f64>,
) -> Result<Vec<(usize, f64)>> {
    region.check(grid)?;
    if region.boundary_cells(grid).len() < 8 {
        return Err(Error::BoundaryTooSmall);
    }
    let sd = signed_distance(grid, region)?;
    let eps = smoothing.unwrap_or_else(|| default_probe_smoothing(grid));
    if !(eps >= 2.0 * grid.h()) {
        return Err(Error::KernelUnderResolved);
    }
    let band = band.max(grid.h());
    let sample: Vec<usize> = (0..grid.len()).filter(|&k| sd.get(k).is_some_and(|d| d.abs() <= band)).collect();
    // Only the 3×3 blocks around sample nodes need smoothing.
    let mut need = vec![false; grid.len()];
    for &k in &sample {
        for dj in -1..=1 {
            for di in -1..=1 {
                if let Some(q) = grid.offset(k, di, dj) {
                    need[q] = true;
                }
            }
        }
    }
    let vals: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            if !need[k] || !sd.is_defined(k) {
                return f64::NAN;
            }
            kernel_weights(grid, &sd, k, eps, KernelProfile::QuarticBump).iter().map(|&(y, w)| w * sd.at(y)).sum()
        })
        .collect();
    let smooth = ScalarField::new(grid, vals)?;
    // The smoothed distance has |∇| close to 1 away from medial ridges.
    let out: Vec<(usize, f64)> = sample.iter().filter_map(|&k| curvature_at(grid, &smooth, k, 0.05).ok().map(|c| (k, c))).collect();
    if out.len() < 8 {
        return Err(Error::BoundaryTooSmall);
    }
    Ok(out)
}

/// One connected piece of a region's boundary.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryCurve {
    /// Region cells adjacent to this piece of the complement.
    pub cells: Region,
    /// Complement component the curve separates the region from.
    pub outside: Region,
    pub length: f64,
    /// False when the curve runs into the manifold edge.
    pub closed: bool,
}

/// Splits the interior interface of a region by complement component. Each
/// complement component contributes one curve.
pub fn boundary_curves(grid: &MetricGrid, graph: &CutGraph, region: &Region) -> Result<Vec<BoundaryCurve>> {
    region.check(grid)?;
    let mut out = Vec::new();
    for comp in region.complement(grid).components(grid) {
        let length = graph.shared_length(region, &comp);
        if length <= 0.0 {
            continue;
        }
        let mut cells = Region::empty(grid);
        let mut closed = true;
        for k in region.indices() {
            let mut adj = false;
            let mut edge = false;
            for &(di, dj) in &N4 {
                match grid.step(k, di, dj) {
                    Step::Node(q) if comp.contains(q) => adj = true,
                    Step::Exterior => edge = true,
                    _ => {}
                }
            }
            if adj {
                cells.set(k, true);
                closed &= !edge;
            }
        }
        out.push(BoundaryCurve { cells, outside: comp, length, closed });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cut::graph::build_cut_graph;
    use crate::grid::Topology;

    fn plane(n: usize, half: f64) -> MetricGrid {
        let h = 2.0 * half / (n - 1) as f64;
        MetricGrid::euclidean(n, n, h, [-half, -half], Topology::Plane).unwrap()
    }

    #[test]
    fn disk_curvature() {
        let g = plane(129, 1.0);
        let disk = Region::from_fn(&g, |[x, y]| x * x + y * y <= 0.25);
        let s = region_boundary_curvature(&g, &disk, g.h(), None, None).unwrap();
        assert!((s.mean - 2.0).abs() < 0.05 && s.min > 1.7 && s.max < 2.3, "{s:?}");
    }

    #[test]
    fn half_plane_curvature() {
        let g = plane(65, 1.0);
        let r = Region::from_fn(&g, |[x, _]| x < 0.01);
        let s = region_boundary_curvature(&g, &r, g.h(), None, None).unwrap();
        assert!(s.min.abs() < 1e-6 && s.max.abs() < 1e-6, "{s:?}");
    }

    #[test]
    fn tiny_boundary_rejected() {
        let g = plane(33, 1.0);
        let r = Region::from_indices(&g, [g.index(16, 16)]).unwrap();
        assert_eq!(region_boundary_curvature(&g, &r, g.h(), None, None).unwrap_err(), Error::BoundaryTooSmall);
    }

    #[test]
    fn annulus_has_two_curves() {
        let g = plane(65, 1.0);
        let cg = build_cut_graph(&g).unwrap();
        let ann = Region::from_fn(&g, |[x, y]| (0.09..=0.49).contains(&(x * x + y * y)));
        let curves = boundary_curves(&g, &cg, &ann).unwrap();
        assert_eq!(curves.len(), 2);
        assert!(curves.iter().all(|c| c.closed));
        let mut l: Vec<f64> = curves.iter().map(|c| c.length).collect();
        l.sort_by(f64::total_cmp);
        assert!((l[0] - 2.0 * std::f64::consts::PI * 0.3).abs() < 0.15 * l[0]);
        assert!((l[1] - 2.0 * std::f64::consts::PI * 0.7).abs() < 0.05 * l[1]);
    }
}
