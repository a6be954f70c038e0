//! Schedule traces and verdicts.

use serde::{Deserialize, Serialize};

use crate::cut::{region_boundary_curvature, BoundaryCurve, CurvatureSummary, CutGraph};
use crate::error::Result;
use crate::geometry::distance_transform;
use crate::grid::{MetricGrid, Region, ScalarField};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictKind {
    Empties,
    Exhausts,
    Residual,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndClass {
    ConvexExhaustion,
    ConcaveExhaustion,
    MinimalFoliation,
}

/// One step of a schedule.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    pub eps: f64,
    pub energy: f64,
    pub perimeter: f64,
    pub cells: usize,
    /// Hausdorff motion of the boundary in grid cells.
    pub motion_cells: f64,
    /// Hausdorff motion of the boundary in metric units.
    pub motion: f64,
    /// Whether an erosion core was held fixed during this step.
    pub forced_core: bool,
}

#[derive(Clone, Debug, Default)]
pub struct BubbleTrace {
    /// `U_0, U_1, …`; nested downward for shrinking, upward for growing.
    pub regions: Vec<Region>,
    /// `φ_i` for each step after the first.
    pub phis: Vec<ScalarField>,
    pub steps: Vec<StepRecord>,
    /// Largest boundary motion over `ρ`.
    pub c_observed: f64,
}

impl BubbleTrace {
    pub fn energies(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.energy).collect()
    }

    pub fn last(&self) -> Option<&Region> {
        self.regions.last()
    }

    /// Checks the nesting direction exactly.
    pub fn is_nested(&self, downward: bool) -> bool {
        self.regions.windows(2).all(|w| if downward { w[1].is_subset(&w[0]) } else { w[0].is_subset(&w[1]) })
    }
}

/// One boundary curve of a residual, with its measured curvature.
#[derive(Clone, Debug)]
pub struct ResidualCurve {
    pub curve: BoundaryCurve,
    /// Curvature of the curve as the boundary of the domain minus the
    /// complement component behind it.
    pub curvature: Option<CurvatureSummary>,
}

impl ResidualCurve {
    pub fn max_abs_curvature(&self) -> Option<f64> {
        self.curvature.as_ref().map(|c| c.min.abs().max(c.max.abs()))
    }
}

#[derive(Clone, Debug)]
pub struct Residual {
    pub region: Region,
    pub curves: Vec<ResidualCurve>,
    pub curvature: Option<CurvatureSummary>,
    /// False when the schedule hit `max_steps` without stalling.
    pub converged: bool,
    /// Every curve has a measured `|κ| ≤ κ_tol`.
    pub curvature_ok: bool,
    /// For grown residuals: perimeter stayed below the seed's.
    pub volume_bound: Option<bool>,
}

#[derive(Clone, Debug)]
pub struct Verdict {
    pub kind: VerdictKind,
    pub residual: Option<Residual>,
    pub end_class: Option<EndClass>,
    pub note: Option<String>,
}

impl Verdict {
    pub fn new(kind: VerdictKind) -> Self {
        Verdict { kind, residual: None, end_class: None, note: None }
    }
}

/// Measures each boundary curve of `region` separately and pools the
/// summaries.
pub(crate) fn measure_residual(
    grid: &MetricGrid,
    graph: &CutGraph,
    region: &Region,
    kappa_tol: f64,
) -> Result<(Vec<ResidualCurve>, Option<CurvatureSummary>, bool)> {
    let band = grid.h();
    let dom = Region::domain(grid);
    let mut curves = Vec::new();
    for curve in crate::cut::boundary_curves(grid, graph, region)? {
        let side = dom.difference(&curve.outside);
        let curvature = region_boundary_curvature(grid, &side, band, None, None).ok();
        curves.push(ResidualCurve { curve, curvature });
    }
    let ok = curves.iter().all(|c| c.max_abs_curvature().is_some_and(|k| k <= kappa_tol));
    Ok((curves.clone(), pool(curves.iter().filter_map(|c| c.curvature.as_ref())), ok))
}

pub(crate) fn pool<'a>(parts: impl Iterator<Item = &'a CurvatureSummary>) -> Option<CurvatureSummary> {
    let mut out: Option<CurvatureSummary> = None;
    for p in parts {
        out = Some(match out {
            None => p.clone(),
            Some(o) => {
                let n = o.count + p.count;
                CurvatureSummary {
                    mean: (o.mean * o.count as f64 + p.mean * p.count as f64) / n as f64,
                    min: o.min.min(p.min),
                    max: o.max.max(p.max),
                    count: n,
                    phi_mean: None,
                }
            }
        });
    }
    out
}

/// Measures boundary motion between consecutive iterates, in cells and in
/// metric units.
pub(crate) struct MotionMeter<'g> {
    grid: &'g MetricGrid,
    unit: MetricGrid,
}

impl<'g> MotionMeter<'g> {
    pub fn new(grid: &'g MetricGrid) -> Result<Self> {
        let unit = MetricGrid::euclidean(grid.nx(), grid.ny(), 1.0, [0.0; 2], grid.topology())?
            .with_domain(grid.domain_mask().to_vec())?;
        Ok(MotionMeter { grid, unit })
    }

    /// `(cells, metric)` Hausdorff distance between the outlines of `a` and
    /// `b`; infinite if exactly one outline is empty.
    pub fn motion(&self, a: &Region, b: &Region) -> Result<(f64, f64)> {
        if a == b {
            return Ok((0.0, 0.0));
        }
        let oa = Region::from_indices(self.grid, a.outline(self.grid))?;
        let ob = Region::from_indices(self.grid, b.outline(self.grid))?;
        if oa.is_empty() || ob.is_empty() {
            let d = if oa.is_empty() && ob.is_empty() { 0.0 } else { f64::INFINITY };
            return Ok((d, d));
        }
        Ok((hausdorff(&self.unit, &oa, &ob)?, hausdorff(self.grid, &oa, &ob)?))
    }
}

fn hausdorff(grid: &MetricGrid, a: &Region, b: &Region) -> Result<f64> {
    let one_sided = |from: &Region, to: &Region| -> Result<f64> {
        let d = distance_transform(grid, from)?;
        Ok(to.indices().map(|k| d.get(k).unwrap_or(f64::INFINITY)).fold(0.0, f64::max))
    };
    Ok(one_sided(a, b)?.max(one_sided(b, a)?))
}
