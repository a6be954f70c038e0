//! Search for closed, nearly geodesic curves in a domain.

use serde::{Deserialize, Serialize};

use crate::bubble::schedule::BubbleSchedule;
use crate::bubble::shrink::shrink_bubbles_on;
use crate::bubble::trace::VerdictKind;
use crate::cut::{build_cut_graph, CutGraph};
use crate::error::Result;
use crate::grid::{MetricGrid, Region, ScalarField};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectedCurve {
    pub length: f64,
    pub max_abs_curvature: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectorReport {
    /// Closed curves with `|κ| ≤ κ_tol / 2`.
    pub curves: Vec<DetectedCurve>,
    pub kappa_tol: f64,
    pub shrink_verdict: VerdictKind,
}

/// Shrinks the whole domain with φ ≡ 0 and keeps the closed boundary curves
/// of the residual, if any, whose curvature stays within `κ_tol / 2`.
pub fn detect_minimal_curves(grid: &MetricGrid, domain: &Region, schedule: &BubbleSchedule) -> Result<DetectorReport> {
    let sub = grid.with_domain(domain.mask().to_vec())?;
    let graph = build_cut_graph(&sub)?;
    detect_on(&sub, &graph, schedule)
}

pub(crate) fn detect_on(grid: &MetricGrid, graph: &CutGraph, schedule: &BubbleSchedule) -> Result<DetectorReport> {
    let kappa_tol = schedule.kappa_tol(0.0);
    let zero = ScalarField::constant(grid, 0.0);
    let (_, verdict) = shrink_bubbles_on(grid, graph, &Region::domain(grid), &zero, schedule)?;
    let mut curves = Vec::new();
    if let Some(res) = &verdict.residual {
        for c in &res.curves {
            match c.max_abs_curvature() {
                Some(k) if c.curve.closed && k <= 0.5 * kappa_tol => {
                    curves.push(DetectedCurve { length: c.curve.length, max_abs_curvature: k })
                }
                _ => {}
            }
        }
    }
    Ok(DetectorReport { curves, kappa_tol, shrink_verdict: verdict.kind })
}
