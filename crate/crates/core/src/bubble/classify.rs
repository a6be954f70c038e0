//! Classification of a single end by convex, concave and minimal sweeps.

use serde::{Deserialize, Serialize};

use crate::bubble::grow::grow_bubbles_on;
use crate::bubble::schedule::BubbleSchedule;
use crate::bubble::trace::{EndClass, Verdict, VerdictKind};
use crate::cut::{build_cut_graph, minimize_phi_area, region_boundary_curvature, CutGraph, CutProblem, MinimizerChoice};
use crate::error::{Error, Result};
use crate::geometry::distance_transform;
use crate::grid::{MetricGrid, Region, ScalarField};

const MAX_STAGES: usize = 32;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EndTests {
    pub convex: bool,
    pub concave: bool,
    pub foliation: bool,
    pub stages: usize,
}

#[derive(Clone, Debug)]
pub struct EndClassification {
    pub verdict: Verdict,
    pub tests: EndTests,
}

/// Sweeps the domain towards `end_band` three ways and reports the first
/// sweep (convex, then concave, then minimal) that reaches the end.
///
/// With `d` the distance to the end band, the cores `B_j = {d ≥ s_j}` grow
/// from the far side of the domain to within `ρ` of the end. The convex
/// sweep holds each core, charges `κ_tol` per unit area elsewhere and
/// requires the resulting minimizer to have strictly positive boundary
/// curvature of mean at least `κ_tol`. The concave sweep is a growing
/// schedule from the first core, which must exhaust everything but the end
/// band. The minimal sweep requires the φ = 0 minimizer around each core to
/// have `|κ| ≤ κ_tol`.
pub fn classify_end(grid: &MetricGrid, domain: &Region, end_band: &Region, schedule: &BubbleSchedule) -> Result<EndClassification> {
    domain.check(grid)?;
    end_band.check(grid)?;
    if end_band.is_empty() || !end_band.is_subset(domain) {
        return Err(Error::Precondition("end band must be a non-empty part of the domain".into()));
    }
    let sub = grid.with_domain(domain.mask().to_vec())?;
    if end_band.components(&sub).len() != 1 {
        return Err(Error::NotSingleEnd);
    }
    schedule.validate(&sub, 0.0)?;
    let rho = schedule.rho;
    let kappa_tol = schedule.kappa_tol(0.0);
    let graph = build_cut_graph(&sub)?;
    let d = distance_transform(&sub, end_band)?;
    let max_d = d.range().map_or(0.0, |r| r.1);
    if max_d < 2.0 * rho {
        return Err(Error::Precondition(format!("domain depth {max_d} is below 2ρ")));
    }
    let n = (((max_d - 2.0 * rho) / (0.5 * rho)).floor() as usize + 1).clamp(1, MAX_STAGES);
    let levels: Vec<f64> = (0..n)
        .map(|j| if n == 1 { rho } else { (max_d - rho) - j as f64 * (max_d - 2.0 * rho) / (n - 1) as f64 })
        .collect();
    let core = |s: f64| sub_region(&sub, &d, |v| v >= s);
    let near_end = end_band.union(&sub_region(&sub, &d, |v| v <= 0.5 * rho));

    let convex = levels.iter().all(|&s| convex_stage(&sub, &graph, &core(s), &near_end, schedule, kappa_tol).unwrap_or(false));
    let x = Region::domain(&sub).difference(end_band);
    let seed = core(max_d - rho);
    let zero = ScalarField::constant(&sub, 0.0);
    let concave = matches!(grow_bubbles_on(&sub, &graph, &x, &seed, &zero, schedule), Ok((_, v)) if v.kind == VerdictKind::Exhausts);
    let foliation = levels.iter().all(|&s| minimal_stage(&sub, &graph, &core(s), end_band, kappa_tol).unwrap_or(false));

    let tests = EndTests { convex, concave, foliation, stages: n };
    let (kind, end_class) = if convex {
        (VerdictKind::Exhausts, Some(EndClass::ConvexExhaustion))
    } else if concave {
        (VerdictKind::Exhausts, Some(EndClass::ConcaveExhaustion))
    } else if foliation {
        (VerdictKind::Residual, Some(EndClass::MinimalFoliation))
    } else {
        (VerdictKind::Residual, None)
    };
    let note = if convex && concave {
        Some("both convex and concave exhaustions exist; the unstable min-max curve between them is not computed".into())
    } else if end_class == Some(EndClass::MinimalFoliation) {
        Some(format!("{n} minimal levels certified; a foliation is not distinguished from many disjoint geodesics"))
    } else if end_class.is_none() {
        Some("no sweep reached the end".into())
    } else {
        None
    };
    Ok(EndClassification { verdict: Verdict { kind, residual: None, end_class, note }, tests })
}

fn sub_region(grid: &MetricGrid, d: &ScalarField, pred: impl Fn(f64) -> bool) -> Region {
    Region::from_ij(grid, |i, j| d.get(grid.index(i, j)).is_some_and(&pred))
}

fn convex_stage(
    grid: &MetricGrid,
    graph: &CutGraph,
    core: &Region,
    near_end: &Region,
    schedule: &BubbleSchedule,
    kappa_tol: f64,
) -> Result<bool> {
    let big = schedule.phi_big(kappa_tol);
    let vals = (0..grid.len()).map(|k| if core.contains(k) { big } else { kappa_tol }).collect();
    let mut problem = CutProblem::new(graph, ScalarField::new(grid, vals)?);
    problem.must_include = core.clone();
    problem.must_exclude = near_end.difference(core);
    problem.choice = MinimizerChoice::Minimal;
    let sol = minimize_phi_area(&problem)?;
    let s = region_boundary_curvature(grid, &sol.region, grid.h(), None, None)?;
    Ok(s.min > 0.0 && s.mean >= kappa_tol)
}

fn minimal_stage(grid: &MetricGrid, graph: &CutGraph, core: &Region, end: &Region, kappa_tol: f64) -> Result<bool> {
    let mut problem = CutProblem::new(graph, ScalarField::constant(grid, 0.0));
    problem.must_include = core.clone();
    problem.must_exclude = end.difference(core);
    problem.choice = MinimizerChoice::Minimal;
    let sol = minimize_phi_area(&problem)?;
    let s = region_boundary_curvature(grid, &sol.region, grid.h(), None, None)?;
    Ok(s.min.abs().max(s.max.abs()) <= kappa_tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Topology;

    #[test]
    fn two_bands_rejected() {
        let g = MetricGrid::euclidean(20, 20, 0.1, [0.0; 2], Topology::Plane).unwrap();
        let end = Region::from_ij(&g, |_, j| j < 2 || j > 17);
        let e = classify_end(&g, &Region::domain(&g), &end, &BubbleSchedule::new(0.4)).unwrap_err();
        assert_eq!(e, Error::NotSingleEnd);
    }
}
