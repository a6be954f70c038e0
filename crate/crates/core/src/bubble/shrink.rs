//! Shrinking φ-bubbles inside a domain.

use crate::bubble::schedule::BubbleSchedule;
use crate::bubble::trace::{measure_residual, BubbleTrace, MotionMeter, Residual, StepRecord, Verdict, VerdictKind};
use crate::cut::{build_cut_graph, minimize_phi_area, CutGraph, CutProblem, MinimizerChoice};
use crate::error::{Error, Result};
use crate::geometry::signed_distance_to_outline;
use crate::grid::{MetricGrid, Region, ScalarField};

/// Nodes within this relative depth of the deepest one form the innermost
/// core.
const CORE_REL_TOL: f64 = 1e-9;

/// Runs the shrinking schedule from `v`. Each iterate is the minimal
/// minimizer of the `φ_i`-energy inside the previous one, with the part
/// deeper than `ρ` held fixed so the boundary moves at most one band per
/// step. Once the region is thinner than `2ρ`, its innermost erosion level
/// is held instead until the boundary stalls; if the stalled boundary is not
/// nearly geodesic the core is released for good.
pub fn shrink_bubbles(
    grid: &MetricGrid,
    v: &Region,
    phi: &ScalarField,
    schedule: &BubbleSchedule,
) -> Result<(BubbleTrace, Verdict)> {
    let graph = build_cut_graph(grid)?;
    shrink_bubbles_on(grid, &graph, v, phi, schedule)
}

/// [`shrink_bubbles`] with a prebuilt cut graph.
pub fn shrink_bubbles_on(
    grid: &MetricGrid,
    graph: &CutGraph,
    v: &Region,
    phi: &ScalarField,
    schedule: &BubbleSchedule,
) -> Result<(BubbleTrace, Verdict)> {
    v.check(grid)?;
    phi.check(grid)?;
    let mut phi_max: f64 = 0.0;
    for k in v.indices() {
        match phi.get(k) {
            Some(p) if p >= 0.0 => phi_max = phi_max.max(p),
            Some(p) => return Err(Error::Precondition(format!("φ = {p} < 0 at node {k}"))),
            None => return Err(Error::Precondition(format!("φ undefined at node {k}"))),
        }
    }
    schedule.validate(grid, phi_max)?;
    let rho = schedule.rho;
    let phi_big = schedule.phi_big(phi_max);
    let kappa_tol = schedule.kappa_tol(phi_max);
    let meter = MotionMeter::new(grid)?;
    let dom = Region::domain(grid);

    let mut trace = BubbleTrace { regions: vec![v.clone()], ..Default::default() };
    if v.is_empty() {
        return Ok((trace, Verdict::new(VerdictKind::Empties)));
    }
    let mut u = v.clone();
    let mut allow_core = true;
    let mut stalled = 0;
    let mut last_core = false;
    for step in 1..=schedule.max_steps {
        let eps = schedule.eps(step);
        let sd = match signed_distance_to_outline(grid, &u) {
            Ok(sd) => Some(sd),
            Err(Error::NoBoundary) => None,
            Err(e) => return Err(e),
        };
        let depth = |k: usize| sd.as_ref().map_or(f64::INFINITY, |s| -s.at(k));
        let mut vals = vec![f64::NAN; grid.len()];
        let mut deep = Region::empty(grid);
        for k in u.indices() {
            if depth(k) >= rho {
                deep.set(k, true);
                vals[k] = phi_big;
            } else {
                vals[k] = phi.at(k) + eps;
            }
        }
        let phi_i = ScalarField::with_mask(grid, vals, u.mask().to_vec())?;
        let mut problem = CutProblem::new(graph, phi_i.clone());
        problem.must_exclude = dom.difference(&u);
        problem.choice = MinimizerChoice::Minimal;
        let mut forced = false;
        if deep.is_empty() && allow_core {
            if let Some(core) = innermost_core(&u, &depth) {
                deep = core;
                forced = true;
            }
        }
        problem.must_include = deep;
        let sol = minimize_phi_area(&problem)?;
        let (cells, motion) = meter.motion(&u, &sol.region)?;
        if motion.is_finite() {
            trace.c_observed = trace.c_observed.max(motion / rho);
        }
        trace.steps.push(StepRecord {
            step,
            eps,
            energy: sol.energy,
            perimeter: sol.perimeter,
            cells: sol.region.count(),
            motion_cells: cells,
            motion,
            forced_core: forced,
        });
        trace.phis.push(phi_i);
        trace.regions.push(sol.region.clone());
        u = sol.region;
        last_core = forced;
        if u.is_empty() {
            return Ok((trace, Verdict::new(VerdictKind::Empties)));
        }
        stalled = if cells < schedule.stall_tolerance { stalled + 1 } else { 0 };
        if stalled >= 2 {
            let (curves, curvature, ok) = measure_residual(grid, graph, &u, kappa_tol)?;
            if ok {
                let residual = Residual { region: u, curves, curvature, converged: true, curvature_ok: true, volume_bound: None };
                return Ok((trace, residual_verdict(residual)));
            }
            if forced {
                allow_core = false;
                stalled = 0;
            }
        }
    }
    let (curves, curvature, ok) = measure_residual(grid, graph, &u, kappa_tol)?;
    let residual = Residual { region: u, curves, curvature, converged: false, curvature_ok: ok, volume_bound: None };
    let mut verdict = residual_verdict(residual);
    if last_core {
        verdict.note = Some("stopped while holding an erosion core".into());
    }
    Ok((trace, verdict))
}

fn residual_verdict(residual: Residual) -> Verdict {
    Verdict { kind: VerdictKind::Residual, residual: Some(residual), end_class: None, note: None }
}

/// The deepest nodes of `u`: its innermost non-empty erosion level.
fn innermost_core(u: &Region, depth: &dyn Fn(usize) -> f64) -> Option<Region> {
    let max_depth = u.indices().map(depth).fold(0.0, f64::max);
    if !(max_depth > 0.0) || !max_depth.is_finite() {
        return None;
    }
    let cut = max_depth * (1.0 - CORE_REL_TOL);
    let mut core = u.clone();
    for k in u.indices() {
        if depth(k) < cut {
            core.set(k, false);
        }
    }
    Some(core)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Topology;

    fn plane(n: usize, half: f64) -> MetricGrid {
        let h = 2.0 * half / (n - 1) as f64;
        MetricGrid::euclidean(n, n, h, [-half, -half], Topology::Plane).unwrap()
    }

    #[test]
    fn empty_start_empties_immediately() {
        let g = plane(17, 1.0);
        let (trace, v) = shrink_bubbles(&g, &Region::empty(&g), &ScalarField::constant(&g, 0.1), &BubbleSchedule::new(0.4)).unwrap();
        assert_eq!(v.kind, VerdictKind::Empties);
        assert!(trace.steps.is_empty());
    }

    #[test]
    fn disk_empties_and_stays_nested() {
        let g = plane(65, 1.05);
        let disk = Region::from_fn(&g, |[x, y]| x * x + y * y <= 1.0);
        let (trace, v) = shrink_bubbles(&g, &disk, &ScalarField::constant(&g, 0.1), &BubbleSchedule::new(0.1)).unwrap();
        assert_eq!(v.kind, VerdictKind::Empties);
        assert!(trace.is_nested(true));
        // Only a held core may repeat, until it stalls and is released.
        for (w, s) in trace.regions.windows(2).zip(&trace.steps) {
            assert!(w[1] != w[0] || s.forced_core, "step {} repeated without a core", s.step);
        }
        assert!(trace.c_observed <= 3.0, "{}", trace.c_observed);
    }

    #[test]
    fn negative_phi_rejected() {
        let g = plane(17, 1.0);
        let r = Region::domain(&g);
        let e = shrink_bubbles(&g, &r, &ScalarField::constant(&g, -0.1), &BubbleSchedule::new(0.4)).unwrap_err();
        assert!(matches!(e, Error::Precondition(_)));
    }

    #[test]
    fn bad_schedule_rejected() {
        let g = plane(17, 1.0);
        let r = Region::domain(&g);
        let e = shrink_bubbles(&g, &r, &ScalarField::constant(&g, 0.1), &BubbleSchedule::new(g.h())).unwrap_err();
        assert!(matches!(e, Error::BadSchedule(_)));
    }
}
