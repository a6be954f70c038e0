//! Growing concave bubbles from a seed.

use crate::bubble::schedule::BubbleSchedule;
use crate::bubble::trace::{measure_residual, BubbleTrace, MotionMeter, Residual, StepRecord, Verdict, VerdictKind};
use crate::cut::{build_cut_graph, minimize_phi_area, CutGraph, CutProblem, MinimizerChoice};
use crate::error::{Error, Result};
use crate::geometry::distance_transform;
use crate::grid::{MetricGrid, Region, ScalarField};

/// Relative slack of the perimeter bound on grown residuals.
const VOLUME_SLACK: f64 = 0.03;

/// Runs the growing schedule inside `x` from `seed`. Each iterate is the
/// maximal minimizer of `Per(U) + Σ_U φ_i·dA` over `U ⊇ U_{i−1}`, where
/// `φ_i = φ_target + ε_i` up to distance `ρ/2` from `U_{i−1}`, rises
/// linearly to `Φ_big` at `2ρ/3` and forbids anything further out.
pub fn grow_bubbles(
    grid: &MetricGrid,
    x: &Region,
    seed: &Region,
    phi_target: &ScalarField,
    schedule: &BubbleSchedule,
) -> Result<(BubbleTrace, Verdict)> {
    let graph = build_cut_graph(grid)?;
    grow_bubbles_on(grid, &graph, x, seed, phi_target, schedule)
}

/// [`grow_bubbles`] with a prebuilt cut graph.
pub fn grow_bubbles_on(
    grid: &MetricGrid,
    graph: &CutGraph,
    x: &Region,
    seed: &Region,
    phi_target: &ScalarField,
    schedule: &BubbleSchedule,
) -> Result<(BubbleTrace, Verdict)> {
    x.check(grid)?;
    seed.check(grid)?;
    phi_target.check(grid)?;
    if seed.is_empty() {
        return Err(Error::NoSeed);
    }
    if !seed.is_subset(x) {
        return Err(Error::Precondition("seed is not contained in X".into()));
    }
    let mut phi_max: f64 = 0.0;
    for k in x.indices() {
        match phi_target.get(k) {
            Some(p) if p >= 0.0 => phi_max = phi_max.max(p),
            _ => return Err(Error::Precondition(format!("φ_target must be defined and non-negative at node {k}"))),
        }
    }
    schedule.validate(grid, phi_max)?;
    let rho = schedule.rho;
    let phi_big = schedule.phi_big(phi_max);
    let kappa_tol = schedule.kappa_tol(phi_max);
    let meter = MotionMeter::new(grid)?;
    let dom = Region::domain(grid);
    let seed_perimeter = graph.interface_length(seed);

    let mut trace = BubbleTrace { regions: vec![seed.clone()], ..Default::default() };
    if x.is_subset(seed) {
        return Ok((trace, Verdict::new(VerdictKind::Exhausts)));
    }
    let mut u = seed.clone();
    let mut stalled = 0;
    let mut converged = false;
    for step in 1..=schedule.max_steps {
        let eps = schedule.eps(step);
        let d = distance_transform(grid, &u)?;
        let mut vals = vec![f64::NAN; grid.len()];
        let mut defined = vec![false; grid.len()];
        let mut reach = Region::empty(grid);
        for k in x.indices() {
            let Some(dk) = d.get(k) else { continue };
            let base = phi_target.at(k) + eps;
            let p = if dk <= 0.5 * rho {
                base
            } else if dk <= 2.0 * rho / 3.0 {
                let s = (dk - 0.5 * rho) / (rho / 6.0);
                base + s * (phi_big - base)
            } else {
                continue;
            };
            reach.set(k, true);
            vals[k] = -p;
            defined[k] = true;
        }
        let phi_i = ScalarField::with_mask(grid, vals, defined)?;
        let mut problem = CutProblem::new(graph, phi_i.clone());
        problem.must_include = u.clone();
        problem.must_exclude = dom.difference(&reach);
        problem.choice = MinimizerChoice::Maximal;
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
            forced_core: false,
        });
        trace.phis.push(phi_i.map(|p| -p));
        trace.regions.push(sol.region.clone());
        u = sol.region;
        if x.is_subset(&u) {
            return Ok((trace, Verdict::new(VerdictKind::Exhausts)));
        }
        stalled = if cells < schedule.stall_tolerance { stalled + 1 } else { 0 };
        if stalled >= 2 {
            converged = true;
            break;
        }
    }
    let (curves, curvature, ok) = measure_residual(grid, graph, &u, kappa_tol)?;
    let perimeter = graph.interface_length(&u);
    let volume_bound = perimeter < seed_perimeter * (1.0 + VOLUME_SLACK);
    let residual = Residual { region: u, curves, curvature, converged, curvature_ok: ok, volume_bound: Some(volume_bound) };
    Ok((trace, Verdict { kind: VerdictKind::Residual, residual: Some(residual), end_class: None, note: None }))
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
    fn seed_covering_x_exhausts_at_once() {
        let g = plane(17, 1.0);
        let x = Region::from_fn(&g, |[x, _]| x < 0.0);
        let (trace, v) = grow_bubbles(&g, &x, &x, &ScalarField::constant(&g, 0.0), &BubbleSchedule::new(0.4)).unwrap();
        assert_eq!(v.kind, VerdictKind::Exhausts);
        assert!(trace.steps.is_empty());
    }

    #[test]
    fn empty_seed_rejected() {
        let g = plane(17, 1.0);
        let e = grow_bubbles(&g, &Region::domain(&g), &Region::empty(&g), &ScalarField::constant(&g, 0.0), &BubbleSchedule::new(0.4));
        assert_eq!(e.unwrap_err(), Error::NoSeed);
    }

    #[test]
    fn flat_disk_seed_does_not_grow() {
        let g = plane(41, 1.0);
        let seed = Region::from_fn(&g, |[x, y]| x * x + y * y <= 0.09);
        let (trace, v) = grow_bubbles(&g, &Region::domain(&g), &seed, &ScalarField::constant(&g, 0.0), &BubbleSchedule::new(0.2)).unwrap();
        assert_eq!(v.kind, VerdictKind::Residual);
        assert!(trace.is_nested(false));
        assert_eq!(trace.last(), Some(&seed));
        let r = v.residual.unwrap();
        assert!(!r.curvature_ok);
        assert_eq!(r.volume_bound, Some(true));
    }
}
