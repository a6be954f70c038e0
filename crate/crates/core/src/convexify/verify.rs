//! Certification of strict mean-curvature convexity.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::convexify::mollify::{mollify, KernelProfile};
use crate::error::{Error, Result};
use crate::geometry::{critical_points, curvature_at, CriticalPoint};
use crate::grid::{MetricGrid, Region, ScalarField};

/// Violating nodes listed in a report at most.
pub const MAX_VIOLATORS: usize = 100;
const HISTOGRAM_BINS: usize = 16;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violator {
    pub node: usize,
    pub position: [f64; 2],
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    /// `bins + 1` increasing edges.
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexityReport {
    /// Domain nodes where the level curvature was sampled.
    pub sampled: usize,
    pub domain_nodes: usize,
    pub sampled_fraction: f64,
    pub grad_floor: f64,
    /// Smallest `κ − φ_target` over sampled nodes.
    pub min_margin: f64,
    pub mean_margin: f64,
    pub histogram: Histogram,
    pub violations: usize,
    /// The worst violators, most negative margin first.
    pub violators: Vec<Violator>,
    pub critical_points: Vec<CriticalPoint>,
    /// `min_margin > 0` and every critical point is a minimum.
    pub pass: bool,
}

/// Level-curve curvature minus `φ_target` at every domain node where `|∇f|_g
/// ≥ grad_floor` and the stencil is complete.
pub fn margins(grid: &MetricGrid, f: &ScalarField, phi_target: &ScalarField, grad_floor: f64) -> Result<Vec<(usize, f64)>> {
    f.check(grid)?;
    phi_target.check(grid)?;
    Ok((0..grid.len())
        .into_par_iter()
        .filter_map(|k| {
            if !grid.in_domain(k) {
                return None;
            }
            let c = curvature_at(grid, f, k, grad_floor).ok()?;
            Some((k, c - phi_target.get(k).unwrap_or(0.0)))
        })
        .collect())
}

pub fn verify_mean_convex(grid: &MetricGrid, f: &ScalarField, phi_target: &ScalarField, grad_floor: f64) -> Result<ConvexityReport> {
    let m = margins(grid, f, phi_target, grad_floor)?;
    let critical_points = match critical_points(grid, f) {
        Ok(c) => c,
        Err(Error::DegenerateField) => Vec::new(),
        Err(e) => return Err(e),
    };
    let domain_nodes = grid.domain_count();
    let vals: Vec<f64> = m.iter().map(|e| e.1).collect();
    let min_margin = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let max_margin = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mean_margin = if vals.is_empty() { f64::NAN } else { vals.iter().sum::<f64>() / vals.len() as f64 };
    let mut bad: Vec<Violator> = m
        .iter()
        .filter(|e| !(e.1 > 0.0))
        .map(|&(node, margin)| Violator { node, position: grid.coords(node), margin })
        .collect();
    let violations = bad.len();
    bad.sort_by(|a, b| a.margin.total_cmp(&b.margin).then(a.node.cmp(&b.node)));
    bad.truncate(MAX_VIOLATORS);
    let pass = !vals.is_empty() && min_margin > 0.0 && critical_points.iter().all(|c| c.index == 0);
    Ok(ConvexityReport {
        sampled: vals.len(),
        domain_nodes,
        sampled_fraction: vals.len() as f64 / domain_nodes.max(1) as f64,
        grad_floor,
        min_margin,
        mean_margin,
        histogram: histogram(&vals, min_margin, max_margin),
        violations,
        violators: bad,
        critical_points,
        pass,
    })
}

fn histogram(vals: &[f64], lo: f64, hi: f64) -> Histogram {
    if vals.is_empty() {
        return Histogram { edges: Vec::new(), counts: Vec::new() };
    }
    let width = if hi > lo { (hi - lo) / HISTOGRAM_BINS as f64 } else { 1.0 };
    let edges = (0..=HISTOGRAM_BINS).map(|b| lo + b as f64 * width).collect();
    let mut counts = vec![0; HISTOGRAM_BINS];
    for &v in vals {
        let b = (((v - lo) / width) as usize).min(HISTOGRAM_BINS - 1);
        counts[b] += 1;
    }
    Histogram { edges, counts }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarginLawReport {
    /// Minimum margin of the unsmoothed function on the sub-domain.
    pub base_margin: f64,
    /// `(ε, margin of f_ε)` in sweep order.
    pub sweep: Vec<(f64, f64)>,
    /// Smallest `C ≥ 0` with `margin(ε) ≥ m − C·ε` over the sweep.
    pub fitted_c: f64,
    /// The margin loss `max(0, m − margin(ε))` never shrinks by more than
    /// the tolerance as ε grows.
    pub monotone: bool,
    /// Every smoothed margin stays positive.
    pub no_collapse: bool,
    pub pass: bool,
}

/// Relative slack allowed when checking that the margin loss grows
/// monotonically.
pub const MONOTONE_SLACK: f64 = 0.02;

/// Sweeps the smoothing radius and fits the linear degradation constant of
/// the minimum margin over the nodes of `sub`. `eps` must be increasing.
pub fn margin_law(
    grid: &MetricGrid,
    f: &ScalarField,
    phi_target: &ScalarField,
    sub: &Region,
    eps: &[f64],
    grad_floor: f64,
) -> Result<MarginLawReport> {
    sub.check(grid)?;
    if eps.is_empty() || !eps.windows(2).all(|w| w[0] < w[1]) || !(eps[0] > 0.0) {
        return Err(Error::Precondition("smoothing radii must be positive and increasing".into()));
    }
    let min_on = |g: &ScalarField| -> Result<f64> {
        Ok(margins(grid, g, phi_target, grad_floor)?
            .into_iter()
            .filter(|e| sub.contains(e.0))
            .map(|e| e.1)
            .fold(f64::INFINITY, f64::min))
    };
    let m = min_on(f)?;
    if !m.is_finite() {
        return Err(Error::Precondition("no sampled node in the sub-domain".into()));
    }
    let mut sweep = Vec::with_capacity(eps.len());
    for &e in eps {
        sweep.push((e, min_on(&mollify(grid, f, e, KernelProfile::QuarticBump)?)?));
    }
    let fitted_c = sweep.iter().map(|&(e, me)| (m - me) / e).fold(0.0, f64::max);
    let slack = MONOTONE_SLACK * m.abs();
    let mut prev = 0.0;
    let mut monotone = true;
    for &(_, me) in &sweep {
        let loss = (m - me).max(0.0);
        monotone &= loss >= prev - slack;
        prev = loss;
    }
    let no_collapse = sweep.iter().all(|s| s.1 > 0.0);
    Ok(MarginLawReport { base_margin: m, sweep, fitted_c, monotone, no_collapse, pass: monotone && no_collapse })
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
    fn paraboloid_on_disk_passes() {
        let g0 = plane(81, 1.05);
        let g = g0.with_domain(Region::from_fn(&g0, |[x, y]| x * x + y * y <= 1.0).mask().to_vec()).unwrap();
        let f = ScalarField::from_fn(&g, |[x, y]| x * x + y * y);
        let r = verify_mean_convex(&g, &f, &ScalarField::constant(&g, 0.0), 1e-3).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.sampled_fraction > 0.9);
        // Margin at radius r is 1/r.
        let k = g.index(60, 40);
        let m = margins(&g, &f, &ScalarField::constant(&g, 0.0), 1e-3).unwrap();
        let at = m.iter().find(|e| e.0 == k).unwrap().1;
        assert!((at - 1.0 / g.coords(k)[0]).abs() < 1e-3);
    }

    #[test]
    fn flat_levels_fail_positive_target() {
        let g = MetricGrid::euclidean(32, 40, 0.05, [0.0; 2], Topology::Cylinder).unwrap();
        let f = ScalarField::from_fn(&g, |[_, y]| y);
        let r = verify_mean_convex(&g, &f, &ScalarField::constant(&g, 0.01), 1e-3).unwrap();
        assert!(!r.pass);
        assert!((r.min_margin + 0.01).abs() < 1e-9 && (r.mean_margin + 0.01).abs() < 1e-9);
        assert_eq!(r.violations, r.sampled);
        assert_eq!(r.violators.len(), MAX_VIOLATORS);
    }

    #[test]
    fn saddle_fails_on_index() {
        let g = plane(41, 1.0);
        let f = ScalarField::from_fn(&g, |[x, y]| x * x - y * y);
        let r = verify_mean_convex(&g, &f, &ScalarField::constant(&g, -1e9), 1e-3).unwrap();
        assert!(r.min_margin > 0.0);
        assert!(r.critical_points.iter().any(|c| c.index == 1));
        assert!(!r.pass);
    }

    #[test]
    fn ellipse_margin_survives_smoothing() {
        let g = plane(129, 1.0);
        let f = ScalarField::from_fn(&g, |[x, y]| (x * x + 4.0 * y * y).sqrt());
        let sub = Region::from_fn(&g, |[x, y]| (0.3..=0.8).contains(&(x * x + 4.0 * y * y).sqrt()));
        let h = g.h();
        let r = margin_law(&g, &f, &ScalarField::constant(&g, 0.0), &sub, &[2.0 * h, 4.0 * h, 8.0 * h], 1e-3).unwrap();
        // Least curved level point is the end of the major axis: b/a² = 0.5/0.8.
        assert!((r.base_margin - 0.625).abs() < 0.03, "{r:?}");
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn unsorted_sweep_rejected() {
        let g = plane(33, 1.0);
        let f = ScalarField::from_fn(&g, |[x, y]| x * x + y * y);
        let sub = Region::from_fn(&g, |_| true);
        let e = margin_law(&g, &f, &ScalarField::constant(&g, 0.0), &sub, &[0.2, 0.1], 1e-3).unwrap_err();
        assert!(matches!(e, Error::Precondition(_)));
    }
}
