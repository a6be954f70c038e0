//! Shortest curves separating two ends, and systoles of flat tori.

use serde::{Deserialize, Serialize};

use crate::cut::{build_cut_graph, minimize_phi_area, CutProblem, MinimizerChoice};
use crate::error::{Error, Result};
use crate::grid::{MetricGrid, Region, ScalarField, Topology};

#[derive(Clone, Debug, PartialEq)]
pub struct Separator {
    /// The side containing `end_a`; its interface is the separating curve.
    pub region: Region,
    /// Cells of `region` on the separating curve.
    pub curve: Region,
    pub length: f64,
}

/// Minimal-length curve separating `end_a` from `end_b` inside `domain`:
/// the minimal φ = 0 cut containing `end_a` and avoiding `end_b`.
pub fn minimal_separator(grid: &MetricGrid, domain: &Region, end_a: &Region, end_b: &Region) -> Result<Separator> {
    domain.check(grid)?;
    end_a.check(grid)?;
    end_b.check(grid)?;
    if end_a.is_empty() || end_b.is_empty() {
        return Err(Error::Precondition("both ends must be non-empty".into()));
    }
    if !end_a.is_subset(domain) || !end_b.is_subset(domain) {
        return Err(Error::Precondition("ends must lie in the domain".into()));
    }
    if !end_a.is_disjoint(end_b) || end_a.touches(grid, end_b) {
        return Err(Error::EndsNotSeparated);
    }
    let sub = grid.with_domain(domain.mask().to_vec())?;
    let graph = build_cut_graph(&sub)?;
    let mut problem = CutProblem::new(&graph, ScalarField::constant(&sub, 0.0));
    problem.must_include = end_a.clone();
    problem.must_exclude = end_b.clone();
    problem.choice = MinimizerChoice::Minimal;
    let sol = minimize_phi_area(&problem)?;
    let curve = Region::from_indices(grid, sol.region.boundary_cells(&sub))?;
    Ok(Separator { length: graph.interface_length(&sol.region), curve, region: sol.region })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Systoles {
    /// Shortest closed curve winding once around x.
    pub x_length: f64,
    /// Shortest closed curve winding once around y.
    pub y_length: f64,
}

/// Rows `0..w` and `ny−w..ny` of a cylinder, the two ends of its open
/// direction.
pub fn end_bands(grid: &MetricGrid, width: usize) -> (Region, Region) {
    let ny = grid.ny();
    let a = Region::from_ij(grid, |_, j| j < width).intersection(&Region::domain(grid));
    let b = Region::from_ij(grid, |_, j| j + width >= ny).intersection(&Region::domain(grid));
    (a, b)
}

/// Lengths of the shortest curves in both generator classes of a torus.
/// Each class is found by cutting the torus open across the other
/// generator and separating the two resulting boundary bands.
pub fn torus_systoles(grid: &MetricGrid) -> Result<Systoles> {
    if grid.topology() != Topology::Torus {
        return Err(Error::UnsupportedCombination("systoles need a torus".into()));
    }
    let run = |g: &MetricGrid| -> Result<f64> {
        let cyl = g.with_topology(Topology::Cylinder);
        let (a, b) = end_bands(&cyl, 2);
        Ok(minimal_separator(&cyl, &Region::domain(&cyl), &a, &b)?.length)
    };
    Ok(Systoles { x_length: run(grid)?, y_length: run(&grid.transposed()?)? })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_cylinder_separator() {
        let n = 64;
        let g = MetricGrid::euclidean(n, 2 * n, 1.0 / n as f64, [0.0; 2], Topology::Cylinder).unwrap();
        let (a, b) = end_bands(&g, 3);
        let s = minimal_separator(&g, &Region::domain(&g), &a, &b).unwrap();
        assert!((s.length - 1.0).abs() < 0.03, "{}", s.length);
        assert!(s.region.is_subset(&Region::domain(&g)) && a.is_subset(&s.region));
    }

    #[test]
    fn touching_ends_rejected() {
        let g = MetricGrid::euclidean(16, 16, 0.1, [0.0; 2], Topology::Plane).unwrap();
        let a = Region::from_ij(&g, |i, _| i < 8);
        let b = Region::from_ij(&g, |i, _| i >= 8);
        let d = Region::domain(&g);
        assert_eq!(minimal_separator(&g, &d, &a, &b).unwrap_err(), Error::EndsNotSeparated);
    }

    #[test]
    fn torus_systoles_match_periods() {
        let g = MetricGrid::euclidean(48, 80, 0.025, [0.0; 2], Topology::Torus).unwrap();
        let s = torus_systoles(&g).unwrap();
        assert!((s.x_length - 1.2).abs() < 0.036, "{s:?}");
        assert!((s.y_length - 2.0).abs() < 0.06, "{s:?}");
    }
}
