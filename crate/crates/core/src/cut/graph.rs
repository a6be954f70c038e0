//! The 16-neighbourhood cut graph with Cauchy–Crofton weights.
//!
//! An undirected edge along the grid vector `e` at a point with metric `G`
//! gets weight `κ · h · |e|² det G · Δθ / (2 (eᵀGe)^{3/2})`, which reduces to
//! `κ · h · λ · Δθ / (2|e|)` for a conformal metric. `Δθ` is the angular
//! sector of the direction and `κ` rescales the stencil so that axis-aligned
//! and circular interfaces err symmetrically.

use crate::error::{Error, Result};
use crate::grid::{quad, MetricGrid, Region, Step};

/// Half of the 16-neighbourhood, ordered by angle in `[0, π)`.
pub const STENCIL: [(isize, isize); 8] = [(1, 0), (2, 1), (1, 1), (1, 2), (0, 1), (-1, 2), (-1, 1), (-2, 1)];

fn angle(e: (isize, isize)) -> f64 {
    (e.1 as f64).atan2(e.0 as f64)
}

/// Angular sector owned by each stencil direction.
pub fn sectors() -> [f64; 8] {
    let mut out = [0.0; 8];
    for k in 0..8 {
        let prev = angle(STENCIL[(k + 7) % 8]) - if k == 0 { std::f64::consts::PI } else { 0.0 };
        let next = angle(STENCIL[(k + 1) % 8]) + if k == 7 { std::f64::consts::PI } else { 0.0 };
        out[k] = 0.5 * (next - prev);
    }
    out
}

/// Cut value per unit length of an axis-aligned line under plain Crofton
/// weights (no calibration).
pub fn axis_density() -> f64 {
    let dt = sectors();
    STENCIL
        .iter()
        .zip(dt)
        .map(|(&(a, b), t)| b.unsigned_abs() as f64 * t / (2.0 * ((a * a + b * b) as f64).sqrt()))
        .sum()
}

/// Global calibration factor: `2 / (1 + axis density)`, splitting the
/// residual anisotropy between axis lines (slightly short) and circles
/// (slightly long).
pub fn calibration() -> f64 {
    2.0 / (1.0 + axis_density())
}

fn weight(g: [f64; 3], e: (isize, isize), sector: f64, h: f64, cal: f64) -> f64 {
    let (a, b) = (e.0 as f64, e.1 as f64);
    let det = g[0] * g[2] - g[1] * g[1];
    let q = quad(g, a, b);
    cal * h * (a * a + b * b) * det * sector / (2.0 * q * q.sqrt())
}

/// Weighted neighbourhood graph over domain nodes. Immutable once built.
#[derive(Clone, Debug)]
pub struct CutGraph {
    nx: usize,
    ny: usize,
    /// Undirected edges between domain nodes, in construction order.
    edges: Vec<(u32, u32, f64)>,
    /// Per-node total weight of stencil edges leaving the manifold.
    exterior: Vec<f64>,
    area: Vec<f64>,
    domain: Vec<bool>,
}

/// Builds the cut graph. Rejects tensor metrics on a torus.
pub fn build_cut_graph(grid: &MetricGrid) -> Result<CutGraph> {
    if grid.metric().is_tensor() && grid.topology().periodic_y() {
        return Err(Error::UnsupportedCombination("tensor metric on torus".into()));
    }
    let n = grid.len();
    let dt = sectors();
    let cal = calibration();
    let h = grid.h();
    let mut edges = Vec::with_capacity(8 * n);
    let mut exterior = vec![0.0; n];
    for p in 0..n {
        if !grid.in_domain(p) {
            continue;
        }
        for (k, &(di, dj)) in STENCIL.iter().enumerate() {
            match grid.step(p, di, dj) {
                Step::Node(q) => edges.push((p as u32, q as u32, weight(grid.tensor_mid(p, q), (di, dj), dt[k], h, cal))),
                Step::Exterior => exterior[p] += weight(grid.tensor(p), (di, dj), dt[k], h, cal),
            }
            if grid.step(p, -di, -dj) == Step::Exterior {
                exterior[p] += weight(grid.tensor(p), (di, dj), dt[k], h, cal);
            }
        }
    }
    let area = (0..n).map(|k| if grid.in_domain(k) { grid.area_weight(k) } else { 0.0 }).collect();
    Ok(CutGraph { nx: grid.nx(), ny: grid.ny(), edges, exterior, area, domain: grid.domain_mask().to_vec() })
}

impl CutGraph {
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
    pub fn dims(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }
    pub fn edges(&self) -> &[(u32, u32, f64)] {
        &self.edges
    }
    pub fn exterior(&self) -> &[f64] {
        &self.exterior
    }
    pub fn area(&self) -> &[f64] {
        &self.area
    }
    pub fn domain(&self) -> &[bool] {
        &self.domain
    }

    pub fn check(&self, region: &Region) -> Result<()> {
        if region.dims() != (self.nx, self.ny) {
            return Err(Error::ShapeMismatch("region and graph sizes differ".into()));
        }
        Ok(())
    }

    /// Length of the interface between the region and its in-domain
    /// complement, excluding any part along the manifold edge.
    pub fn interface_length(&self, region: &Region) -> f64 {
        let m = region.mask();
        self.edges
            .iter()
            .filter(|&&(a, b, _)| m[a as usize] != m[b as usize])
            .map(|e| e.2)
            .sum()
    }

    /// Length of the interface between `region` and a disjoint set `other`.
    pub fn shared_length(&self, region: &Region, other: &Region) -> f64 {
        let (m, o) = (region.mask(), other.mask());
        self.edges
            .iter()
            .filter(|&&(a, b, _)| {
                let (a, b) = (a as usize, b as usize);
                (m[a] && o[b]) || (m[b] && o[a])
            })
            .map(|e| e.2)
            .sum()
    }

    /// Weight of the region's cells touching the manifold edge.
    pub fn edge_length(&self, region: &Region) -> f64 {
        region.indices().map(|k| self.exterior[k]).sum()
    }
}

/// Full discrete perimeter: the interface with the complement plus the part
/// of the manifold edge the region touches.
pub fn perimeter(graph: &CutGraph, region: &Region) -> f64 {
    graph.interface_length(region) + graph.edge_length(region)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Metric, Topology};

    #[test]
    fn sectors_cover_half_turn() {
        let s: f64 = sectors().iter().sum();
        assert!((s - std::f64::consts::PI).abs() < 1e-12);
        assert!((sectors()[0] - 0.463_647_609).abs() < 1e-8);
        assert!((sectors()[2] - 0.321_750_554).abs() < 1e-8);
        assert!((sectors()[1] - std::f64::consts::FRAC_PI_8).abs() < 1e-12);
    }

    #[test]
    fn wrap_edges_match_interior_edges() {
        let g = MetricGrid::euclidean(6, 6, 0.1, [0.0; 2], Topology::Torus).unwrap();
        let cg = build_cut_graph(&g).unwrap();
        assert_eq!(cg.edges().len(), 36 * 8);
        let w0: Vec<f64> = cg.edges()[..8].iter().map(|e| e.2).collect();
        for chunk in cg.edges().chunks(8) {
            let w: Vec<f64> = chunk.iter().map(|e| e.2).collect();
            assert_eq!(w, w0);
        }
        assert!(cg.exterior().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn tensor_torus_rejected() {
        let g = MetricGrid::new(6, 6, 0.1, [0.0; 2], Topology::Torus, Metric::Tensor(vec![[1.0, 0.0, 1.0]; 36]), None)
            .unwrap();
        assert!(matches!(build_cut_graph(&g), Err(Error::UnsupportedCombination(_))));
    }

    #[test]
    fn conformal_scaling_doubles_cuts() {
        let g1 = MetricGrid::euclidean(12, 12, 0.1, [0.0; 2], Topology::Plane).unwrap();
        let g2 = MetricGrid::new(12, 12, 0.1, [0.0; 2], Topology::Plane, Metric::Conformal(vec![2.0; 144]), None).unwrap();
        let r = Region::from_ij(&g1, |i, j| (i as i32 - 5).pow(2) + (j as i32 - 6).pow(2) < 10);
        let (c1, c2) = (build_cut_graph(&g1).unwrap(), build_cut_graph(&g2).unwrap());
        assert!((perimeter(&c2, &r) - 2.0 * perimeter(&c1, &r)).abs() < 1e-12);
    }

    #[test]
    fn tensor_and_conformal_agree() {
        let g1 = MetricGrid::new(8, 8, 0.1, [0.0; 2], Topology::Plane, Metric::Conformal(vec![1.5; 64]), None).unwrap();
        let g2 = MetricGrid::new(8, 8, 0.1, [0.0; 2], Topology::Plane, Metric::Tensor(vec![[2.25, 0.0, 2.25]; 64]), None)
            .unwrap();
        let (c1, c2) = (build_cut_graph(&g1).unwrap(), build_cut_graph(&g2).unwrap());
        for (a, b) in c1.edges().iter().zip(c2.edges()) {
            assert!((a.2 - b.2).abs() < 1e-14);
        }
    }
}
