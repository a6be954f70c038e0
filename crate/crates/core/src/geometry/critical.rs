//! Discrete critical points with a symbolic-perturbation tie-break.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{MetricGrid, ScalarField, Step, N8};

/// Relative floor on Hessian eigenvalues: `1e-6 · range(f) / extent²`.
pub const HESSIAN_FLOOR_REL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub node: usize,
    pub position: [f64; 2],
    pub value: f64,
    /// 0 minimum, 1 saddle, 2 maximum.
    pub index: u8,
    pub nondegenerate: bool,
    /// Eigenvalues of g⁻¹·Hess f, ascending.
    pub eigenvalues: [f64; 2],
}

/// `(f(a), a) < (f(b), b)`: values first, node index breaks ties, which is
/// the same as perturbing f by an infinitesimal multiple of the index.
#[inline]
fn below(fa: f64, a: usize, fb: f64, b: usize) -> bool {
    fa < fb || (fa == fb && a < b)
}

/// Eigenvalues of g⁻¹H at a node with a complete 3×3 stencil.
pub(crate) fn hessian_eigs(grid: &MetricGrid, v: &[[f64; 3]; 3], idx: usize) -> [f64; 2] {
    let h2 = grid.h() * grid.h();
    let fxx = (v[1][2] - 2.0 * v[1][1] + v[1][0]) / h2;
    let fyy = (v[2][1] - 2.0 * v[1][1] + v[0][1]) / h2;
    let fxy = (v[2][2] - v[2][0] - v[0][2] + v[0][0]) / (4.0 * h2);
    let g = grid.tensor(idx);
    let det_g = g[0] * g[2] - g[1] * g[1];
    let gi = [g[2] / det_g, -g[1] / det_g, g[0] / det_g];
    // A = g⁻¹H (not symmetric, but similar to a symmetric matrix).
    let a11 = gi[0] * fxx + gi[1] * fxy;
    let a12 = gi[0] * fxy + gi[1] * fyy;
    let a21 = gi[1] * fxx + gi[2] * fxy;
    let a22 = gi[1] * fxy + gi[2] * fyy;
    let tr = a11 + a22;
    let det = a11 * a22 - a12 * a21;
    let disc = (0.25 * tr * tr - det).max(0.0).sqrt();
    [0.5 * tr - disc, 0.5 * tr + disc]
}

pub(crate) fn stencil(grid: &MetricGrid, f: &ScalarField, idx: usize) -> Option<([[f64; 3]; 3], [usize; 8])> {
    let mut v = [[0.0; 3]; 3];
    v[1][1] = f.get(idx)?;
    let mut ring = [0usize; 8];
    for (r, &(di, dj)) in N8.iter().enumerate() {
        let Step::Node(q) = grid.step(idx, di, dj) else { return None };
        v[(dj + 1) as usize][(di + 1) as usize] = f.get(q)?;
        ring[r] = q;
    }
    Some((v, ring))
}

/// Discrete minima, saddles and maxima of `f` under 8-neighbour comparison.
/// Nodes without a complete in-domain stencil are skipped.
pub fn critical_points(grid: &MetricGrid, f: &ScalarField) -> Result<Vec<CriticalPoint>> {
    f.check(grid)?;
    let (lo, hi) = f.range().ok_or(Error::DegenerateField)?;
    if hi - lo <= 0.0 {
        return Err(Error::DegenerateField);
    }
    let extent = (grid.nx().max(grid.ny()) as f64) * grid.h();
    let floor = HESSIAN_FLOOR_REL * (hi - lo) / (extent * extent);
    let mut out = Vec::new();
    for p in 0..grid.len() {
        let Some((v, ring)) = stencil(grid, f, p) else { continue };
        let fp = v[1][1];
        let lower: Vec<bool> = N8
            .iter()
            .zip(ring)
            .map(|(&(di, dj), q)| below(v[(dj + 1) as usize][(di + 1) as usize], q, fp, p))
            .collect();
        let nl = lower.iter().filter(|&&b| b).count();
        let changes = (0..8).filter(|&r| lower[r] != lower[(r + 1) % 8]).count();
        let combinatorial = match (nl, changes) {
            (0, _) => 0u8,
            (8, _) => 2,
            (_, c) if c >= 4 => 1,
            _ => continue,
        };
        let eig = hessian_eigs(grid, &v, p);
        let nondegenerate = eig.iter().all(|e| e.abs() > floor);
        let index = if nondegenerate { eig.iter().filter(|&&e| e < 0.0).count() as u8 } else { combinatorial };
        out.push(CriticalPoint {
            node: p,
            position: grid.coords(p),
            value: fp,
            index,
            nondegenerate,
            eigenvalues: eig,
        });
    }
    Ok(out)
}
