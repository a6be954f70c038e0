//! Geodesic curvature of level curves, div_g(∇f / |∇f|_g), in flux form.

use crate::error::{Error, Result};
use crate::grid::{quad, MetricGrid, ScalarField, Step};

/// Default gradient floor: `1e-3 · range(f) / h`.
pub fn default_grad_floor(grid: &MetricGrid, f: &ScalarField) -> f64 {
    let (lo, hi) = f.range().unwrap_or((0.0, 0.0));
    1e-3 * (hi - lo) / grid.h()
}

#[inline]
fn inverse(g: [f64; 3]) -> ([f64; 3], f64) {
    let det = g[0] * g[2] - g[1] * g[1];
    ([g[2] / det, -g[1] / det, g[0] / det], det.sqrt())
}

/// The 3×3 block of values around a node, `v[dj+1][di+1]`.
fn block(grid: &MetricGrid, f: &ScalarField, idx: usize) -> Option<[[f64; 3]; 3]> {
    let mut v = [[0.0; 3]; 3];
    for dj in -1..=1isize {
        for di in -1..=1isize {
            let Step::Node(q) = grid.step(idx, di, dj) else { return None };
            v[(dj + 1) as usize][(di + 1) as usize] = f.get(q)?;
        }
    }
    Some(v)
}

/// Metric norm of the gradient at a node (central differences).
pub fn grad_norm(grid: &MetricGrid, f: &ScalarField, idx: usize) -> Option<f64> {
    let v = block(grid, f, idx)?;
    let h = grid.h();
    let fx = (v[1][2] - v[1][0]) / (2.0 * h);
    let fy = (v[2][1] - v[0][1]) / (2.0 * h);
    let (gi, _) = inverse(grid.tensor(idx));
    Some(quad(gi, fx, fy).sqrt())
}

fn curvature_raw(grid: &MetricGrid, f: &ScalarField, idx: usize, floor: f64) -> Result<f64> {
    let v = block(grid, f, idx).ok_or(Error::NearCritical)?;
    let h = grid.h();
    let (gi, _) = inverse(grid.tensor(idx));
    let cx = |r: usize| (v[r][2] - v[r][0]) / (2.0 * h);
    let cy = |c: usize| (v[2][c] - v[0][c]) / (2.0 * h);
    let fx0 = cx(1);
    let fy0 = cy(1);
    if quad(gi, fx0, fy0).sqrt() < floor {
        return Err(Error::NearCritical);
    }
    let nb = |di: isize, dj: isize| match grid.step(idx, di, dj) {
        Step::Node(q) => q,
        Step::Exterior => unreachable!("full stencil checked"),
    };
    // Normalized flux sqrt(det g)·g^{-1}∇f/|∇f|_g through a face, returned as
    // the component normal to that face.
    let flux = |q: usize, fx: f64, fy: f64, along_x: bool| -> Option<f64> {
        let (ginv, sd) = inverse(grid.tensor_mid(idx, q));
        let norm = quad(ginv, fx, fy).sqrt();
        if norm == 0.0 {
            return None;
        }
        let comp = if along_x { ginv[0] * fx + ginv[1] * fy } else { ginv[1] * fx + ginv[2] * fy };
        Some(sd * comp / norm)
    };
    let east = flux(nb(1, 0), (v[1][2] - v[1][1]) / h, 0.5 * (cy(1) + cy(2)), true);
    let west = flux(nb(-1, 0), (v[1][1] - v[1][0]) / h, 0.5 * (cy(1) + cy(0)), true);
    let north = flux(nb(0, 1), 0.5 * (cx(1) + cx(2)), (v[2][1] - v[1][1]) / h, false);
    let south = flux(nb(0, -1), 0.5 * (cx(1) + cx(0)), (v[1][1] - v[0][1]) / h, false);
    match (east, west, north, south) {
        (Some(e), Some(w), Some(n), Some(s)) => Ok(((e - w) + (n - s)) / (h * grid.sqrt_det(idx))),
        _ => Err(Error::NearCritical),
    }
}

/// Curvature at one node; errors where the field is near-critical or the
/// 3×3 stencil leaves the domain.
pub fn curvature_at(grid: &MetricGrid, f: &ScalarField, idx: usize, grad_floor: f64) -> Result<f64> {
    curvature_raw(grid, f, idx, grad_floor)
}

/// Level-curve curvature field. Positive where sublevels are locally convex;
/// undefined where `|∇f|_g < grad_floor` or the stencil is incomplete.
pub fn level_mean_curvature(grid: &MetricGrid, f: &ScalarField, grad_floor: f64) -> Result<ScalarField> {
    f.check(grid)?;
    let mut vals = vec![f64::NAN; grid.len()];
    let mut def = vec![false; grid.len()];
    for k in 0..grid.len() {
        if let Ok(c) = curvature_raw(grid, f, k, grad_floor) {
            vals[k] = c;
            def[k] = true;
        }
    }
    ScalarField::with_mask(grid, vals, def)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Metric, Topology};

    fn plane(n: usize, half: f64) -> MetricGrid {
        let h = 2.0 * half / (n - 1) as f64;
        MetricGrid::euclidean(n, n, h, [-half, -half], Topology::Plane).unwrap()
    }

    #[test]
    fn circle_levels() {
        let g = plane(129, 1.5);
        let f = ScalarField::from_fn(&g, |[x, y]| (x * x + y * y).sqrt());
        let k = level_mean_curvature(&g, &f, 1e-6).unwrap();
        let idx = g.index(64 + 21, 64);
        let r = g.coords(idx)[0];
        assert!((k.at(idx) - 1.0 / r).abs() < 0.1 / r, "{} vs {}", k.at(idx), 1.0 / r);
    }

    #[test]
    fn straight_levels() {
        let g = plane(33, 1.0);
        let f = ScalarField::from_fn(&g, |[x, y]| 0.3 * x - 1.7 * y);
        let k = level_mean_curvature(&g, &f, 1e-6).unwrap();
        for i in 0..g.len() {
            if let Some(v) = k.get(i) {
                assert!(v.abs() < 1e-9);
            }
        }
    }

    #[test]
    fn warped_product() {
        // dt² + cosh²(t) dθ², coordinates x = θ / s, y = t.
        let (nx, ny) = (64, 81);
        let h = 4.0 / (ny - 1) as f64;
        let s = 2.0 * std::f64::consts::PI / (nx as f64 * h);
        let mut g = Vec::new();
        for j in 0..ny {
            let t = -2.0 + j as f64 * h;
            for _ in 0..nx {
                g.push([s * s * t.cosh().powi(2), 0.0, 1.0]);
            }
        }
        let grid = MetricGrid::new(nx, ny, h, [0.0, -2.0], Topology::Cylinder, Metric::Tensor(g), None).unwrap();
        let f = ScalarField::from_fn(&grid, |[_, t]| t);
        let idx = grid.index(5, 60);
        let t = grid.coords(idx)[1];
        let k = curvature_at(&grid, &f, idx, 1e-6).unwrap();
        assert!((t - 1.0).abs() < 1e-12);
        assert!((k - 1f64.tanh()).abs() < 0.05 * 1f64.tanh(), "{k}");
    }

    #[test]
    fn near_critical_is_masked() {
        let g = plane(33, 1.0);
        let f = ScalarField::from_fn(&g, |[x, y]| x * x + y * y);
        let c = g.index(16, 16);
        assert_eq!(curvature_at(&g, &f, c, 1e-3), Err(Error::NearCritical));
        assert_eq!(curvature_at(&g, &f, 0, 0.0), Err(Error::NearCritical));
    }
}
