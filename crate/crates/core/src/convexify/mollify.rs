//! Kernel averaging with a compactly supported bump of Riemannian radius ε.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{quad, MetricGrid, ScalarField};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelProfile {
    /// `(1 − t²)²` on `[0, 1)`.
    #[default]
    QuarticBump,
}

impl KernelProfile {
    #[inline]
    pub fn psi(self, t: f64) -> f64 {
        match self {
            KernelProfile::QuarticBump => {
                if t < 1.0 {
                    let s = 1.0 - t * t;
                    s * s
                } else {
                    0.0
                }
            }
        }
    }
}

fn min_eig(g: [f64; 3]) -> f64 {
    let tr = 0.5 * (g[0] + g[2]);
    let det = g[0] * g[2] - g[1] * g[1];
    tr - (tr * tr - det).max(0.0).sqrt()
}

/// Normalized kernel weights at node `x` over defined nodes of `f`. The
/// distance to a node `y` is the norm of the grid displacement under the
/// mean of the tensors at `x` and `y`; each weight carries `y`'s cell area.
pub fn kernel_weights(grid: &MetricGrid, f: &ScalarField, x: usize, eps: f64, profile: KernelProfile) -> Vec<(usize, f64)> {
    let h = grid.h();
    let gx = grid.tensor(x);
    let reach = (1.25 * eps / (h * min_eig(gx).sqrt())).ceil() as isize + 1;
    let mut out = Vec::new();
    let mut total = 0.0;
    for dj in -reach..=reach {
        for di in -reach..=reach {
            let Some(y) = grid.offset(x, di, dj) else { continue };
            if !f.is_defined(y) {
                continue;
            }
            let g = grid.tensor_mid(x, y);
            let d = quad(g, di as f64, dj as f64).sqrt() * h;
            let w = profile.psi(d / eps) * grid.area_weight(y);
            if w > 0.0 {
                out.push((y, w));
                total += w;
            }
        }
    }
    for e in &mut out {
        e.1 /= total;
    }
    out
}

/// `f_ε(x) = Σ_y K_ε(x, y) f(y)` with weights normalized per node. Defined
/// wherever `f` is.
pub fn mollify(grid: &MetricGrid, f: &ScalarField, eps: f64, profile: KernelProfile) -> Result<ScalarField> {
    f.check(grid)?;
    if !(eps >= 2.0 * grid.h()) {
        return Err(Error::KernelUnderResolved);
    }
    let vals: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|x| {
            if !f.is_defined(x) {
                return f64::NAN;
            }
            kernel_weights(grid, f, x, eps, profile).iter().map(|&(y, w)| w * f.at(y)).sum()
        })
        .collect();
    ScalarField::with_mask(grid, vals, f.defined_mask().to_vec())
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
    fn under_resolved() {
        let g = plane(17, 1.0);
        let f = ScalarField::constant(&g, 1.0);
        assert_eq!(mollify(&g, &f, 1.5 * g.h(), KernelProfile::QuarticBump).unwrap_err(), Error::KernelUnderResolved);
    }

    #[test]
    fn affine_preserved_in_interior() {
        let g = plane(41, 1.0);
        let f = ScalarField::from_fn(&g, |[x, y]| 2.0 * x - y + 0.5);
        let eps = 4.0 * g.h();
        let m = mollify(&g, &f, eps, KernelProfile::QuarticBump).unwrap();
        for k in 0..g.len() {
            let (i, j) = g.ij(k);
            if (6..35).contains(&i) && (6..35).contains(&j) {
                assert!((m.at(k) - f.at(k)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn weights_normalized_on_curved_metric() {
        let n = 33;
        let h = 1.8 / (n - 1) as f64;
        let l: Vec<f64> = (0..n * n)
            .map(|k| {
                let (x, y) = (-0.9 + (k % n) as f64 * h, -0.9 + (k / n) as f64 * h);
                2.0 / (1.0 - 0.5 * (x * x + y * y))
            })
            .collect();
        let g = MetricGrid::new(n, n, h, [-0.9, -0.9], Topology::Plane, Metric::Conformal(l), None).unwrap();
        let f = ScalarField::constant(&g, 0.0);
        for x in [0, 17, 500, n * n - 1] {
            let s: f64 = kernel_weights(&g, &f, x, 5.0 * h, KernelProfile::QuarticBump).iter().map(|e| e.1).sum();
            assert!((s - 1.0).abs() < 1e-14);
        }
    }
}
