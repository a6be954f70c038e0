//! Breaking degenerate critical points with a small seeded bowl.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::critical_points;
use crate::grid::{MetricGrid, ScalarField};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MorsePerturbation {
    pub seed: u64,
    pub amplitude: f64,
    pub center: [f64; 2],
    /// Length scale `D` of `amplitude·|x − c|²/D²`.
    pub scale: f64,
}

/// `f + amplitude·|x − c|²/D²`, with `c` the centroid of the domain jittered
/// by up to half a cell and `D` its coordinate diameter. Fails if a
/// degenerate critical point survives.
pub fn morse_regularize(grid: &MetricGrid, f: &ScalarField, amplitude: f64, seed: u64) -> Result<(ScalarField, MorsePerturbation)> {
    f.check(grid)?;
    if !(amplitude >= 0.0) {
        return Err(Error::Precondition(format!("amplitude {amplitude} is negative")));
    }
    let pts: Vec<[f64; 2]> = (0..grid.len()).filter(|&k| f.is_defined(k)).map(|k| grid.coords(k)).collect();
    if pts.is_empty() {
        return Err(Error::DegenerateField);
    }
    let n = pts.len() as f64;
    let mut c = [pts.iter().map(|p| p[0]).sum::<f64>() / n, pts.iter().map(|p| p[1]).sum::<f64>() / n];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = grid.h();
    c[0] += rng.random_range(-0.5..0.5) * h;
    c[1] += rng.random_range(-0.5..0.5) * h;
    let span = |a: usize| {
        let (lo, hi) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p[a]), hi.max(p[a])));
        hi - lo
    };
    let scale = span(0).hypot(span(1)).max(h);
    let mut out = f.clone();
    let vals: Vec<f64> = (0..grid.len())
        .map(|k| {
            let [x, y] = grid.coords(k);
            f.at(k) + amplitude * ((x - c[0]).powi(2) + (y - c[1]).powi(2)) / (scale * scale)
        })
        .collect();
    out = ScalarField::with_mask(grid, vals, out.defined_mask().to_vec())?;
    if critical_points(grid, &out)?.iter().any(|p| !p.nondegenerate) {
        return Err(Error::RegularizationFailed);
    }
    Ok((out, MorsePerturbation { seed, amplitude, center: c, scale }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Topology;

    #[test]
    fn plateau_gets_single_minimum() {
        let g = MetricGrid::euclidean(41, 41, 0.05, [-1.0, -1.0], Topology::Plane).unwrap();
        let f = ScalarField::from_fn(&g, |[x, y]| (x * x + y * y - 0.09).max(0.0));
        let (r, p) = morse_regularize(&g, &f, 0.05, 7).unwrap();
        let cps = critical_points(&g, &r).unwrap();
        assert_eq!(cps.len(), 1);
        assert_eq!(cps[0].index, 0);
        assert!(cps[0].nondegenerate);
        assert_eq!(morse_regularize(&g, &f, 0.05, 7).unwrap().1, p);
    }

    #[test]
    fn morse_input_keeps_its_critical_set() {
        let g = MetricGrid::euclidean(41, 41, 0.05, [-1.0, -1.0], Topology::Plane).unwrap();
        let f = ScalarField::from_fn(&g, |[x, y]| (x - 0.2).powi(2) + 2.0 * y * y);
        let (r, _) = morse_regularize(&g, &f, 1e-6, 1).unwrap();
        let a: Vec<usize> = critical_points(&g, &f).unwrap().iter().map(|c| c.node).collect();
        let b: Vec<usize> = critical_points(&g, &r).unwrap().iter().map(|c| c.node).collect();
        assert_eq!(a, b);
        assert!((0..g.len()).all(|k| (r.at(k) - f.at(k)).abs() <= 1e-6));
    }
}
