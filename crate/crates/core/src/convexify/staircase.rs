//! Bent distance functions and their staircase over a nested family.

use serde::{Deserialize, Serialize};

use crate::cut::boundary_curvature_samples;
use crate::error::{Error, Result};
use crate::geometry::signed_distance_to_outline;
use crate::grid::{MetricGrid, Region, ScalarField};

/// Default ratio between the slopes of consecutive stages; raised for long
/// staircases so that the last slope stays at least [`MIN_DEFAULT_SLOPE`].
pub const DEFAULT_SLOPE_RATIO: f64 = 0.75;
pub const MIN_DEFAULT_SLOPE: f64 = 0.2;
/// Width of the band, in cells, where bending curvature is measured.
const BEND_BAND_CELLS: f64 = 4.0;
/// Safety factor on the measured negative curvature in the bending
/// coefficient.
pub const BEND_FACTOR: f64 = 1.5;

/// `β(t) = t + c·t²`.
#[inline]
pub fn beta(c: f64, t: f64) -> f64 {
    t + c * t * t
}

/// `β∘d` with `β(t) = t + c·t²`. Sublevel sets are unchanged as long as
/// `β′ = 1 + 2ct` stays positive on the range of `d`.
pub fn bend(grid: &MetricGrid, d: &ScalarField, c: f64) -> Result<ScalarField> {
    d.check(grid)?;
    if !(c >= 0.0) {
        return Err(Error::Precondition(format!("bending coefficient {c} is negative")));
    }
    if let Some((lo, _)) = d.range() {
        if !(1.0 + 2.0 * c * lo > 0.0) {
            return Err(Error::BendingMonotonicity);
        }
    }
    Ok(d.map(|t| beta(c, t)))
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StaircaseSpec {
    /// Ratio `a_{i+1}/a_i` of stage slopes, in (0, 1). Defaults to
    /// [`DEFAULT_SLOPE_RATIO`] or more for long staircases.
    #[serde(default)]
    pub slope_ratio: Option<f64>,
    /// Gap bounds δ_i, one per stage but the last; measured when absent.
    #[serde(default)]
    pub gaps: Option<Vec<f64>>,
    /// Bending coefficients c_i; measured when absent.
    #[serde(default)]
    pub bending: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub slope: f64,
    pub bending: f64,
    pub offset: f64,
    /// Depth range of the next stage's outline inside this one.
    pub next_depth: Option<[f64; 2]>,
    /// Depth below which this stage is switched off (infinite for the last).
    pub gap: f64,
}

#[derive(Clone, Debug)]
pub struct Staircase {
    pub field: ScalarField,
    pub slope_ratio: f64,
    pub stages: Vec<Stage>,
    /// `a_i·β_i(d_i) + o_i` per stage.
    pub stage_values: Vec<ScalarField>,
    /// Where each stage takes part in the maximum.
    pub active: Vec<Region>,
}

/// `h = max_i (a_i·β_i(d_i) + o_i)` over the stages active at each node,
/// with `d_i` the signed distance to the outline of `U_i`.
///
/// Stage slopes shrink geometrically so that deeper stages take over inside
/// the next region; offsets make consecutive stages agree on the deepest
/// point of the next outline, so `h = 0` on `∂U_1` and `h` decreases into
/// the nest. Stage `i` is active inside `U_{i−1}` down to depth `δ_i`.
pub fn staircase(grid: &MetricGrid, regions: &[Region], spec: &StaircaseSpec) -> Result<Staircase> {
    let n = regions.len();
    if n == 0 {
        return Err(Error::StaircaseGap("no stages".into()));
    }
    for (i, r) in regions.iter().enumerate() {
        r.check(grid)?;
        if r.is_empty() {
            return Err(Error::StaircaseGap(format!("stage {} is empty", i + 1)));
        }
    }
    for (i, w) in regions.windows(2).enumerate() {
        if !w[1].is_subset(&w[0]) || w[1] == w[0] {
            return Err(Error::StaircaseGap(format!("stages {} and {} are not strictly nested", i + 1, i + 2)));
        }
    }
    let sigma = spec
        .slope_ratio
        .unwrap_or_else(|| if n > 1 { DEFAULT_SLOPE_RATIO.max(MIN_DEFAULT_SLOPE.powf(1.0 / (n - 1) as f64)) } else { DEFAULT_SLOPE_RATIO });
    if !(sigma > 0.0 && sigma < 1.0) {
        return Err(Error::Precondition(format!("slope ratio {sigma} outside (0, 1)")));
    }
    let h = grid.h();
    let dists: Vec<ScalarField> = regions.iter().map(|r| signed_distance_to_outline(grid, r)).collect::<Result<_>>()?;

    let mut stages = Vec::with_capacity(n);
    let mut offset = 0.0;
    let mut slope = 1.0;
    for i in 0..n {
        let next_depth = (i + 1 < n).then(|| {
            let depths = regions[i + 1].outline(grid).into_iter().filter_map(|k| dists[i].get(k)).map(|d| -d);
            depths.fold([f64::INFINITY, f64::NEG_INFINITY], |[lo, hi], g| [lo.min(g), hi.max(g)])
        });
        let gap = match (next_depth, &spec.gaps) {
            (None, _) => f64::INFINITY,
            (Some([_, hi]), Some(gaps)) => {
                let g = *gaps.get(i).ok_or_else(|| Error::StaircaseGap(format!("no gap bound for stage {}", i + 1)))?;
                if !(g > hi) {
                    return Err(Error::StaircaseGap(format!("δ_{} = {g} does not exceed {hi}", i + 1)));
                }
                g
            }
            (Some([lo, hi]), None) => hi + (hi - lo) / (1.0 - sigma) + 2.0 * h,
        };
        let bending = match &spec.bending {
            Some(b) => *b.get(i).ok_or_else(|| Error::Precondition(format!("no bending coefficient for stage {}", i + 1)))?,
            None => measured_bending(grid, &regions[i]),
        };
        // β′ must stay positive down to the deepest point where the stage is used.
        let deepest = regions[i].indices().filter_map(|k| dists[i].get(k)).map(|d| -d).fold(0.0, f64::max).min(gap);
        if !(bending >= 0.0) {
            return Err(Error::Precondition(format!("bending coefficient {bending} is negative")));
        }
        if !(1.0 - 2.0 * bending * deepest > 0.0) {
            return Err(Error::BendingMonotonicity);
        }
        stages.push(Stage { slope, bending, offset, next_depth, gap });
        if let Some([_, hi]) = next_depth {
            offset += slope * beta(bending, -hi);
        }
        slope *= sigma;
    }

    let mut stage_values = Vec::with_capacity(n);
    let mut active = Vec::with_capacity(n);
    for (i, st) in stages.iter().enumerate() {
        stage_values.push(dists[i].map(|d| st.slope * beta(st.bending, d) + st.offset));
        let mut a = Region::empty(grid);
        for k in 0..grid.len() {
            let Some(d) = dists[i].get(k) else { continue };
            let inside_prev = i == 0 || regions[i - 1].contains(k);
            if inside_prev && d >= -st.gap {
                a.set(k, true);
            }
        }
        active.push(a);
    }
    let mut vals = vec![f64::NAN; grid.len()];
    let mut defined = vec![false; grid.len()];
    for k in 0..grid.len() {
        let pick = |use_all: bool| {
            (0..n)
                .filter(|&i| use_all || active[i].contains(k))
                .filter_map(|i| stage_values[i].get(k))
                .fold(f64::NEG_INFINITY, f64::max)
        };
        let mut v = pick(false);
        if v == f64::NEG_INFINITY {
            v = pick(true);
        }
        if v.is_finite() {
            vals[k] = v;
            defined[k] = true;
        }
    }
    Ok(Staircase { field: ScalarField::with_mask(grid, vals, defined)?, slope_ratio: sigma, stages, stage_values, active })
}

/// `1.5 × max(0, −min κ)` over the smoothed level curves of `d_U` within
/// `4h` of the boundary of `U`.
fn measured_bending(grid: &MetricGrid, region: &Region) -> f64 {
    match boundary_curvature_samples(grid, region, BEND_BAND_CELLS * grid.h(), None) {
        Ok(s) => BEND_FACTOR * s.iter().map(|e| e.1).fold(0.0, f64::min).abs(),
        Err(_) => 0.0,
    }
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
    fn zero_bending_is_identity() {
        let g = plane(17, 1.0);
        let d = ScalarField::from_fn(&g, |[x, y]| x - 0.3 * y);
        assert_eq!(bend(&g, &d, 0.0).unwrap(), d);
    }

    #[test]
    fn bending_keeps_extrema_and_sublevels() {
        let g = plane(33, 1.0);
        let d = ScalarField::from_fn(&g, |[x, y]| (x * x + y * y).sqrt() - 0.5);
        let b = bend(&g, &d, 0.4).unwrap();
        for c in [-0.4, -0.1, 0.0, 0.3] {
            assert_eq!(d.sublevel(c), b.sublevel(beta(0.4, c)));
        }
        assert!(matches!(bend(&g, &d, 2.0), Err(Error::BendingMonotonicity)));
    }

    #[test]
    fn single_stage_is_bent_distance() {
        let g = plane(41, 1.0);
        let u = Region::from_fn(&g, |[x, y]| x * x + y * y <= 0.64);
        let s = staircase(&g, &[u.clone()], &StaircaseSpec { bending: Some(vec![0.2]), ..Default::default() }).unwrap();
        let d = signed_distance_to_outline(&g, &u).unwrap();
        assert_eq!(s.field, bend(&g, &d, 0.2).unwrap());
    }

    #[test]
    fn equal_stages_rejected() {
        let g = plane(17, 1.0);
        let u = Region::from_fn(&g, |[x, _]| x < 0.0);
        assert!(matches!(staircase(&g, &[u.clone(), u], &StaircaseSpec::default()), Err(Error::StaircaseGap(_))));
    }

    #[test]
    fn gap_below_next_depth_rejected() {
        let g = plane(41, 1.0);
        let a = Region::from_fn(&g, |[x, y]| x * x + y * y <= 0.81);
        let b = Region::from_fn(&g, |[x, y]| x * x + y * y <= 0.25);
        let spec = StaircaseSpec { gaps: Some(vec![0.1]), ..Default::default() };
        assert!(matches!(staircase(&g, &[a, b], &spec), Err(Error::StaircaseGap(_))));
    }
}
