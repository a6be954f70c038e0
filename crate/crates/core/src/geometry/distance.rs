//! Geodesic distance by fast marching on the 8-neighbour triangulation.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::geometry::curvature::grad_norm;
use crate::grid::{quad, MetricGrid, Region, ScalarField, Step, N4, N8};

#[derive(Clone, Copy, PartialEq)]
struct Entry(f64, usize);

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Min-heap on distance, ties broken by node index.
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Minimum over the segment `A + s(B − A)`, `s ∈ [0, 1]`, of
/// `T(s) + |p(s)|_g`, with `T` linear between `ta` and `tb`. Vectors are in
/// grid units relative to the updated node. Returns the value and the
/// minimizing `s`.
fn triangle_update(ta: f64, tb: f64, a: [f64; 2], b: [f64; 2], g: [f64; 3], h: f64) -> (f64, f64) {
    let d = [b[0] - a[0], b[1] - a[1]];
    let h2 = h * h;
    let alpha = quad(g, d[0], d[1]) * h2;
    let beta = (g[0] * a[0] * d[0] + g[1] * (a[0] * d[1] + a[1] * d[0]) + g[2] * a[1] * d[1]) * h2;
    let gamma = quad(g, a[0], a[1]) * h2;
    let delta = tb - ta;
    let cost = |s: f64| ta + s * delta + (alpha * s * s + 2.0 * beta * s + gamma).max(0.0).sqrt();
    let (c0, c1) = (cost(0.0), cost(1.0));
    let mut best = if c0 <= c1 { (c0, 0.0) } else { (c1, 1.0) };
    let k = alpha - delta * delta;
    if k > 0.0 && alpha > 0.0 {
        let disc = beta * beta / (alpha * alpha) - (beta * beta - delta * delta * gamma) / (alpha * k);
        if disc >= 0.0 {
            let r = disc.sqrt();
            for s in [-beta / alpha + r, -beta / alpha - r] {
                if s > 0.0 && s < 1.0 {
                    let c = cost(s);
                    if c < best.0 {
                        best = (c, s);
                    }
                }
            }
        }
    }
    best
}

#[inline]
fn mix(gx: [f64; 3], ga: [f64; 3], gb: [f64; 3], s: f64) -> [f64; 3] {
    let m = |c: usize| 0.5 * (gx[c] + (1.0 - s) * ga[c] + s * gb[c]);
    [m(0), m(1), m(2)]
}

fn node_update(grid: &MetricGrid, dist: &[f64], known: &[bool], x: usize) -> f64 {
    let h = grid.h();
    let gx = grid.tensor(x);
    let nb = |di: isize, dj: isize| match grid.step(x, di, dj) {
        Step::Node(q) if known[q] => Some(q),
        _ => None,
    };
    let mut best = f64::INFINITY;
    for &(di, dj) in &N8 {
        if let Some(q) = nb(di, dj) {
            let g = grid.tensor_mid(x, q);
            best = best.min(dist[q] + grid.vec_len(g, di as f64, dj as f64));
        }
    }
    for &(ai, aj) in &N4 {
        let Some(qa) = nb(ai, aj) else { continue };
        // The two diagonals adjacent to this axis direction.
        for (bi, bj) in [(ai - aj, aj + ai), (ai + aj, aj - ai)] {
            let Some(qb) = nb(bi, bj) else { continue };
            let (ga, gb) = (grid.tensor(qa), grid.tensor(qb));
            let (pa, pb) = ([ai as f64, aj as f64], [bi as f64, bj as f64]);
            // The metric is taken at the midpoint of the update path, which
            // depends on the crossing point; two fixed-point passes suffice.
            let mut s = 0.5;
            let mut t = f64::INFINITY;
            for _ in 0..3 {
                let (tv, sv) = triangle_update(dist[qa], dist[qb], pa, pb, mix(gx, ga, gb, s), h);
                t = tv;
                if (sv - s).abs() < 1e-9 {
                    break;
                }
                s = sv;
            }
            best = best.min(t);
        }
    }
    best
}

/// Fast marching from initial values over the nodes where `allowed` holds.
/// Unreached nodes keep `+∞`.
pub(crate) fn fast_march(grid: &MetricGrid, init: &[(usize, f64)], allowed: &[bool]) -> Vec<f64> {
    let n = grid.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut known = vec![false; n];
    let mut heap = BinaryHeap::new();
    for &(k, v) in init {
        if allowed[k] && v < dist[k] {
            dist[k] = v;
            heap.push(Entry(v, k));
        }
    }
    while let Some(Entry(d, p)) = heap.pop() {
        if known[p] || d > dist[p] {
            continue;
        }
        known[p] = true;
        for &(di, dj) in &N8 {
            if let Step::Node(q) = grid.step(p, di, dj) {
                if allowed[q] && !known[q] {
                    let t = node_update(grid, &dist, &known, q);
                    if t < dist[q] {
                        dist[q] = t;
                        heap.push(Entry(t, q));
                    }
                }
            }
        }
    }
    dist
}

fn to_field(grid: &MetricGrid, dist: Vec<f64>) -> ScalarField {
    let defined = dist.iter().map(|d| d.is_finite()).collect();
    ScalarField::with_mask(grid, dist, defined).expect("sizes match")
}

/// Geodesic distance to `source` (zero on it). Nodes not connected to the
/// source inside the domain are left undefined.
pub fn distance_transform(grid: &MetricGrid, source: &Region) -> Result<ScalarField> {
    source.check(grid)?;
    if source.is_empty() {
        return Err(Error::EmptySource);
    }
    let init: Vec<_> = source.indices().map(|k| (k, 0.0)).collect();
    Ok(to_field(grid, fast_march(grid, &init, grid.domain_mask())))
}

/// Signed distance to the interface between `region` and its in-domain
/// complement: negative inside, positive outside.
pub fn signed_distance(grid: &MetricGrid, region: &Region) -> Result<ScalarField> {
    signed_distance_impl(grid, region, false)
}

/// Like [`signed_distance`], but the edge of the manifold also counts as
/// boundary of the region, so a region touching the edge is eroded from it
/// too. A full region has a boundary here unless the manifold is closed.
pub fn signed_distance_to_outline(grid: &MetricGrid, region: &Region) -> Result<ScalarField> {
    signed_distance_impl(grid, region, true)
}

fn signed_distance_impl(grid: &MetricGrid, region: &Region, edge: bool) -> Result<ScalarField> {
    region.check(grid)?;
    if region.is_empty() {
        return Err(Error::NoBoundary);
    }
    let n = grid.len();
    let mut seed_in = Vec::new();
    let mut seed_out = Vec::new();
    for p in 0..n {
        if !grid.in_domain(p) {
            continue;
        }
        let inside = region.contains(p);
        let mut best = f64::INFINITY;
        for &(di, dj) in &N8 {
            let half = match grid.step(p, di, dj) {
                Step::Node(q) if region.contains(q) != inside => {
                    0.5 * grid.vec_len(grid.tensor_mid(p, q), di as f64, dj as f64)
                }
                Step::Exterior if edge && inside => 0.5 * grid.vec_len(grid.tensor(p), di as f64, dj as f64),
                _ => continue,
            };
            best = best.min(half);
        }
        if best.is_finite() {
            if inside {
                seed_in.push((p, best));
            } else {
                seed_out.push((p, best));
            }
        }
    }
    if seed_in.is_empty() {
        return Err(Error::NoBoundary);
    }
    let comp = region.complement(grid);
    let d_in = fast_march(grid, &seed_in, region.mask());
    let d_out = fast_march(grid, &seed_out, comp.mask());
    let vals = (0..n)
        .map(|k| if region.contains(k) { -d_in[k] } else { d_out[k] })
        .collect();
    Ok(to_field(grid, vals))
}

/// Signed distance to the level curve `{f = level}`, negative where
/// `f < level`. Nodes next to a crossing are seeded with sub-cell estimates
/// `|f − level| / |∇f|_g`, capped by the linearly interpolated crossing along
/// each grid edge.
pub fn level_set_distance(grid: &MetricGrid, f: &ScalarField, level: f64) -> Result<ScalarField> {
    f.check(grid)?;
    let n = grid.len();
    let mut init = Vec::new();
    for p in 0..n {
        let Some(fp) = f.get(p) else { continue };
        let a = fp - level;
        let mut cap = f64::INFINITY;
        for &(di, dj) in &N8 {
            let Step::Node(q) = grid.step(p, di, dj) else { continue };
            let Some(fq) = f.get(q) else { continue };
            let b = fq - level;
            if (a < 0.0) != (b < 0.0) {
                let theta = a / (a - b);
                cap = cap.min(theta * grid.vec_len(grid.tensor_mid(p, q), di as f64, dj as f64));
            }
        }
        if cap.is_finite() {
            let est = grad_norm(grid, f, p).filter(|&g| g > 0.0).map_or(cap, |g| a.abs() / g);
            init.push((p, est.min(cap)));
        }
    }
    if init.is_empty() {
        return Err(Error::NoBoundary);
    }
    let dist = fast_march(grid, &init, f.defined_mask());
    let vals = (0..n).map(|k| if f.at(k) < level { -dist[k] } else { dist[k] }).collect();
    Ok(to_field(grid, vals))
}
