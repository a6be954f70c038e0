//! Test geometries: flat, conformal, hyperbolic, warped cylinders, tori.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Metric, MetricGrid, Topology};
use crate::io;

/// Warping function `w(t)` of `dt² + w(t)² dθ²`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Warp {
    Cosh,
    Exp,
    ExpNeg,
    Flat,
    /// Piecewise-linear `(t, w)` samples, sorted by `t`.
    Table { points: Vec<[f64; 2]> },
}

impl Warp {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Warp::Cosh => t.cosh(),
            Warp::Exp => t.exp(),
            Warp::ExpNeg => (-t).exp(),
            Warp::Flat => 1.0,
            Warp::Table { points } => interpolate(points, t),
        }
    }
}

fn interpolate(points: &[[f64; 2]], t: f64) -> f64 {
    match points {
        [] => f64::NAN,
        [p] => p[1],
        _ => {
            let k = points.partition_point(|p| p[0] <= t).clamp(1, points.len() - 1);
            let (a, b) = (points[k - 1], points[k]);
            let s = (t - a[0]) / (b[0] - a[0]);
            a[1] + s * (b[1] - a[1])
        }
    }
}

/// A smooth bump added to a flat conformal factor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bump {
    pub center: [f64; 2],
    pub radius: f64,
    pub amplitude: f64,
}

/// Named generator with its parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum MetricSpec {
    /// λ ≡ 1 on `n × n` nodes spanning `[−half_width, half_width]²`,
    /// optionally restricted to the disk of radius `disk_radius`.
    Euclidean { n: usize, half_width: f64, disk_radius: Option<f64> },
    /// Radial conformal factor from a piecewise-linear `(r, λ)` table.
    ConformalRadial { n: usize, half_width: f64, profile: Vec<[f64; 2]>, disk_radius: Option<f64> },
    /// λ = 2 / (1 − r²) restricted to `r ≤ disk_radius` (default
    /// `half_width`).
    PoincareDisk { n: usize, half_width: f64, disk_radius: Option<f64> },
    /// `dt² + w(t)² dθ²` for `t ∈ [t_min, t_max]` on `nt` rows, θ periodic
    /// with `ntheta` columns and period `period` (default 2π).
    WarpedCylinder { warp: Warp, t_min: f64, t_max: f64, nt: usize, ntheta: usize, period: Option<f64> },
    /// Flat torus with `nx × ny` nodes of spacing `h`.
    FlatTorus { nx: usize, ny: usize, h: f64 },
    /// `λ = 1 + Σ bumps` on a square grid.
    PerturbedFlat { n: usize, half_width: f64, topology: Topology, bumps: Vec<Bump> },
    /// Metric read from a metric CSV file.
    Csv { path: String },
}

fn square(n: usize, half: f64) -> Result<(f64, [f64; 2])> {
    if n < 4 || !(half > 0.0) {
        return Err(Error::InvalidGrid(format!("bad square grid n={n}, half_width={half}")));
    }
    Ok((2.0 * half / (n - 1) as f64, [-half, -half]))
}

fn radial(n: usize, half: f64, disk: Option<f64>, lambda: impl Fn(f64) -> f64) -> Result<MetricGrid> {
    let (h, o) = square(n, half)?;
    let mut l = Vec::with_capacity(n * n);
    let mut dom = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            let (x, y) = (o[0] + i as f64 * h, o[1] + j as f64 * h);
            let r = (x * x + y * y).sqrt();
            let inside = disk.map_or(true, |rad| r <= rad + 1e-12);
            dom.push(inside);
            l.push(if inside { lambda(r) } else { 1.0 });
        }
    }
    MetricGrid::new(n, n, h, o, Topology::Plane, Metric::Conformal(l), Some(dom))
}

/// Builds the grid described by `spec`.
pub fn generate_metric(spec: &MetricSpec) -> Result<MetricGrid> {
    match spec {
        MetricSpec::Euclidean { n, half_width, disk_radius } => radial(*n, *half_width, *disk_radius, |_| 1.0),
        MetricSpec::ConformalRadial { n, half_width, profile, disk_radius } => {
            if profile.is_empty() {
                return Err(Error::DegenerateMetric("empty radial profile".into()));
            }
            radial(*n, *half_width, *disk_radius, |r| interpolate(profile, r))
        }
        MetricSpec::PoincareDisk { n, half_width, disk_radius } => {
            let rad = disk_radius.unwrap_or(*half_width);
            if rad >= 1.0 {
                return Err(Error::DegenerateMetric("Poincaré patch must stay inside the unit disk".into()));
            }
            radial(*n, *half_width, Some(rad), |r| 2.0 / (1.0 - r * r))
        }
        MetricSpec::WarpedCylinder { warp, t_min, t_max, nt, ntheta, period } => {
            warped_cylinder(warp, *t_min, *t_max, *nt, *ntheta, period.unwrap_or(2.0 * std::f64::consts::PI))
        }
        MetricSpec::FlatTorus { nx, ny, h } => MetricGrid::euclidean(*nx, *ny, *h, [0.0, 0.0], Topology::Torus),
        MetricSpec::PerturbedFlat { n, half_width, topology, bumps } => {
            let (h, o) = square(*n, *half_width)?;
            let l = (0..n * n)
                .map(|k| {
                    let (x, y) = (o[0] + (k % n) as f64 * h, o[1] + (k / n) as f64 * h);
                    1.0 + bumps
                        .iter()
                        .map(|b| {
                            let s2 = ((x - b.center[0]).powi(2) + (y - b.center[1]).powi(2)) / (b.radius * b.radius);
                            if s2 < 1.0 {
                                b.amplitude * (1.0 - s2).powi(3)
                            } else {
                                0.0
                            }
                        })
                        .sum::<f64>()
                })
                .collect();
            MetricGrid::new(*n, *n, h, o, *topology, Metric::Conformal(l), None)
        }
        MetricSpec::Csv { path } => io::read_metric_csv(std::path::Path::new(path)),
    }
}

/// Warped cylinder with x the scaled angle and y = t. Cells are square in
/// grid units; the θ-scale `s = period / (ntheta·h)` enters the metric.
pub fn warped_cylinder(warp: &Warp, t_min: f64, t_max: f64, nt: usize, ntheta: usize, period: f64) -> Result<MetricGrid> {
    if nt < 4 || ntheta < 4 || !(t_max > t_min) || !(period > 0.0) {
        return Err(Error::InvalidGrid("bad warped cylinder parameters".into()));
    }
    let h = (t_max - t_min) / (nt - 1) as f64;
    let s = period / (ntheta as f64 * h);
    let mut g = Vec::with_capacity(nt * ntheta);
    for j in 0..nt {
        let w = warp.eval(t_min + j as f64 * h);
        if !(w > 0.0 && w.is_finite()) {
            return Err(Error::DegenerateMetric(format!("warp {w} at row {j}")));
        }
        for _ in 0..ntheta {
            g.push([s * s * w * w, 0.0, 1.0]);
        }
    }
    MetricGrid::new(ntheta, nt, h, [0.0, t_min], Topology::Cylinder, Metric::Tensor(g), None)
}

/// Number of θ columns giving nearly square cells for a given row count.
pub fn square_theta_columns(t_min: f64, t_max: f64, nt: usize, period: f64) -> usize {
    let h = (t_max - t_min) / (nt - 1) as f64;
    ((period / h).round() as usize).max(4)
}
