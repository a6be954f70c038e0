//! Node grids carrying a Riemannian metric, plus the two per-node containers
//! (`Region`, `ScalarField`) every other module works with.
//!
//! Nodes are indexed row-major, `idx = j * nx + i`, with node `(i, j)` at
//! `origin + h * (i, j)`. Each node stands for the `h × h` cell centred on it,
//! so interfaces between an inside and an outside node sit at the midpoint.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Axis neighbours, in counter-clockwise order starting east.
pub const N4: [(isize, isize); 4] = [(1, 0), (0, 1), (-1, 0), (0, -1)];
/// The 8-neighbour ring, counter-clockwise starting east.
pub const N8: [(isize, isize); 8] = [
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
    (-1, 0),
    (-1, -1),
    (0, -1),
    (1, -1),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Topology {
    Plane,
    /// Periodic in x.
    Cylinder,
    /// Periodic in x and y.
    Torus,
}

impl Topology {
    pub fn periodic_x(self) -> bool {
        matches!(self, Topology::Cylinder | Topology::Torus)
    }

    pub fn periodic_y(self) -> bool {
        matches!(self, Topology::Torus)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Topology::Plane => "plane",
            Topology::Cylinder => "cylinder",
            Topology::Torus => "torus",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "plane" => Ok(Topology::Plane),
            "cylinder" => Ok(Topology::Cylinder),
            "torus" => Ok(Topology::Torus),
            other => Err(Error::Parse(format!("unknown topology '{other}'"))),
        }
    }
}

/// Per-node metric data. Tensors are stored as `[g11, g12, g22]`.
#[derive(Clone, Debug, PartialEq)]
pub enum Metric {
    /// Conformal factor λ: the metric is λ²(dx² + dy²).
    Conformal(Vec<f64>),
    Tensor(Vec<[f64; 3]>),
}

impl Metric {
    fn len(&self) -> usize {
        match self {
            Metric::Conformal(v) => v.len(),
            Metric::Tensor(v) => v.len(),
        }
    }

    pub fn is_tensor(&self) -> bool {
        matches!(self, Metric::Tensor(_))
    }
}

/// Result of stepping from a node by an offset.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Step {
    Node(usize),
    /// Off the grid in a non-periodic direction, or onto a node outside the
    /// domain mask.
    Exterior,
}

/// The discrete manifold: a node grid, a metric per node and a domain mask.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricGrid {
    nx: usize,
    ny: usize,
    h: f64,
    origin: [f64; 2],
    topology: Topology,
    metric: Metric,
    domain: Vec<bool>,
}

impl MetricGrid {
    /// Validates and assembles a grid. Metric values outside the domain mask
    /// are ignored and replaced by the identity.
    pub fn new(
        nx: usize,
        ny: usize,
        h: f64,
        origin: [f64; 2],
        topology: Topology,
        metric: Metric,
        domain: Option<Vec<bool>>,
    ) -> Result<Self> {
        if nx < 4 || ny < 4 {
            return Err(Error::InvalidGrid(format!("need nx, ny >= 4, got {nx}x{ny}")));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidGrid(format!("spacing must be positive, got {h}")));
        }
        let n = nx * ny;
        if metric.len() != n {
            return Err(Error::InvalidGrid(format!(
                "metric has {} entries, grid has {n}",
                metric.len()
            )));
        }
        let domain = domain.unwrap_or_else(|| vec![true; n]);
        if domain.len() != n {
            return Err(Error::InvalidGrid("domain mask size mismatch".into()));
        }
        let metric = match metric {
            Metric::Conformal(mut v) => {
                for (k, l) in v.iter_mut().enumerate() {
                    if domain[k] {
                        if !(*l > 0.0 && l.is_finite()) {
                            return Err(Error::DegenerateMetric(format!(
                                "conformal factor {l} at node {k}"
                            )));
                        }
                    } else {
                        *l = 1.0;
                    }
                }
                Metric::Conformal(v)
            }
            Metric::Tensor(mut v) => {
                for (k, g) in v.iter_mut().enumerate() {
                    if domain[k] {
                        let det = g[0] * g[2] - g[1] * g[1];
                        let ok = g.iter().all(|x| x.is_finite()) && g[0] > 0.0 && det > 0.0;
                        if !ok {
                            return Err(Error::DegenerateMetric(format!(
                                "tensor {g:?} at node {k} is not positive definite"
                            )));
                        }
                    } else {
                        *g = [1.0, 0.0, 1.0];
                    }
                }
                Metric::Tensor(v)
            }
        };
        Ok(MetricGrid { nx, ny, h, origin, topology, metric, domain })
    }

    /// Flat metric on an `nx × ny` grid.
    pub fn euclidean(nx: usize, ny: usize, h: f64, origin: [f64; 2], topology: Topology) -> Result<Self> {
        Self::new(nx, ny, h, origin, topology, Metric::Conformal(vec![1.0; nx * ny]), None)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn ny(&self) -> usize {
        self.ny
    }
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
    pub fn h(&self) -> f64 {
        self.h
    }
    pub fn origin(&self) -> [f64; 2] {
        self.origin
    }
    pub fn topology(&self) -> Topology {
        self.topology
    }
    pub fn metric(&self) -> &Metric {
        &self.metric
    }
    pub fn domain_mask(&self) -> &[bool] {
        &self.domain
    }
    pub fn in_domain(&self, idx: usize) -> bool {
        self.domain[idx]
    }
    pub fn domain_count(&self) -> usize {
        self.domain.iter().filter(|&&b| b).count()
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }
    #[inline]
    pub fn ij(&self, idx: usize) -> (usize, usize) {
        (idx % self.nx, idx / self.nx)
    }
    pub fn coords(&self, idx: usize) -> [f64; 2] {
        let (i, j) = self.ij(idx);
        [self.origin[0] + i as f64 * self.h, self.origin[1] + j as f64 * self.h]
    }

    /// Grid step with wrap-around; `None` when leaving a non-periodic side.
    #[inline]
    pub fn offset(&self, idx: usize, di: isize, dj: isize) -> Option<usize> {
        let (i, j) = self.ij(idx);
        let wrap = |v: isize, n: usize, periodic: bool| -> Option<usize> {
            if periodic {
                Some(v.rem_euclid(n as isize) as usize)
            } else if v < 0 || v >= n as isize {
                None
            } else {
                Some(v as usize)
            }
        };
        let ii = wrap(i as isize + di, self.nx, self.topology.periodic_x())?;
        let jj = wrap(j as isize + dj, self.ny, self.topology.periodic_y())?;
        Some(jj * self.nx + ii)
    }

    /// Like `offset`, but nodes outside the domain mask count as exterior.
    #[inline]
    pub fn step(&self, idx: usize, di: isize, dj: isize) -> Step {
        match self.offset(idx, di, dj) {
            Some(k) if self.domain[k] => Step::Node(k),
            _ => Step::Exterior,
        }
    }

    /// True when every node of the 3×3 block around `idx` is in the domain.
    pub fn full_stencil(&self, idx: usize) -> bool {
        self.domain[idx] && N8.iter().all(|&(di, dj)| matches!(self.step(idx, di, dj), Step::Node(_)))
    }

    /// True when some node of the domain has an exterior 4-neighbour.
    pub fn has_edge(&self) -> bool {
        (0..self.len()).any(|k| {
            self.domain[k] && N4.iter().any(|&(di, dj)| self.step(k, di, dj) == Step::Exterior)
        })
    }

    /// Metric tensor `[g11, g12, g22]` at a node.
    #[inline]
    pub fn tensor(&self, idx: usize) -> [f64; 3] {
        match &self.metric {
            Metric::Conformal(l) => {
                let s = l[idx] * l[idx];
                [s, 0.0, s]
            }
            Metric::Tensor(g) => g[idx],
        }
    }

    /// Mean of the tensors at two nodes.
    #[inline]
    pub fn tensor_mid(&self, a: usize, b: usize) -> [f64; 3] {
        let (ga, gb) = (self.tensor(a), self.tensor(b));
        [(ga[0] + gb[0]) * 0.5, (ga[1] + gb[1]) * 0.5, (ga[2] + gb[2]) * 0.5]
    }

    #[inline]
    pub fn sqrt_det(&self, idx: usize) -> f64 {
        match &self.metric {
            Metric::Conformal(l) => l[idx] * l[idx],
            Metric::Tensor(g) => {
                let g = g[idx];
                (g[0] * g[2] - g[1] * g[1]).sqrt()
            }
        }
    }

    /// Riemannian area of the cell around a domain node.
    pub fn cell_area(&self, idx: usize) -> Result<f64> {
        if idx >= self.len() || !self.domain[idx] {
            return Err(Error::OutsideDomain);
        }
        Ok(self.area_weight(idx))
    }

    /// `cell_area` without the domain check.
    #[inline]
    pub fn area_weight(&self, idx: usize) -> f64 {
        self.sqrt_det(idx) * self.h * self.h
    }

    /// Metric length of the grid vector `(di, dj)·h` using tensor `g`.
    #[inline]
    pub fn vec_len(&self, g: [f64; 3], di: f64, dj: f64) -> f64 {
        quad(g, di, dj).sqrt() * self.h
    }

    /// Copy of this grid with another domain mask.
    pub fn with_domain(&self, domain: Vec<bool>) -> Result<Self> {
        Self::new(self.nx, self.ny, self.h, self.origin, self.topology, self.metric.clone(), Some(domain))
    }

    /// Copy of this grid with another topology (e.g. a torus opened to a
    /// cylinder).
    pub fn with_topology(&self, topology: Topology) -> Self {
        let mut g = self.clone();
        g.topology = topology;
        g
    }

    /// Swaps the roles of x and y. Cylinders cannot be transposed since
    /// periodicity is only supported along x.
    pub fn transposed(&self) -> Result<Self> {
        if self.topology == Topology::Cylinder {
            return Err(Error::UnsupportedCombination("transposing a cylinder".into()));
        }
        let (nx, ny) = (self.ny, self.nx);
        let src = |i: usize, j: usize| i * self.nx + j;
        let mut domain = vec![false; nx * ny];
        for j in 0..ny {
            for i in 0..nx {
                domain[j * nx + i] = self.domain[src(i, j)];
            }
        }
        let metric = match &self.metric {
            Metric::Conformal(l) => {
                let mut v = vec![0.0; nx * ny];
                for j in 0..ny {
                    for i in 0..nx {
                        v[j * nx + i] = l[src(i, j)];
                    }
                }
                Metric::Conformal(v)
            }
            Metric::Tensor(g) => {
                let mut v = vec![[0.0; 3]; nx * ny];
                for j in 0..ny {
                    for i in 0..nx {
                        let t = g[src(i, j)];
                        v[j * nx + i] = [t[2], t[1], t[0]];
                    }
                }
                Metric::Tensor(v)
            }
        };
        Self::new(nx, ny, self.h, [self.origin[1], self.origin[0]], self.topology, metric, Some(domain))
    }
}

#[inline]
pub(crate) fn quad(g: [f64; 3], a: f64, b: f64) -> f64 {
    g[0] * a * a + 2.0 * g[1] * a * b + g[2] * b * b
}

/// A set of domain nodes (cells).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Region {
    nx: usize,
    ny: usize,
    mask: Vec<bool>,
}

impl Region {
    pub fn empty(grid: &MetricGrid) -> Self {
        Region { nx: grid.nx, ny: grid.ny, mask: vec![false; grid.len()] }
    }

    /// The whole domain.
    pub fn domain(grid: &MetricGrid) -> Self {
        Region { nx: grid.nx, ny: grid.ny, mask: grid.domain.clone() }
    }

    /// Nodes of the domain whose coordinates satisfy `pred`.
    pub fn from_fn(grid: &MetricGrid, mut pred: impl FnMut([f64; 2]) -> bool) -> Self {
        let mask = (0..grid.len()).map(|k| grid.domain[k] && pred(grid.coords(k))).collect();
        Region { nx: grid.nx, ny: grid.ny, mask }
    }

    /// Nodes of the domain whose `(i, j)` satisfy `pred`.
    pub fn from_ij(grid: &MetricGrid, mut pred: impl FnMut(usize, usize) -> bool) -> Self {
        let mask = (0..grid.len())
            .map(|k| {
                let (i, j) = grid.ij(k);
                grid.domain[k] && pred(i, j)
            })
            .collect();
        Region { nx: grid.nx, ny: grid.ny, mask }
    }

    /// Wraps a raw mask, rejecting cells outside the domain.
    pub fn from_mask(grid: &MetricGrid, mask: Vec<bool>) -> Result<Self> {
        if mask.len() != grid.len() {
            return Err(Error::ShapeMismatch(format!("mask has {} cells, grid {}", mask.len(), grid.len())));
        }
        if mask.iter().zip(&grid.domain).any(|(&m, &d)| m && !d) {
            return Err(Error::OutsideDomain);
        }
        Ok(Region { nx: grid.nx, ny: grid.ny, mask })
    }

    pub fn from_indices(grid: &MetricGrid, idx: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut r = Region::empty(grid);
        for k in idx {
            if k >= grid.len() || !grid.domain[k] {
                return Err(Error::OutsideDomain);
            }
            r.mask[k] = true;
        }
        Ok(r)
    }

    pub(crate) fn from_parts(nx: usize, ny: usize, mask: Vec<bool>) -> Self {
        debug_assert_eq!(mask.len(), nx * ny);
        Region { nx, ny, mask }
    }

    pub fn check(&self, grid: &MetricGrid) -> Result<()> {
        if self.nx != grid.nx || self.ny != grid.ny {
            return Err(Error::ShapeMismatch(format!(
                "region {}x{} on grid {}x{}",
                self.nx, self.ny, grid.nx, grid.ny
            )));
        }
        Ok(())
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }
    pub fn mask(&self) -> &[bool] {
        &self.mask
    }
    #[inline]
    pub fn contains(&self, idx: usize) -> bool {
        self.mask[idx]
    }
    pub fn set(&mut self, idx: usize, v: bool) {
        self.mask[idx] = v;
    }
    pub fn count(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }
    pub fn is_empty(&self) -> bool {
        !self.mask.iter().any(|&b| b)
    }
    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.mask.iter().enumerate().filter(|(_, &b)| b).map(|(k, _)| k)
    }

    fn zip(&self, other: &Region, f: impl Fn(bool, bool) -> bool) -> Region {
        assert_eq!(self.mask.len(), other.mask.len(), "regions on different grids");
        Region {
            nx: self.nx,
            ny: self.ny,
            mask: self.mask.iter().zip(&other.mask).map(|(&a, &b)| f(a, b)).collect(),
        }
    }
    pub fn union(&self, other: &Region) -> Region {
        self.zip(other, |a, b| a || b)
    }
    pub fn intersection(&self, other: &Region) -> Region {
        self.zip(other, |a, b| a && b)
    }
    pub fn difference(&self, other: &Region) -> Region {
        self.zip(other, |a, b| a && !b)
    }
    pub fn is_subset(&self, other: &Region) -> bool {
        self.mask.iter().zip(&other.mask).all(|(&a, &b)| !a || b)
    }
    pub fn is_disjoint(&self, other: &Region) -> bool {
        self.mask.iter().zip(&other.mask).all(|(&a, &b)| !(a && b))
    }

    /// Domain nodes not in the region.
    pub fn complement(&self, grid: &MetricGrid) -> Region {
        Region {
            nx: self.nx,
            ny: self.ny,
            mask: self.mask.iter().zip(&grid.domain).map(|(&a, &d)| d && !a).collect(),
        }
    }

    /// True when the region is the entire domain.
    pub fn is_full(&self, grid: &MetricGrid) -> bool {
        self.mask == grid.domain
    }

    /// Inside-adjacent layer of the interface with the in-domain complement
    /// (4-neighbourhood). Empty iff the region is empty or the whole domain.
    pub fn boundary_cells(&self, grid: &MetricGrid) -> Vec<usize> {
        self.indices()
            .filter(|&k| {
                N4.iter().any(|&(di, dj)| matches!(grid.step(k, di, dj), Step::Node(q) if !self.mask[q]))
            })
            .collect()
    }

    /// Boundary cells plus region cells touching the exterior: the discrete
    /// topological boundary of the region inside the manifold.
    pub fn outline(&self, grid: &MetricGrid) -> Vec<usize> {
        self.indices()
            .filter(|&k| {
                N4.iter().any(|&(di, dj)| match grid.step(k, di, dj) {
                    Step::Node(q) => !self.mask[q],
                    Step::Exterior => true,
                })
            })
            .collect()
    }

    /// Connected components under 8-adjacency (with wrap-around), ordered by
    /// smallest node index.
    pub fn components(&self, grid: &MetricGrid) -> Vec<Region> {
        let n = self.mask.len();
        let mut label = vec![usize::MAX; n];
        let mut out = Vec::new();
        let mut stack = Vec::new();
        for s in 0..n {
            if !self.mask[s] || label[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut comp = Region { nx: self.nx, ny: self.ny, mask: vec![false; n] };
            label[s] = id;
            stack.push(s);
            while let Some(p) = stack.pop() {
                comp.mask[p] = true;
                for &(di, dj) in &N8 {
                    if let Step::Node(q) = grid.step(p, di, dj) {
                        if self.mask[q] && label[q] == usize::MAX {
                            label[q] = id;
                            stack.push(q);
                        }
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    /// True when some 4-neighbour of a region cell lies in `other`, or the
    /// two overlap.
    pub fn touches(&self, grid: &MetricGrid, other: &Region) -> bool {
        self.indices().any(|k| {
            other.mask[k]
                || N4.iter().any(|&(di, dj)| matches!(grid.step(k, di, dj), Step::Node(q) if other.mask[q]))
        })
    }

    /// Region re-indexed for `grid.transposed()`.
    pub fn transposed(&self) -> Region {
        let (nx, ny) = (self.ny, self.nx);
        let mut mask = vec![false; nx * ny];
        for j in 0..ny {
            for i in 0..nx {
                mask[j * nx + i] = self.mask[i * self.nx + j];
            }
        }
        Region { nx, ny, mask }
    }
}

/// Real values per node with a definedness mask.
#[derive(Clone, Debug)]
pub struct ScalarField {
    nx: usize,
    ny: usize,
    values: Vec<f64>,
    defined: Vec<bool>,
}

/// Equal when the masks agree and defined values agree.
impl PartialEq for ScalarField {
    fn eq(&self, other: &Self) -> bool {
        self.nx == other.nx
            && self.ny == other.ny
            && self.defined == other.defined
            && self.values.iter().zip(&other.values).zip(&self.defined).all(|((a, b), &d)| !d || a == b)
    }
}

impl ScalarField {
    /// Values defined wherever they are finite and inside the domain.
    pub fn new(grid: &MetricGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::ShapeMismatch(format!("field has {} values, grid {}", values.len(), grid.len())));
        }
        let defined = values.iter().zip(&grid.domain).map(|(v, &d)| d && v.is_finite()).collect();
        Self::with_mask(grid, values, defined)
    }

    /// Explicit mask; undefined entries are stored as NaN.
    pub fn with_mask(grid: &MetricGrid, mut values: Vec<f64>, defined: Vec<bool>) -> Result<Self> {
        if values.len() != grid.len() || defined.len() != grid.len() {
            return Err(Error::ShapeMismatch("field size mismatch".into()));
        }
        let mut defined = defined;
        for k in 0..values.len() {
            defined[k] = defined[k] && grid.domain[k] && values[k].is_finite();
            if !defined[k] {
                values[k] = f64::NAN;
            }
        }
        Ok(ScalarField { nx: grid.nx, ny: grid.ny, values, defined })
    }

    pub fn from_fn(grid: &MetricGrid, mut f: impl FnMut([f64; 2]) -> f64) -> Self {
        let values = (0..grid.len())
            .map(|k| if grid.domain[k] { f(grid.coords(k)) } else { f64::NAN })
            .collect();
        Self::new(grid, values).expect("sizes match")
    }

    pub fn constant(grid: &MetricGrid, c: f64) -> Self {
        Self::from_fn(grid, |_| c)
    }

    pub fn check(&self, grid: &MetricGrid) -> Result<()> {
        if self.nx != grid.nx || self.ny != grid.ny {
            return Err(Error::ShapeMismatch(format!(
                "field {}x{} on grid {}x{}",
                self.nx, self.ny, grid.nx, grid.ny
            )));
        }
        Ok(())
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn defined_mask(&self) -> &[bool] {
        &self.defined
    }
    #[inline]
    pub fn is_defined(&self, idx: usize) -> bool {
        self.defined[idx]
    }
    #[inline]
    pub fn get(&self, idx: usize) -> Option<f64> {
        if self.defined[idx] {
            Some(self.values[idx])
        } else {
            None
        }
    }
    /// Raw value (NaN or garbage where undefined).
    #[inline]
    pub fn at(&self, idx: usize) -> f64 {
        self.values[idx]
    }

    /// Minimum and maximum over defined nodes.
    pub fn range(&self) -> Option<(f64, f64)> {
        let mut it = self.values.iter().zip(&self.defined).filter(|(_, &d)| d).map(|(&v, _)| v);
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), v| (lo.min(v), hi.max(v))))
    }

    /// Applies `f` to defined values.
    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> ScalarField {
        let values = self
            .values
            .iter()
            .zip(&self.defined)
            .map(|(&v, &d)| if d { f(v) } else { f64::NAN })
            .collect();
        ScalarField { nx: self.nx, ny: self.ny, values, defined: self.defined.clone() }
    }

    /// `{f ≤ c}` over defined nodes.
    pub fn sublevel(&self, c: f64) -> Region {
        let mask = self.values.iter().zip(&self.defined).map(|(&v, &d)| d && v <= c).collect();
        Region { nx: self.nx, ny: self.ny, mask }
    }

    /// Number of defined nodes.
    pub fn defined_count(&self) -> usize {
        self.defined.iter().filter(|&&d| d).count()
    }

    pub fn transposed(&self) -> ScalarField {
        let (nx, ny) = (self.ny, self.nx);
        let mut values = vec![f64::NAN; nx * ny];
        let mut defined = vec![false; nx * ny];
        for j in 0..ny {
            for i in 0..nx {
                values[j * nx + i] = self.values[i * self.nx + j];
                defined[j * nx + i] = self.defined[i * self.nx + j];
            }
        }
        ScalarField { nx, ny, values, defined }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat(n: usize, topo: Topology) -> MetricGrid {
        MetricGrid::euclidean(n, n, 0.1, [0.0, 0.0], topo).unwrap()
    }

    #[test]
    fn cell_area_scales() {
        let g = flat(8, Topology::Plane);
        assert!((g.cell_area(3).unwrap() - 0.01).abs() < 1e-15);
        let c = MetricGrid::new(8, 8, 0.1, [0.0; 2], Topology::Plane, Metric::Conformal(vec![2.0; 64]), None).unwrap();
        assert!((c.cell_area(3).unwrap() - 0.04).abs() < 1e-15);
        let t = MetricGrid::new(8, 8, 0.1, [0.0; 2], Topology::Plane, Metric::Tensor(vec![[4.0, 0.0, 1.0]; 64]), None)
            .unwrap();
        assert!((t.cell_area(3).unwrap() - 0.02).abs() < 1e-15);
    }

    #[test]
    fn cell_outside_domain_rejected() {
        let mut dom = vec![true; 64];
        dom[5] = false;
        let g = flat(8, Topology::Plane).with_domain(dom).unwrap();
        assert_eq!(g.cell_area(5), Err(Error::OutsideDomain));
        assert_eq!(g.cell_area(1000), Err(Error::OutsideDomain));
    }

    #[test]
    fn degenerate_metric_rejected() {
        let mut l = vec![1.0; 64];
        l[9] = 0.0;
        let e = MetricGrid::new(8, 8, 0.1, [0.0; 2], Topology::Plane, Metric::Conformal(l), None).unwrap_err();
        assert!(matches!(e, Error::DegenerateMetric(_)));
        let e = MetricGrid::new(8, 8, 0.1, [0.0; 2], Topology::Plane, Metric::Tensor(vec![[1.0, 2.0, 1.0]; 64]), None)
            .unwrap_err();
        assert!(matches!(e, Error::DegenerateMetric(_)));
        assert!(MetricGrid::euclidean(3, 8, 0.1, [0.0; 2], Topology::Plane).is_err());
    }

    #[test]
    fn wrap_steps() {
        let g = flat(5, Topology::Cylinder);
        let k = g.index(4, 2);
        assert_eq!(g.step(k, 1, 0), Step::Node(g.index(0, 2)));
        assert_eq!(g.step(g.index(0, 4), 0, 1), Step::Exterior);
        let t = flat(5, Topology::Torus);
        assert_eq!(t.step(t.index(0, 4), -1, 1), Step::Node(t.index(4, 0)));
    }

    #[test]
    fn boundary_cells_empty_iff_trivial() {
        let g = flat(8, Topology::Plane);
        assert!(Region::empty(&g).boundary_cells(&g).is_empty());
        assert!(Region::domain(&g).boundary_cells(&g).is_empty());
        let r = Region::from_ij(&g, |i, j| i < 3 && j < 3);
        assert_eq!(r.boundary_cells(&g).len(), 5);
        assert_eq!(r.outline(&g).len(), 9 - 1);
    }

    #[test]
    fn components_wrap_on_torus() {
        let g = flat(8, Topology::Torus);
        let r = Region::from_ij(&g, |i, _| i == 0 || i == 7);
        assert_eq!(r.components(&g).len(), 1);
        let p = flat(8, Topology::Plane);
        let r = Region::from_ij(&p, |i, _| i == 0 || i == 7);
        assert_eq!(r.components(&p).len(), 2);
    }

    #[test]
    fn transpose_round_trip() {
        let g = MetricGrid::new(
            5,
            7,
            0.1,
            [0.0; 2],
            Topology::Plane,
            Metric::Tensor((0..35).map(|k| [1.0 + k as f64, 0.1, 2.0]).collect()),
            None,
        )
        .unwrap();
        let t = g.transposed().unwrap();
        assert_eq!(t.nx(), 7);
        assert_eq!(t.tensor(t.index(2, 1)), {
            let s = g.tensor(g.index(1, 2));
            [s[2], s[1], s[0]]
        });
        assert_eq!(t.transposed().unwrap(), g);
        let r = Region::from_ij(&g, |i, j| i == 1 && j == 4);
        assert!(r.transposed().contains(t.index(4, 1)));
    }

    #[test]
    fn field_sublevel_and_range() {
        let g = flat(6, Topology::Plane);
        let f = ScalarField::from_fn(&g, |[x, y]| x + y);
        let (lo, hi) = f.range().unwrap();
        assert_eq!(lo, 0.0);
        assert!((hi - 1.0).abs() < 1e-12);
        assert_eq!(f.sublevel(0.05).count(), 1);
    }
}
