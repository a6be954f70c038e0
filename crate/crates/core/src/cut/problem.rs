//! Constrained minimization of `Per(U) − Σ_U φ·dA` by a single s–t min-cut.
//!
//! All weights are quantized to integers on a power-of-two scale chosen per
//! problem, so the reported energy is an exact function of the mask and the
//! identity `energy = perimeter − weighted_area` holds bit for bit.

use serde::{Deserialize, Serialize};

use crate::cut::graph::CutGraph;
use crate::cut::maxflow::FlowNetwork;
use crate::error::{Error, Result};
use crate::grid::{Region, ScalarField};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MinimizerChoice {
    Minimal,
    Maximal,
}

#[derive(Clone, Debug)]
pub struct CutProblem<'g> {
    pub graph: &'g CutGraph,
    /// Prescription per node; must be defined on every domain node outside
    /// `must_exclude`.
    pub phi: ScalarField,
    pub must_include: Region,
    pub must_exclude: Region,
    pub choice: MinimizerChoice,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CutSolution {
    pub region: Region,
    pub energy: f64,
    pub perimeter: f64,
    pub weighted_area: f64,
    /// Energy in quantized units (`energy · scale`).
    pub energy_units: i64,
    pub scale: f64,
}

/// The integer energy a problem is solved against.
#[derive(Clone, Debug)]
pub struct QuantizedEnergy {
    pub scale: f64,
    pub edges: Vec<(usize, usize, i64)>,
    pub exterior: Vec<i64>,
    /// `round(φ·area·scale)` per node; zero where φ is undefined.
    pub unary: Vec<i64>,
}

impl QuantizedEnergy {
    pub fn perimeter_units(&self, mask: &[bool]) -> i64 {
        let inner: i64 = self.edges.iter().filter(|e| mask[e.0] != mask[e.1]).map(|e| e.2).sum();
        let outer: i64 = (0..mask.len()).filter(|&k| mask[k]).map(|k| self.exterior[k]).sum();
        inner + outer
    }

    pub fn area_units(&self, mask: &[bool]) -> i64 {
        (0..mask.len()).filter(|&k| mask[k]).map(|k| self.unary[k]).sum()
    }

    pub fn energy_units(&self, mask: &[bool]) -> i64 {
        self.perimeter_units(mask) - self.area_units(mask)
    }
}

impl<'g> CutProblem<'g> {
    /// Unconstrained problem with the minimal choice.
    pub fn new(graph: &'g CutGraph, phi: ScalarField) -> Self {
        let (nx, ny) = graph.dims();
        let empty = Region::from_parts(nx, ny, vec![false; graph.len()]);
        CutProblem { graph, phi, must_include: empty.clone(), must_exclude: empty, choice: MinimizerChoice::Minimal }
    }

    fn validate(&self) -> Result<()> {
        self.graph.check(&self.must_include)?;
        self.graph.check(&self.must_exclude)?;
        if self.phi.dims() != self.graph.dims() {
            return Err(Error::ShapeMismatch("φ and graph sizes differ".into()));
        }
        if !self.must_include.is_disjoint(&self.must_exclude) {
            return Err(Error::ConstraintClash);
        }
        let dom = self.graph.domain();
        if self.must_include.indices().any(|k| !dom[k]) {
            return Err(Error::ConstraintClash);
        }
        for k in 0..dom.len() {
            if dom[k] && !self.must_exclude.contains(k) && self.phi.get(k).is_none() {
                return Err(Error::ShapeMismatch(format!("φ undefined at free node {k}")));
            }
        }
        Ok(())
    }

    /// Quantizes the energy. The scale is the largest power of two (at most
    /// 2⁴⁰) keeping every partial sum below 2⁵², hence exact in `f64`.
    pub fn quantize(&self) -> QuantizedEnergy {
        let g = self.graph;
        let dom = g.domain();
        let phi_area = |k: usize| -> f64 {
            if dom[k] {
                self.phi.get(k).map_or(0.0, |p| p * g.area()[k])
            } else {
                0.0
            }
        };
        let total: f64 = g.edges().iter().map(|e| e.2).sum::<f64>()
            + g.exterior().iter().sum::<f64>()
            + (0..g.len()).map(|k| phi_area(k).abs()).sum::<f64>();
        let mut scale = 2f64.powi(40);
        while scale > 1.0 && (total + 1.0) * scale * 2.0 >= 2f64.powi(52) {
            scale *= 0.5;
        }
        let q = |x: f64| (x * scale).round() as i64;
        QuantizedEnergy {
            scale,
            edges: g.edges().iter().map(|&(a, b, w)| (a as usize, b as usize, q(w))).collect(),
            exterior: g.exterior().iter().map(|&w| q(w)).collect(),
            unary: (0..g.len()).map(|k| q(phi_area(k))).collect(),
        }
    }

    /// Energy, perimeter and weighted area of a mask under this problem's
    /// quantization.
    pub fn evaluate(&self, region: &Region) -> CutSolution {
        let qe = self.quantize();
        solution_from(&qe, region.clone())
    }
}

fn solution_from(qe: &QuantizedEnergy, region: Region) -> CutSolution {
    let p = qe.perimeter_units(region.mask());
    let a = qe.area_units(region.mask());
    let e = p - a;
    CutSolution {
        region,
        energy: e as f64 / qe.scale,
        perimeter: p as f64 / qe.scale,
        weighted_area: a as f64 / qe.scale,
        energy_units: e,
        scale: qe.scale,
    }
}

/// Global minimizer of the constrained energy; the inclusion-minimal or
/// -maximal one according to `problem.choice`.
pub fn minimize_phi_area(problem: &CutProblem) -> Result<CutSolution> {
    problem.validate()?;
    let qe = problem.quantize();
    let dom = problem.graph.domain();
    let inc = problem.must_include.mask();
    let exc = problem.must_exclude.mask();
    let n = dom.len();

    let mut vid = vec![u32::MAX; n];
    let mut free = Vec::new();
    for k in 0..n {
        if dom[k] && !inc[k] && !exc[k] {
            vid[k] = free.len() as u32;
            free.push(k);
        }
    }
    let nf = free.len();
    let (s, t) = (nf, nf + 1);
    // Cost of each free node being inside (c1) or outside (c0).
    let mut c1: Vec<i64> = free.iter().map(|&k| qe.exterior[k] - qe.unary[k]).collect();
    let mut c0 = vec![0i64; nf];
    let mut net = FlowNetwork::new(nf + 2);
    for &(a, b, w) in &qe.edges {
        match (vid[a], vid[b]) {
            (u32::MAX, u32::MAX) => {}
            (u32::MAX, vb) => {
                if inc[a] {
                    c0[vb as usize] += w;
                } else {
                    c1[vb as usize] += w;
                }
            }
            (va, u32::MAX) => {
                if inc[b] {
                    c0[va as usize] += w;
                } else {
                    c1[va as usize] += w;
                }
            }
            (va, vb) => net.add_edge(va as usize, vb as usize, w, w),
        }
    }
    for v in 0..nf {
        let d = c1[v] - c0[v];
        if d > 0 {
            net.add_edge(v, t, d, 0);
        } else if d < 0 {
            net.add_edge(s, v, -d, 0);
        }
    }
    net.max_flow(s, t);
    let side = match problem.choice {
        MinimizerChoice::Minimal => net.source_side(s),
        MinimizerChoice::Maximal => net.reaches_sink(t).into_iter().map(|b| !b).collect(),
    };
    let mut region = problem.must_include.clone();
    for (v, &k) in free.iter().enumerate() {
        if side[v] {
            region.set(k, true);
        }
    }
    Ok(solution_from(&qe, region))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cut::graph::build_cut_graph;
    use crate::grid::{MetricGrid, Topology};

    fn grid(n: usize) -> MetricGrid {
        MetricGrid::euclidean(n, n, 0.25, [0.0; 2], Topology::Plane).unwrap()
    }

    #[test]
    fn zero_phi_gives_empty() {
        let g = grid(8);
        let cg = build_cut_graph(&g).unwrap();
        let sol = minimize_phi_area(&CutProblem::new(&cg, ScalarField::constant(&g, 0.0))).unwrap();
        assert!(sol.region.is_empty());
        assert_eq!(sol.energy, 0.0);
    }

    #[test]
    fn clash_detected() {
        let g = grid(8);
        let cg = build_cut_graph(&g).unwrap();
        let mut p = CutProblem::new(&cg, ScalarField::constant(&g, 0.0));
        p.must_include = Region::from_indices(&g, [3]).unwrap();
        p.must_exclude = Region::from_indices(&g, [3, 4]).unwrap();
        assert_eq!(minimize_phi_area(&p).unwrap_err(), Error::ConstraintClash);
    }

    #[test]
    fn energy_identity_is_exact() {
        let g = grid(10);
        let cg = build_cut_graph(&g).unwrap();
        let phi = ScalarField::from_fn(&g, |[x, y]| 3.0 * (x * 1.3).sin() + y);
        let sol = minimize_phi_area(&CutProblem::new(&cg, phi)).unwrap();
        assert_eq!(sol.energy, sol.perimeter - sol.weighted_area);
    }

    #[test]
    fn large_phi_fills_domain() {
        let g = grid(8);
        let cg = build_cut_graph(&g).unwrap();
        let mut p = CutProblem::new(&cg, ScalarField::constant(&g, 100.0));
        p.choice = MinimizerChoice::Maximal;
        let sol = minimize_phi_area(&p).unwrap();
        assert!(sol.region.is_full(&g));
    }
}
