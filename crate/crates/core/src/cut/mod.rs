//! Exact constrained minimization of the φ-area energy by max-flow.

pub mod graph;
pub mod maxflow;
pub mod probe;
pub mod problem;

pub use graph::{build_cut_graph, perimeter, CutGraph};
pub use probe::{
    boundary_curvature_samples, boundary_curves, bubble_boundary_curvature, default_probe_smoothing,
    region_boundary_curvature, BoundaryCurve, CurvatureSummary, PROBE_NOISE,
};
pub use problem::{minimize_phi_area, CutProblem, CutSolution, MinimizerChoice, QuantizedEnergy};
