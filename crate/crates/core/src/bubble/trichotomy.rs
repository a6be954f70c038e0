//! Desk-scale trichotomy: a certified convex function, a residual minimal
//! curve, or a mix of both.

use serde::{Deserialize, Serialize};

use crate::bubble::classify::{classify_end, EndTests};
use crate::bubble::detector::{detect_on, DetectorReport};
use crate::bubble::schedule::BubbleSchedule;
use crate::bubble::separator::{torus_systoles, Systoles};
use crate::bubble::shrink::shrink_bubbles_on;
use crate::bubble::trace::{BubbleTrace, EndClass, Verdict, VerdictKind};
use crate::convexify::{
    mollify, morse_regularize, staircase, verify_mean_convex, ConvexityReport, KernelProfile,
    MorsePerturbation, Stage, StaircaseSpec,
};
use crate::cut::build_cut_graph;
use crate::error::{Error, Result};
use crate::geometry::default_grad_floor;
use crate::grid::{MetricGrid, Region, ScalarField, Step, Topology, N4};

/// Smoothing radius of the certified function, in metric cells.
pub const CERT_SMOOTHING_CELLS: f64 = 16.0;
/// Amplitude of the Morse bowl relative to the range of the function.
pub const CERT_MORSE_REL: f64 = 0.01;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrichotomyOptions {
    /// Constant prescription φ ≥ 0 for shrinking and certification.
    #[serde(default)]
    pub phi_floor: f64,
    /// Seed of the Morse perturbation.
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Also run the end classifier on every boundary band.
    #[serde(default)]
    pub classify_ends: bool,
}

fn default_seed() -> u64 {
    1
}

impl Default for TrichotomyOptions {
    fn default() -> Self {
        TrichotomyOptions { phi_floor: 0.0, seed: default_seed(), classify_ends: false }
    }
}

/// A staircase function with its verification.
#[derive(Clone, Debug, Serialize)]
pub struct CertifiedFunction {
    #[serde(skip)]
    pub field: ScalarField,
    /// Nodes on which the function was verified.
    #[serde(skip)]
    pub support: Region,
    pub stages: Vec<Stage>,
    pub slope_ratio: f64,
    pub smoothing: f64,
    pub morse: MorsePerturbation,
    pub convexity: ConvexityReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveReport {
    pub length: f64,
    pub closed: bool,
    pub max_abs_curvature: Option<f64>,
    pub mean_curvature: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ResidualReport {
    #[serde(skip)]
    pub region: Region,
    pub cells: usize,
    pub curves: Vec<CurveReport>,
    pub min_length: Option<f64>,
    pub converged: bool,
    pub curvature_ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct EndReport {
    pub band_nodes: usize,
    pub class: Option<EndClass>,
    pub tests: Option<EndTests>,
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShrinkSummary {
    pub verdict: VerdictKind,
    pub steps: usize,
    pub c_observed: f64,
    pub note: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TrichotomyReport {
    /// 1: convex function on the whole domain; 2: residual minimal curves;
    /// 3: function on the swept part plus residual data.
    pub clause: u8,
    pub shrink: Option<ShrinkSummary>,
    pub function: Option<CertifiedFunction>,
    pub residual: Option<ResidualReport>,
    pub systoles: Option<Systoles>,
    /// Minimal-curve search, run whenever a function passes verification.
    pub detector: Option<DetectorReport>,
    pub ends: Vec<EndReport>,
    /// False when a verified function coexists with a detected minimal curve.
    pub consistent: bool,
    #[serde(skip)]
    pub trace: Option<BubbleTrace>,
}

impl TrichotomyReport {
    /// Whether the emitted function (if any) passed verification.
    pub fn verified(&self) -> Option<bool> {
        self.function.as_ref().map(|f| f.convexity.pass)
    }
}

/// Builds a staircase over strictly nested regions, smooths it, makes it
/// Morse and verifies strict mean-curvature convexity against `phi_target`
/// on the whole domain of `grid`.
pub fn certify_staircase(
    grid: &MetricGrid,
    regions: &[Region],
    phi_target: &ScalarField,
    seed: u64,
) -> Result<CertifiedFunction> {
    let stair = staircase(grid, regions, &StaircaseSpec::default())?;
    let lambda_min = (0..grid.len())
        .filter(|&k| grid.in_domain(k))
        .map(|k| grid.sqrt_det(k).sqrt())
        .fold(f64::INFINITY, f64::min);
    let smoothing = CERT_SMOOTHING_CELLS * grid.h() * lambda_min;
    let smooth = mollify(grid, &stair.field, smoothing, KernelProfile::QuarticBump)?;
    let (lo, hi) = smooth.range().ok_or(Error::DegenerateField)?;
    let (field, morse) = morse_regularize(grid, &smooth, CERT_MORSE_REL * (hi - lo), seed)?;
    let convexity = verify_mean_convex(grid, &field, phi_target, default_grad_floor(grid, &field))?;
    Ok(CertifiedFunction {
        field,
        support: Region::domain(grid),
        stages: stair.stages,
        slope_ratio: stair.slope_ratio,
        smoothing,
        morse,
        convexity,
    })
}

/// Non-empty trace regions with consecutive duplicates removed.
fn distinct_stages(trace: &BubbleTrace) -> Vec<Region> {
    let mut out: Vec<Region> = Vec::new();
    for r in &trace.regions {
        if !r.is_empty() && out.last() != Some(r) {
            out.push(r.clone());
        }
    }
    out
}

/// Components of the domain cells that touch the manifold edge.
fn boundary_bands(grid: &MetricGrid) -> Vec<Region> {
    let mut edge = Region::empty(grid);
    for k in (0..grid.len()).filter(|&k| grid.in_domain(k)) {
        if N4.iter().any(|&(di, dj)| grid.step(k, di, dj) == Step::Exterior) {
            edge.set(k, true);
        }
    }
    edge.components(grid)
}

pub(crate) fn residual_report(verdict: &Verdict) -> Option<ResidualReport> {
    let res = verdict.residual.as_ref()?;
    let curves: Vec<CurveReport> = res
        .curves
        .iter()
        .map(|c| CurveReport {
            length: c.curve.length,
            closed: c.curve.closed,
            max_abs_curvature: c.max_abs_curvature(),
            mean_curvature: c.curvature.as_ref().map(|s| s.mean),
        })
        .collect();
    Some(ResidualReport {
        region: res.region.clone(),
        cells: res.region.count(),
        min_length: curves.iter().map(|c| c.length).min_by(f64::total_cmp),
        curves,
        converged: res.converged,
        curvature_ok: res.curvature_ok,
    })
}

/// Decides which of the three alternatives a domain falls under.
///
/// A closed torus goes straight to its systoles. Otherwise the domain is
/// shrunk with φ ≡ `phi_floor`: if it empties, the nest of bubbles becomes
/// a staircase that is smoothed and certified (clause 1); if it stalls on
/// closed, nearly geodesic curves those are reported (clause 2); anything
/// else gets a function certified on the swept part together with the
/// residual data (clause 3).
pub fn trichotomy(
    grid: &MetricGrid,
    domain: &Region,
    schedule: &BubbleSchedule,
    options: &TrichotomyOptions,
) -> Result<TrichotomyReport> {
    domain.check(grid)?;
    if domain.is_empty() {
        return Err(Error::Precondition("empty domain".into()));
    }
    if !(options.phi_floor >= 0.0) {
        return Err(Error::Precondition(format!("φ floor {} < 0", options.phi_floor)));
    }
    let sub = grid.with_domain(domain.mask().to_vec())?;
    let mut report = TrichotomyReport {
        clause: 2,
        shrink: None,
        function: None,
        residual: None,
        systoles: None,
        detector: None,
        ends: Vec::new(),
        consistent: true,
        trace: None,
    };
    if !sub.has_edge() {
        if sub.topology() != Topology::Torus || sub.domain_count() != sub.len() {
            return Err(Error::UnsupportedCombination("closed domains must be a full torus".into()));
        }
        report.systoles = Some(torus_systoles(&sub)?);
        return Ok(report);
    }

    let graph = build_cut_graph(&sub)?;
    let phi = ScalarField::constant(&sub, options.phi_floor);
    let (trace, verdict) = shrink_bubbles_on(&sub, &graph, &Region::domain(&sub), &phi, schedule)?;
    report.shrink = Some(ShrinkSummary {
        verdict: verdict.kind,
        steps: trace.steps.len(),
        c_observed: trace.c_observed,
        note: verdict.note.clone(),
    });
    report.residual = residual_report(&verdict);
    let stages = distinct_stages(&trace);

    let geodesic = report
        .residual
        .as_ref()
        .is_some_and(|r| r.converged && r.curvature_ok && !r.curves.is_empty() && r.curves.iter().all(|c| c.closed));
    if verdict.kind == VerdictKind::Empties {
        report.clause = 1;
        report.function = Some(certify_staircase(&sub, &stages, &phi, options.seed)?);
    } else if geodesic {
        report.clause = 2;
    } else {
        report.clause = 3;
        let residual = report.residual.as_ref().map_or_else(|| Region::empty(&sub), |r| r.region.clone());
        let swept = Region::domain(&sub).difference(&residual);
        if !swept.is_empty() {
            let part = sub.with_domain(swept.mask().to_vec())?;
            let steps: Vec<Region> = stages.iter().map(|r| r.difference(&residual)).filter(|r| !r.is_empty()).collect();
            let mut nest: Vec<Region> = Vec::new();
            for r in steps {
                if nest.last() != Some(&r) {
                    nest.push(r);
                }
            }
            let phi_part = ScalarField::constant(&part, options.phi_floor);
            // A swept part too thin for a staircase still yields residual data.
            match certify_staircase(&part, &nest, &phi_part, options.seed) {
                Ok(mut f) => {
                    f.support = swept;
                    report.function = Some(f);
                }
                Err(Error::StaircaseGap(_) | Error::DegenerateField | Error::BoundaryTooSmall) => {}
                Err(e) => return Err(e),
            }
        }
    }

    if report.verified() == Some(true) {
        let det = detect_on(&sub, &graph, schedule)?;
        report.consistent = det.curves.is_empty();
        report.detector = Some(det);
    }
    if options.classify_ends {
        for band in boundary_bands(&sub) {
            let band_nodes = band.count();
            report.ends.push(match classify_end(grid, domain, &band, schedule) {
                Ok(c) => EndReport {
                    band_nodes,
                    class: c.verdict.end_class,
                    tests: Some(c.tests),
                    note: c.verdict.note,
                },
                Err(e @ (Error::Precondition(_) | Error::NotSingleEnd)) => {
                    EndReport { band_nodes, class: None, tests: None, note: Some(e.to_string()) }
                }
                Err(e) => return Err(e),
            });
        }
    }
    report.trace = Some(trace);
    Ok(report)
}
