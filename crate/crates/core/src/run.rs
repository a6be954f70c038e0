//! Executes a [`RunConfig`] and writes its artifacts.
//!
//! Every run writes `config.json` and `report.json` into the output
//! directory. Masks are binary PGMs and fields CSVs; schedule traces go to
//! `trace/step_NNN.pgm` with a `trace/manifest.json` of step records.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use crate::bubble::{
    certify_staircase, classify_end, end_bands, grow_bubbles, minimal_separator, shrink_bubbles, torus_systoles,
    trichotomy, BubbleTrace, ResidualReport, StepRecord, TrichotomyOptions, Verdict,
};
use crate::config::{Operation, RunConfig};
use crate::convexify::verify_mean_convex;
use crate::cut::{build_cut_graph, minimize_phi_area, region_boundary_curvature, CutProblem};
use crate::error::{Error, Result};
use crate::geometry::{default_grad_floor, signed_distance};
use crate::grid::{Region, ScalarField, Topology};
use crate::io;
use crate::metrics::generate_metric;

/// Exit status of a clean run.
pub const EXIT_OK: i32 = 0;
/// A module error or bad input.
pub const EXIT_ERROR: i32 = 1;
/// The run completed but a verification step failed.
pub const EXIT_VERIFY_FAILED: i32 = 2;

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub exit_code: i32,
    pub out_dir: PathBuf,
    pub report: Value,
}

#[derive(Serialize)]
struct GridInfo {
    nx: usize,
    ny: usize,
    h: f64,
    topology: Topology,
    domain_nodes: usize,
}

#[derive(Serialize)]
struct VerdictInfo<'a> {
    kind: crate::bubble::VerdictKind,
    end_class: Option<crate::bubble::EndClass>,
    note: Option<&'a str>,
    residual: Option<ResidualReport>,
}

fn verdict_info(v: &Verdict) -> VerdictInfo<'_> {
    VerdictInfo {
        kind: v.kind,
        end_class: v.end_class,
        note: v.note.as_deref(),
        residual: crate::bubble::trichotomy::residual_report(v),
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report serializes")
}

fn write_trace(dir: &Path, trace: &BubbleTrace) -> Result<()> {
    let t = dir.join("trace");
    fs::create_dir_all(&t)?;
    let mut files = Vec::with_capacity(trace.regions.len());
    for (i, r) in trace.regions.iter().enumerate() {
        let name = format!("step_{i:03}.pgm");
        io::write_pgm(&t.join(&name), r)?;
        files.push(name);
    }
    #[derive(Serialize)]
    struct Manifest<'a> {
        masks: Vec<String>,
        steps: &'a [StepRecord],
        c_observed: f64,
    }
    io::write_json(&t.join("manifest.json"), &Manifest { masks: files, steps: &trace.steps, c_observed: trace.c_observed })
}

fn trace_summary(trace: &BubbleTrace, downward: bool) -> Value {
    json!({
        "steps": trace.steps.len(),
        "energies": trace.energies(),
        "c_observed": trace.c_observed,
        "nested": trace.is_nested(downward),
    })
}

/// Runs `config`, writing into `out` (or the configured output, or
/// `./bubblecut-out`). `seed` overrides the configured seed.
pub fn run(config: &RunConfig, out: Option<&Path>, seed: Option<u64>) -> Result<RunOutcome> {
    let out_dir = out
        .map(Path::to_path_buf)
        .or_else(|| config.output.clone())
        .unwrap_or_else(|| PathBuf::from("bubblecut-out"));
    let seed = seed.unwrap_or(config.seed);
    let grid = generate_metric(&config.metric)?;
    let domain = match &config.domain {
        Some(spec) => spec.build(&grid)?,
        None => Region::domain(&grid),
    };
    if domain.is_empty() {
        return Err(Error::Config("domain is empty".into()));
    }
    let sub = grid.with_domain(domain.mask().to_vec())?;
    let schedule = config.schedule_for(&sub);
    schedule.validate(&sub, 0.0)?;
    fs::create_dir_all(&out_dir)?;
    config.write(&out_dir.join("config.json"))?;

    let mut exit_code = EXIT_OK;
    let body: Value = match &config.operation {
        Operation::SolveBubble { phi, include, exclude, choice } => {
            let graph = build_cut_graph(&sub)?;
            let mut p = CutProblem::new(&graph, phi.build(&sub)?);
            if let Some(r) = include {
                p.must_include = r.build(&sub)?;
            }
            if let Some(r) = exclude {
                p.must_exclude = r.build(&sub)?;
            }
            p.choice = (*choice).into();
            let sol = minimize_phi_area(&p)?;
            io::write_pgm(&out_dir.join("region.pgm"), &sol.region)?;
            let curvature = region_boundary_curvature(&sub, &sol.region, sub.h(), None, None).ok();
            json!({
                "energy": sol.energy,
                "perimeter": sol.perimeter,
                "interface_length": graph.interface_length(&sol.region),
                "weighted_area": sol.weighted_area,
                "cells": sol.region.count(),
                "curvature": curvature,
            })
        }
        Operation::Shrink { phi } => {
            let (trace, verdict) = shrink_bubbles(&sub, &Region::domain(&sub), &phi.build(&sub)?, &schedule)?;
            write_trace(&out_dir, &trace)?;
            if let Some(r) = trace.last() {
                io::write_pgm(&out_dir.join("final.pgm"), r)?;
            }
            json!({ "verdict": to_value(&verdict_info(&verdict)), "trace": trace_summary(&trace, true) })
        }
        Operation::Grow { seed: seed_spec, phi } => {
            let x = Region::domain(&sub);
            let (trace, verdict) = grow_bubbles(&sub, &x, &seed_spec.build(&sub)?, &phi.build(&sub)?, &schedule)?;
            write_trace(&out_dir, &trace)?;
            if let Some(r) = trace.last() {
                io::write_pgm(&out_dir.join("final.pgm"), r)?;
            }
            json!({ "verdict": to_value(&verdict_info(&verdict)), "trace": trace_summary(&trace, false) })
        }
        Operation::Separate { end_a, end_b } => {
            if end_a.is_none() && end_b.is_none() && sub.topology() == Topology::Torus && !sub.has_edge() {
                json!({ "systoles": to_value(&torus_systoles(&sub)?) })
            } else {
                let (da, db) = end_bands(&sub, 2);
                let a = end_a.as_ref().map_or(Ok(da), |s| s.build(&sub))?;
                let b = end_b.as_ref().map_or(Ok(db), |s| s.build(&sub))?;
                let sep = minimal_separator(&sub, &Region::domain(&sub), &a, &b)?;
                io::write_pgm(&out_dir.join("separator.pgm"), &sep.curve)?;
                io::write_pgm(&out_dir.join("region.pgm"), &sep.region)?;
                json!({ "length": sep.length })
            }
        }
        Operation::Classify { end } => {
            let c = classify_end(&sub, &Region::domain(&sub), &end.build(&sub)?, &schedule)?;
            json!({ "verdict": to_value(&verdict_info(&c.verdict)), "tests": to_value(&c.tests) })
        }
        Operation::Trichotomy { phi_floor, classify_ends } => {
            let opts = TrichotomyOptions { phi_floor: *phi_floor, seed, classify_ends: *classify_ends };
            let rep = trichotomy(&sub, &Region::domain(&sub), &schedule, &opts)?;
            if let Some(t) = &rep.trace {
                write_trace(&out_dir, t)?;
            }
            if let Some(f) = &rep.function {
                io::write_field_csv(&out_dir.join("function.csv"), &sub, &f.field)?;
            }
            if let Some(r) = &rep.residual {
                io::write_pgm(&out_dir.join("residual.pgm"), &r.region)?;
            }
            if rep.verified() == Some(false) || !rep.consistent {
                exit_code = EXIT_VERIFY_FAILED;
            }
            to_value(&rep)
        }
        Operation::Staircase { phi } => {
            let phi_f = ScalarField::constant(&sub, *phi);
            let (trace, verdict) = shrink_bubbles(&sub, &Region::domain(&sub), &phi_f, &schedule)?;
            let mut stages: Vec<Region> = Vec::new();
            for r in trace.regions.iter().filter(|r| !r.is_empty()) {
                if stages.last() != Some(r) {
                    stages.push(r.clone());
                }
            }
            let cert = certify_staircase(&sub, &stages, &phi_f, seed)?;
            io::write_field_csv(&out_dir.join("staircase.csv"), &sub, &cert.field)?;
            write_trace(&out_dir, &trace)?;
            if !cert.convexity.pass {
                exit_code = EXIT_VERIFY_FAILED;
            }
            json!({ "shrink": to_value(&verdict_info(&verdict)), "function": to_value(&cert) })
        }
        Operation::Verify { field, phi_target, grad_floor } => {
            let f = io::read_field_csv(field, &sub)?;
            let floor = grad_floor.unwrap_or_else(|| default_grad_floor(&sub, &f));
            let rep = verify_mean_convex(&sub, &f, &phi_target.build(&sub)?, floor)?;
            if !rep.pass {
                exit_code = EXIT_VERIFY_FAILED;
            }
            to_value(&rep)
        }
        Operation::Distance { region } => {
            let sd = signed_distance(&sub, &region.build(&sub)?)?;
            io::write_field_csv(&out_dir.join("distance.csv"), &sub, &sd)?;
            json!({ "range": sd.range() })
        }
    };

    let grid_info = GridInfo { nx: sub.nx(), ny: sub.ny(), h: sub.h(), topology: sub.topology(), domain_nodes: sub.domain_count() };
    let report = json!({
        "operation": config.operation.verb(),
        "seed": seed,
        "grid": to_value(&grid_info),
        "exit_code": exit_code,
        "result": body,
    });
    io::write_json(&out_dir.join("report.json"), &report)?;
    Ok(RunOutcome { exit_code, out_dir, report })
}
