//! Run configuration, read from and written to JSON.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bubble::BubbleSchedule;
use crate::cut::MinimizerChoice;
use crate::error::{Error, Result};
use crate::grid::{MetricGrid, Region, ScalarField};
use crate::io;
use crate::metrics::MetricSpec;

/// A set of nodes described by shape or read from a mask.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RegionSpec {
    /// Every domain node.
    Full,
    /// Coordinate disk.
    Disk { center: [f64; 2], radius: f64 },
    /// Nodes whose second coordinate lies in `[min, max]`.
    Rows { min: f64, max: f64 },
    /// Intersection of coordinate disks.
    Lens { centers: Vec<[f64; 2]>, radius: f64 },
    /// Binary PGM mask.
    Pgm { path: PathBuf },
}

impl RegionSpec {
    /// The described nodes, restricted to the grid's domain.
    pub fn build(&self, grid: &MetricGrid) -> Result<Region> {
        let r = match self {
            RegionSpec::Full => Region::domain(grid),
            RegionSpec::Disk { center, radius } => {
                Region::from_fn(grid, |[x, y]| (x - center[0]).powi(2) + (y - center[1]).powi(2) <= radius * radius)
            }
            RegionSpec::Rows { min, max } => Region::from_fn(grid, |[_, y]| y >= *min && y <= *max),
            RegionSpec::Lens { centers, radius } => Region::from_fn(grid, |[x, y]| {
                centers.iter().all(|c| (x - c[0]).powi(2) + (y - c[1]).powi(2) <= radius * radius)
            }),
            RegionSpec::Pgm { path } => io::read_pgm(path, grid)?,
        };
        Ok(r.intersection(&Region::domain(grid)))
    }
}

/// A prescription φ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PhiSpec {
    Constant { value: f64 },
    /// `inside` within `radius` of `center`, `outside` beyond, with a linear
    /// ramp of total width `ramp` centred on the radius.
    TwoLevel { center: [f64; 2], radius: f64, inside: f64, outside: f64, ramp: f64 },
    Csv { path: PathBuf },
}

impl Default for PhiSpec {
    fn default() -> Self {
        PhiSpec::Constant { value: 0.0 }
    }
}

impl PhiSpec {
    pub fn build(&self, grid: &MetricGrid) -> Result<ScalarField> {
        Ok(match self {
            PhiSpec::Constant { value } => ScalarField::constant(grid, *value),
            PhiSpec::TwoLevel { center, radius, inside, outside, ramp } => ScalarField::from_fn(grid, |[x, y]| {
                let r = ((x - center[0]).powi(2) + (y - center[1]).powi(2)).sqrt();
                let t = if *ramp > 0.0 { ((r - radius) / ramp + 0.5).clamp(0.0, 1.0) } else { f64::from(r > *radius) };
                inside * (1.0 - t) + outside * t
            }),
            PhiSpec::Csv { path } => io::read_field_csv(path, grid)?,
        })
    }
}

/// The pipeline to run, with its own parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Operation {
    /// One φ-bubble: minimizes perimeter minus the φ-area.
    SolveBubble {
        #[serde(default)]
        phi: PhiSpec,
        #[serde(default)]
        include: Option<RegionSpec>,
        #[serde(default)]
        exclude: Option<RegionSpec>,
        #[serde(default)]
        choice: Choice,
    },
    Shrink {
        #[serde(default)]
        phi: PhiSpec,
    },
    Grow {
        seed: RegionSpec,
        #[serde(default)]
        phi: PhiSpec,
    },
    /// Minimal curve separating two ends; defaults to the bottom and top
    /// two rows of the grid.
    Separate {
        #[serde(default)]
        end_a: Option<RegionSpec>,
        #[serde(default)]
        end_b: Option<RegionSpec>,
    },
    Classify {
        end: RegionSpec,
    },
    Trichotomy {
        #[serde(default)]
        phi_floor: f64,
        #[serde(default)]
        classify_ends: bool,
    },
    /// Staircase over the shrinking nest, certified like clause 1.
    Staircase {
        #[serde(default)]
        phi: f64,
    },
    Verify {
        field: PathBuf,
        #[serde(default)]
        phi_target: PhiSpec,
        #[serde(default)]
        grad_floor: Option<f64>,
    },
    /// Signed distance to a region.
    Distance {
        region: RegionSpec,
    },
}

impl Operation {
    pub fn verb(&self) -> &'static str {
        match self {
            Operation::SolveBubble { .. } => "solve-bubble",
            Operation::Shrink { .. } => "shrink",
            Operation::Grow { .. } => "grow",
            Operation::Separate { .. } => "separate",
            Operation::Classify { .. } => "classify",
            Operation::Trichotomy { .. } => "trichotomy",
            Operation::Staircase { .. } => "staircase",
            Operation::Verify { .. } => "verify",
            Operation::Distance { .. } => "distance",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Choice {
    #[default]
    Minimal,
    Maximal,
}

impl From<Choice> for MinimizerChoice {
    fn from(c: Choice) -> Self {
        match c {
            Choice::Minimal => MinimizerChoice::Minimal,
            Choice::Maximal => MinimizerChoice::Maximal,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub metric: MetricSpec,
    /// Part of the grid to work in; the whole grid by default.
    #[serde(default)]
    pub domain: Option<RegionSpec>,
    pub operation: Operation,
    #[serde(default)]
    pub schedule: Option<BubbleSchedule>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    /// Seed of the Morse perturbation.
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_seed() -> u64 {
    1
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        Ok(std::fs::write(path, self.to_json())?)
    }

    /// Schedule from the config, or one with `ρ = 8h` when absent.
    pub fn schedule_for(&self, grid: &MetricGrid) -> BubbleSchedule {
        self.schedule.clone().unwrap_or_else(|| BubbleSchedule::new(8.0 * grid.h()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::Warp;

    fn sample() -> RunConfig {
        RunConfig {
            metric: MetricSpec::WarpedCylinder { warp: Warp::Cosh, t_min: -2.0, t_max: 2.0, nt: 128, ntheta: 256, period: None },
            domain: Some(RegionSpec::Rows { min: -1.5, max: 1.5 }),
            operation: Operation::Trichotomy { phi_floor: 0.0, classify_ends: true },
            schedule: Some(BubbleSchedule::new(0.2)),
            output: Some("out".into()),
            seed: 7,
        }
    }

    #[test]
    fn json_round_trip() {
        let c = sample();
        assert_eq!(RunConfig::from_json(&c.to_json()).unwrap(), c);
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.json");
        let c = sample();
        c.write(&p).unwrap();
        assert_eq!(RunConfig::read(&p).unwrap(), c);
    }

    #[test]
    fn unknown_keys_rejected() {
        let mut v: serde_json::Value = serde_json::from_str(&sample().to_json()).unwrap();
        v["colour"] = serde_json::json!("blue");
        assert!(matches!(RunConfig::from_json(&v.to_string()), Err(Error::Config(_))));
        let mut v: serde_json::Value = serde_json::from_str(&sample().to_json()).unwrap();
        v["operation"]["bogus"] = serde_json::json!(1);
        assert!(RunConfig::from_json(&v.to_string()).is_err());
    }

    #[test]
    fn two_level_phi_ramps() {
        let g = MetricGrid::euclidean(41, 41, 0.05, [-1.0, -1.0], crate::Topology::Plane).unwrap();
        let phi = PhiSpec::TwoLevel { center: [0.0, 0.0], radius: 0.5, inside: 10.0, outside: 0.1, ramp: 0.2 };
        let f = phi.build(&g).unwrap();
        assert_eq!(f.at(g.index(20, 20)), 10.0);
        assert_eq!(f.at(g.index(0, 20)), 0.1);
        assert!((f.at(g.index(30, 20)) - 5.05).abs() < 1e-9);
    }
}
