//! Parameters shared by the shrinking and growing schedules.

use serde::{Deserialize, Serialize};

use crate::cut::PROBE_NOISE;
use crate::error::{Error, Result};
use crate::grid::MetricGrid;

fn default_decay() -> f64 {
    0.5
}
fn default_max_steps() -> usize {
    200
}
fn default_stall() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BubbleSchedule {
    /// Initial curvature offset ε₀ (1/length).
    pub eps0: f64,
    /// ε_i = ε₀ · decayⁱ.
    #[serde(default = "default_decay")]
    pub decay: f64,
    /// Band width ρ (length).
    pub rho: f64,
    /// Saturation value of φ in the forcing zone; `None` means
    /// `2/ρ + max φ + 1`.
    #[serde(default)]
    pub phi_big: Option<f64>,
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
    /// Boundary motion (in cells) below which a step counts as stalled.
    #[serde(default = "default_stall")]
    pub stall_tolerance: f64,
}

impl BubbleSchedule {
    pub fn new(rho: f64) -> Self {
        BubbleSchedule {
            eps0: 0.25,
            decay: default_decay(),
            rho,
            phi_big: None,
            max_steps: default_max_steps(),
            stall_tolerance: default_stall(),
        }
    }

    /// Checks the schedule against a grid and the largest |φ| it will see.
    pub fn validate(&self, grid: &MetricGrid, phi_max: f64) -> Result<()> {
        let bad = |m: String| Err(Error::BadSchedule(m));
        if !(self.eps0 > 0.0 && self.eps0.is_finite()) {
            return bad(format!("ε₀ must be positive, got {}", self.eps0));
        }
        if !(self.decay > 0.0 && self.decay < 1.0) {
            return bad(format!("decay must lie in (0, 1), got {}", self.decay));
        }
        if !(self.rho >= 3.0 * grid.h()) || !self.rho.is_finite() {
            return bad(format!("ρ = {} is below 3h = {}", self.rho, 3.0 * grid.h()));
        }
        if let Some(pb) = self.phi_big {
            if !(pb >= 2.0 / self.rho + phi_max) {
                return bad(format!("Φ_big = {pb} is below 2/ρ + max|φ| = {}", 2.0 / self.rho + phi_max));
            }
        }
        if self.max_steps == 0 {
            return bad("max_steps must be positive".into());
        }
        if !(self.stall_tolerance > 0.0) {
            return bad(format!("stall tolerance must be positive, got {}", self.stall_tolerance));
        }
        Ok(())
    }

    /// ε_i for step `i ≥ 0`.
    pub fn eps(&self, i: usize) -> f64 {
        self.eps0 * self.decay.powi(i as i32)
    }

    pub fn phi_big(&self, phi_max: f64) -> f64 {
        self.phi_big.unwrap_or(2.0 / self.rho + phi_max + 1.0)
    }

    /// Curvature below which a stalled boundary counts as approximately
    /// minimal: twice the larger of the terminal offset, the prescription
    /// and the probe noise.
    pub fn kappa_tol(&self, phi_max: f64) -> f64 {
        2.0 * self.eps(self.max_steps).max(phi_max).max(PROBE_NOISE)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Topology;

    fn grid() -> MetricGrid {
        MetricGrid::euclidean(33, 33, 1.0 / 32.0, [0.0; 2], Topology::Plane).unwrap()
    }

    #[test]
    fn defaults_are_valid() {
        let s = BubbleSchedule::new(0.1);
        s.validate(&grid(), 0.1).unwrap();
        assert!(s.eps(3) < s.eps(2));
        assert_eq!(s.phi_big(0.1), 2.0 / 0.1 + 0.1 + 1.0);
    }

    #[test]
    fn invalid_schedules() {
        let g = grid();
        let mut s = BubbleSchedule::new(-0.1);
        assert!(matches!(s.validate(&g, 0.0), Err(Error::BadSchedule(_))));
        s.rho = 0.05;
        assert!(matches!(s.validate(&g, 0.0), Err(Error::BadSchedule(_))));
        s.rho = 0.2;
        s.phi_big = Some(1.0);
        assert!(matches!(s.validate(&g, 0.0), Err(Error::BadSchedule(_))));
        s.phi_big = None;
        s.decay = 1.0;
        assert!(matches!(s.validate(&g, 0.0), Err(Error::BadSchedule(_))));
    }

    #[test]
    fn json_rejects_unknown_keys() {
        let s: BubbleSchedule = serde_json::from_str(r#"{"eps0":0.2,"rho":0.1}"#).unwrap();
        assert_eq!(s.max_steps, 200);
        assert!(serde_json::from_str::<BubbleSchedule>(r#"{"eps0":0.2,"rho":0.1,"x":1}"#).is_err());
    }
}
