pub mod bubble;
pub mod config;
pub mod convexify;
pub mod cut;
pub mod error;
pub mod geometry;
pub mod grid;
pub mod io;
pub mod metrics;
pub mod run;

pub use error::{Error, Result};
pub use grid::{Metric, MetricGrid, Region, ScalarField, Step, Topology};
