//! Metric structure on the grid: distances, equidistant sublevels, level
//! curvature and critical points.

pub mod critical;
pub mod curvature;
pub mod distance;
pub mod morphology;

pub use critical::{critical_points, CriticalPoint};
pub use curvature::{curvature_at, default_grad_floor, grad_norm, level_mean_curvature};
pub use distance::{distance_transform, level_set_distance, signed_distance, signed_distance_to_outline};
pub use morphology::{accessible_set, dilate, erode};
