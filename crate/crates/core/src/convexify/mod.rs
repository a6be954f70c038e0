//! From bubble traces to certified functions: staircases, bending,
//! smoothing, Morse regularization and verification.

pub mod corner;
pub mod mollify;
pub mod morse;
pub mod staircase;
pub mod verify;

pub use corner::{corner_smooth, CornerSmoothing};
pub use mollify::{kernel_weights, mollify, KernelProfile};
pub use morse::{morse_regularize, MorsePerturbation};
pub use staircase::{beta, bend, staircase, Stage, Staircase, StaircaseSpec};
pub use verify::{margin_law, margins, verify_mean_convex, ConvexityReport, Histogram, MarginLawReport, Violator};
