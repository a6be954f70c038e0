//! Bubble schedules: shrinking and growing φ-bubbles, minimal separators,
//! end classification and the trichotomy report.

pub mod classify;
pub mod detector;
pub mod grow;
pub mod schedule;
pub mod separator;
pub mod shrink;
pub mod trace;
pub mod trichotomy;

pub use classify::{classify_end, EndClassification, EndTests};
pub use detector::{detect_minimal_curves, DetectedCurve, DetectorReport};
pub use grow::{grow_bubbles, grow_bubbles_on};
pub use schedule::BubbleSchedule;
pub use separator::{end_bands, minimal_separator, torus_systoles, Separator, Systoles};
pub use shrink::{shrink_bubbles, shrink_bubbles_on};
pub use trace::{BubbleTrace, EndClass, Residual, ResidualCurve, StepRecord, Verdict, VerdictKind};
pub use trichotomy::{
    certify_staircase, trichotomy, CertifiedFunction, CurveReport, EndReport, ResidualReport, ShrinkSummary, TrichotomyOptions,
    TrichotomyReport,
};
