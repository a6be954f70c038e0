use thiserror::Error;

/// Every failure the engine can report. `module()` names the subsystem that
/// raised it so the CLI can print qualified messages.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("degenerate metric: {0}")]
    DegenerateMetric(String),
    #[error("outside domain")]
    OutsideDomain,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("empty source")]
    EmptySource,
    #[error("no boundary")]
    NoBoundary,
    #[error("near-critical, curvature undefined")]
    NearCritical,
    #[error("degenerate field")]
    DegenerateField,
    #[error("unsupported combination: {0}")]
    UnsupportedCombination(String),
    #[error("constraint clash")]
    ConstraintClash,
    #[error("boundary too small to sample")]
    BoundaryTooSmall,
    #[error("bad schedule: {0}")]
    BadSchedule(String),
    #[error("no seed")]
    NoSeed,
    #[error("ends not separated")]
    EndsNotSeparated,
    #[error("not a single end")]
    NotSingleEnd,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("staircase gap violated: {0}")]
    StaircaseGap(String),
    #[error("bending breaks monotonicity")]
    BendingMonotonicity,
    #[error("kernel under-resolved")]
    KernelUnderResolved,
    #[error("lemma hypothesis violated: {0}")]
    LemmaHypothesis(String),
    #[error("regularization failed")]
    RegularizationFailed,
    #[error("io: {0}")]
    Io(String),
    #[error("parse: {0}")]
    Parse(String),
    #[error("config: {0}")]
    Config(String),
}

impl Error {
    pub fn module(&self) -> &'static str {
        use Error::*;
        match self {
            InvalidGrid(_) | OutsideDomain | ShapeMismatch(_) | EmptySource | NoBoundary
            | NearCritical | DegenerateField => "geometry",
            UnsupportedCombination(_) | ConstraintClash | BoundaryTooSmall => "cut",
            BadSchedule(_) | NoSeed | EndsNotSeparated | NotSingleEnd | Precondition(_) => "bubble",
            StaircaseGap(_) | BendingMonotonicity | KernelUnderResolved | LemmaHypothesis(_)
            | RegularizationFailed => "convexify",
            DegenerateMetric(_) | Io(_) | Parse(_) | Config(_) => "io",
        }
    }

    /// `module: message`, the form used on stderr by the CLI.
    pub fn qualified(&self) -> String {
        format!("{}: {}", self.module(), self)
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
