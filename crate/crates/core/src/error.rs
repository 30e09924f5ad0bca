use crate::exactmath::Var;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the engine can report.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("variable {0} has no assigned value")]
    MissingAssignment(Var),
    #[error("polynomial degree {degree} exceeds the cap of {cap}")]
    DegreeCap { degree: u32, cap: u32 },
    #[error("polynomial is not univariate in {0}")]
    NotUnivariate(Var),
    #[error("polynomial is identically zero")]
    ZeroPolynomial,
    #[error("division by zero")]
    DivisionByZero,
    #[error("pieces do not partition the interval: {0}")]
    BadPartition(String),
    #[error("irrational breakpoint of {poly} inside [{lo}, {hi}]")]
    IrrationalBreakpoint { poly: String, lo: String, hi: String },
    #[error("chamber boundary is not polynomial in the outer parameter: {0}")]
    UnsupportedBoundary(String),
    #[error("classes live on different lattices ({0} vs {1})")]
    LatticeMismatch(String, String),
    #[error("expected {expected} arguments for a degree-{expected} form, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("singular intersection matrix for support {{{0}}}")]
    SingularGram(String),
    #[error("support {{{0}}} does not have a negative definite Gram matrix")]
    NotNegativeDefinite(String),
    #[error("divisor stops being pseudoeffective at {at} (curve {curve}), before the declared threshold {tau}")]
    NotPseudoeffective { at: String, curve: String, tau: String },
    #[error("curve {0} pairs negatively with the positive part but is not a declared candidate")]
    UndeclaredNegativeCurve(String),
    #[error("no pseudoeffective threshold detected")]
    Unbounded,
    #[error("chamber walk did not terminate")]
    ChamberLimit,
    #[error("unknown curve {0}")]
    UnknownCurve(String),
    #[error("unknown flag {0}")]
    UnknownFlag(String),
    #[error("unknown point {0}")]
    UnknownPoint(String),
    #[error("incidence table for point {point} has no entry for active curve {curve}")]
    MissingIncidence { point: String, curve: String },
    #[error("unknown scenario {0}")]
    UnknownScenario(String),
    #[error("parse error at {line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}
