use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("coefficient vector has length {got}, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("resultant argument is identically zero or has no y-degree")]
    DegenerateResultant,
    #[error("polynomial has degree {0} in y, at least 2 required")]
    DegreeInYTooLow(usize),
    #[error("all coefficients vanish")]
    ZeroPolynomial,
    #[error("H_x = H_y = 0 along a curve (H_{{n+1}} = a_N x^N y^N)")]
    NonIsolatedSingularities,
    #[error("H_{{n+1}} vanishes identically")]
    LinearSystem,
    #[error("empty carrier")]
    EmptyCarrier,
    #[error("characteristic polynomial of segment {0:?}-{1:?} is degenerate")]
    CharacteristicDegenerate((i64, i64), (i64, i64)),
    #[error("Puiseux branch failure: {0}")]
    BranchFailure(String),
    #[error("ramification tracking lost at t = {0:e}")]
    TrackingLost(f64),
    #[error("loop jumped between y-branches")]
    BranchJump,
    #[error("Newton iteration diverged: {0}")]
    NewtonDivergence(String),
    #[error("quadrature error {0:e} above target after refinement")]
    QuadratureStall(f64),
    #[error("blow-up chart failure: {0}")]
    BlowupChartFailure(String),
    #[error("continuation hit a ramification point near h = {0}")]
    RamificationCollision(String),
    #[error("system does not match monodromy case {0}: {1}")]
    CaseMismatch(u8, String),
    #[error("hypothesis not met: {0}")]
    HypothesisNotMet(String),
}

pub type Result<T> = std::result::Result<T, Error>;
