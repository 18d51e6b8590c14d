use core::fmt;

/// Errors raised by the numerical core.
///
/// Variants carry the offending quantity where one exists so callers can
/// build a diagnostic without re-deriving it.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Matrix failed the Hermiticity check; payload is `max |M - M†|`.
    NotHermitian(f64),
    /// Square root requested of a matrix with an eigenvalue below `-1e-12`.
    NegativeEigenvalue(f64),
    /// Logarithm floor must be strictly positive.
    InvalidFloor(f64),
    /// Density-matrix invariant violated.
    InvalidState(&'static str),
    /// Relative entropy against a reference with an eigenvalue below the floor.
    SingularReference(f64),
    /// Model parameters out of range.
    InvalidParams(&'static str),
    /// `|G(t)|` too small for the time-local rate `gamma(t)` to be finite.
    RateSingular { t: f64 },
    /// RK4 local error estimate above the accepted threshold.
    StepSizeTooCoarse { t: f64, estimate: f64 },
    /// Time grid with no extent or too few points.
    GridDegenerate,
    /// Simpson-style grids need an even number of subintervals.
    OddSubintervals(usize),
    /// Requested time lies beyond the end of the trajectory grid.
    GridTooShort { tau: f64, tmax: f64 },
    /// Time grid is not uniformly spaced.
    NonUniformGrid,
    /// Reference time for average power is not a grid point.
    OffGrid(f64),
    /// Closed-form radicand below the roundoff window.
    NumericalDomain(f64),
    /// Population swap produced a non-positive matrix.
    NotAState,
    /// Argument of an inverse cosine outside its domain.
    DomainError(f64),
    /// Non-trivial distance travelled with an identically zero generator.
    ZeroGenerator { tau: f64 },
    /// A clamped logarithm exceeded the magnitude that signals a bad floor.
    FloorTooSmall(f64),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotHermitian(d) => write!(f, "matrix is not Hermitian (max deviation {d:e})"),
            Error::NegativeEigenvalue(v) => write!(f, "negative eigenvalue {v:e} under square root"),
            Error::InvalidFloor(v) => write!(f, "logarithm floor must be > 0, got {v:e}"),
            Error::InvalidState(why) => write!(f, "invalid density matrix: {why}"),
            Error::SingularReference(v) => {
                write!(f, "reference state has eigenvalue {v:e} below the floor")
            }
            Error::InvalidParams(why) => write!(f, "invalid model parameters: {why}"),
            Error::RateSingular { t } => write!(f, "decay rate is singular at t = {t}"),
            Error::StepSizeTooCoarse { t, estimate } => {
                write!(f, "RK4 local error {estimate:e} too large near t = {t}")
            }
            Error::GridDegenerate => f.write_str("time grid is degenerate"),
            Error::OddSubintervals(n) => write!(f, "subinterval count {n} must be even"),
            Error::GridTooShort { tau, tmax } => {
                write!(f, "tau = {tau} exceeds trajectory length {tmax}")
            }
            Error::NonUniformGrid => f.write_str("time grid is not uniform"),
            Error::OffGrid(t) => write!(f, "t0 = {t} is not a grid point"),
            Error::NumericalDomain(v) => write!(f, "radicand {v:e} is negative beyond roundoff"),
            Error::NotAState => f.write_str("coherence-invariant state is not positive"),
            Error::DomainError(v) => write!(f, "inverse cosine argument {v} outside [0, 1]"),
            Error::ZeroGenerator { tau } => {
                write!(f, "generator vanishes on [0, {tau}] but the state moved")
            }
            Error::FloorTooSmall(v) => write!(f, "clamped logarithm magnitude {v:e} exceeds 1e3"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
