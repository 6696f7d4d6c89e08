//! Crate-wide error type.

use std::fmt;

/// Errors produced by parsing, geometry, estimation, and the experiment harness.
#[derive(Debug)]
pub enum Error {
    /// A Yuma almanac block could not be parsed. `block` names the PRN when
    /// known, otherwise the block index.
    YumaParse {
        block: String,
        line: String,
        reason: String,
    },
    /// Kepler's equation did not converge within the iteration budget.
    KeplerNonConvergence {
        mean_anomaly: f64,
        eccentricity: f64,
        residual: f64,
    },
    /// Orbit propagation was requested for an unhealthy almanac entry.
    UnhealthySatellite { prn: u32 },
    /// Two points that must be distinct coincide (zero-length line of sight).
    CoincidentPoints,
    /// The elevation angle sits at the gimbal point of the asin parameterization.
    ElevationSingularity { bs_index: usize },
    /// A vector or matrix dimension does not match its contract.
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },
    /// Reference satellite index out of range.
    RefIndexOutOfRange { ref_index: usize, n_sats: usize },
    /// A normal matrix is numerically rank deficient.
    RankDeficient { dim: usize, rcond: f64 },
    /// A matrix that must be symmetric positive definite is not; `pivot` is
    /// the index of the first non-positive pivot.
    NotPositiveDefinite { pivot: usize },
    /// Brute-force integer search rejected an instance that is too large.
    SearchTooLarge { dim: usize, max: usize },
    /// The (N, L) configuration has fewer observations than unknowns.
    Nonlocalizable {
        n_sats: usize,
        n_bs: usize,
        n_obs: usize,
        n_unknowns: usize,
    },
    /// The requested initialization mode cannot run on this configuration.
    InitUnavailable {
        mode: &'static str,
        n_sats: usize,
        n_bs: usize,
    },
    /// The descent iteration produced a non-finite cost.
    Divergence { iterations: usize },
    /// Scenario construction failed (e.g. not enough visible satellites).
    Scenario { reason: String },
    /// Experiment configuration file is invalid.
    Config { line: Option<usize>, reason: String },
    /// Underlying I/O failure.
    Io(std::io::Error),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::YumaParse {
                block,
                line,
                reason,
            } => write!(f, "yuma parse error in block {block}: {reason} (line: {line:?})"),
            Error::KeplerNonConvergence {
                mean_anomaly,
                eccentricity,
                residual,
            } => write!(
                f,
                "kepler solver did not converge for M={mean_anomaly}, e={eccentricity} (residual {residual:.3e})"
            ),
            Error::UnhealthySatellite { prn } => {
                write!(f, "refusing to propagate unhealthy satellite PRN {prn}")
            }
            Error::CoincidentPoints => write!(f, "coincident points have no line of sight"),
            Error::ElevationSingularity { bs_index } => write!(
                f,
                "elevation at +/-pi/2 for base station {bs_index}: azimuth/elevation parameterization is singular"
            ),
            Error::DimensionMismatch {
                context,
                expected,
                actual,
            } => write!(f, "{context}: expected dimension {expected}, got {actual}"),
            Error::RefIndexOutOfRange { ref_index, n_sats } => {
                write!(f, "reference index {ref_index} out of range for {n_sats} satellites")
            }
            Error::RankDeficient { dim, rcond } => write!(
                f,
                "normal matrix of dimension {dim} is rank deficient (rcond ~ {rcond:.3e})"
            ),
            Error::NotPositiveDefinite { pivot } => {
                write!(f, "matrix is not positive definite (pivot {pivot})")
            }
            Error::SearchTooLarge { dim, max } => {
                write!(f, "brute-force search dimension {dim} exceeds maximum {max}")
            }
            Error::Nonlocalizable {
                n_sats,
                n_bs,
                n_obs,
                n_unknowns,
            } => write!(
                f,
                "configuration N={n_sats}, L={n_bs} is nonlocalizable: {n_obs} observations < {n_unknowns} unknowns"
            ),
            Error::InitUnavailable { mode, n_sats, n_bs } => write!(
                f,
                "initialization mode {mode} unavailable for N={n_sats}, L={n_bs}"
            ),
            Error::Divergence { iterations } => {
                write!(f, "descent diverged to a non-finite cost after {iterations} iterations")
            }
            Error::Scenario { reason } => write!(f, "scenario error: {reason}"),
            Error::Config { line, reason } => match line {
                Some(n) => write!(f, "config error at line {n}: {reason}"),
                None => write!(f, "config error: {reason}"),
            },
            Error::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(e) => Some(e),
            _ => None,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
