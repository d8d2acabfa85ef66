use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    Domain {
        what: &'static str,
        value: f64,
    },
    /// A precondition on the arguments does not hold.
    InvalidArgument(&'static str),
    DimensionMismatch {
        expected: usize,
        found: usize,
    },
    Parse {
        position: usize,
        message: String,
    },
    /// Adaptive quadrature needed more panels than allowed.
    ConvergenceFailure {
        panels: usize,
    },
    LengthCap {
        len: usize,
        cap: usize,
    },
    IncompleteCoverage(&'static str),
    /// `⌊P(n)⌋` left the range where doubles represent every integer.
    OrbitOverflow {
        n: u64,
    },
    GridTooSmall {
        wraparound: f64,
    },
    ClassificationMismatch(&'static str),
    /// Every randomized trial degenerated.
    Degenerate,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain { what, value } => write!(f, "domain error: {what} (got {value})"),
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::Parse { position, message } => {
                write!(f, "parse error at byte {position}: {message}")
            }
            Error::ConvergenceFailure { panels } => {
                write!(f, "quadrature did not converge with {panels} panels")
            }
            Error::LengthCap { len, cap } => {
                write!(f, "sequence length {len} exceeds the brute-force cap {cap}")
            }
            Error::IncompleteCoverage(msg) => write!(f, "incomplete block coverage: {msg}"),
            Error::OrbitOverflow { n } => {
                write!(f, "floor orbit value at n = {n} exceeds 2^53")
            }
            Error::GridTooSmall { wraparound } => write!(
                f,
                "grid too small: wraparound carries {wraparound:e} of the kernel mass"
            ),
            Error::ClassificationMismatch(msg) => write!(f, "classification mismatch: {msg}"),
            Error::Degenerate => write!(f, "all trials degenerate"),
        }
    }
}

impl core::error::Error for Error {}
