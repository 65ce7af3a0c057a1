use thiserror::Error;

/// Errors raised anywhere in the pipeline.
///
/// The CLI maps each variant onto an exit code through [`Error::kind`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("rejected digits {0:?}: need at least two digits, all >= 1")]
    RejectedDigits(Vec<u32>),
    #[error("operands belong to different fields")]
    MixedFields,
    #[error("sign undecided after refining beta to {bits} bits")]
    PrecisionExhausted { bits: u64 },
    #[error("conjugate modulus enclosure straddles 1: {0}")]
    Inconclusive(String),
    #[error("digits {digits:?} are not the greedy expansion of 1 (greedy orbit gives {found:?})")]
    NotGreedy { digits: Vec<u32>, found: Vec<u32> },
    #[error("point lies outside [0, floor(beta)/(beta-1)]")]
    OutOfDomain,
    #[error("omega word exhausted after {0} symbols")]
    OmegaExhausted(usize),
    #[error("orbit closure exceeded {0} points")]
    ClosureExceededCap(usize),
    #[error("a point of F lies inside the overlap region S_{0}")]
    P3Violation(u32),
    #[error("image of cell {from} covers cell {to} only partially")]
    PartialOverlap { from: usize, to: usize },
    #[error("kernel of A - {eigenvalue}I has dimension {dim}, expected 1")]
    EigenvalueMismatch { eigenvalue: u32, dim: usize },
    #[error("iterate {step} lands on a point of F")]
    HitF { step: usize },
    #[error("ratio out of range: {0}")]
    RatioOutOfRange(String),
    #[error("horizon {k} exceeds the exhaustive limit {max}")]
    HorizonTooLarge { k: usize, max: usize },
    #[error("p must lie strictly between 0 and 1")]
    DegenerateP,
    #[error("malformed word: {0}")]
    MalformedWord(String),
    #[error("operation requires the golden ratio field (digits 1,1)")]
    NotGolden,
    #[error("no inverse: {0}")]
    NotInvertible(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("model validation failed: {0}")]
    InvalidModel(String),
}

/// Coarse error classes, used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Usage,
    Validation,
    Precision,
    Internal,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        use Error::*;
        match self {
            RejectedDigits(_) | Parse(_) | DegenerateP | MalformedWord(_) | NotGolden
            | HorizonTooLarge { .. } | OutOfDomain | RatioOutOfRange(_) | OmegaExhausted(_) => {
                ErrorKind::Usage
            }
            NotGreedy { .. } | ClosureExceededCap(_) | P3Violation(_) | PartialOverlap { .. }
            | EigenvalueMismatch { .. } | HitF { .. } | InvalidModel(_) => ErrorKind::Validation,
            PrecisionExhausted { .. } | Inconclusive(_) => ErrorKind::Precision,
            MixedFields | NotInvertible(_) => ErrorKind::Internal,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
