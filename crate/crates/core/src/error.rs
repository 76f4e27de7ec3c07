use thiserror::Error;

/// Errors raised by the algebra kernels.
///
/// Variant names are part of the CLI contract: reports print them verbatim.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("InvalidContext: {0}")]
    InvalidContext(String),
    #[error("ContextMismatch: operands live in different precision contexts or levels")]
    ContextMismatch,
    #[error("NotAUnit: element is divisible by p")]
    NotAUnit,
    #[error("LevelUnderflow: cannot project below level 0")]
    LevelUnderflow,
    #[error("PrecisionExhausted: {0}")]
    PrecisionExhausted(String),
    #[error("DegreeCapExceeded: no unit coefficient below the degree cap")]
    DegreeCapExceeded,
    #[error("NotSquarefreeModP: reduction mod p has repeated factors")]
    NotSquarefreeModP,
    #[error("GroupNotSplit: {0}")]
    GroupNotSplit(String),
    #[error("NotQuadratic: presentation is {rows}x{cols}")]
    NotQuadratic { rows: usize, cols: usize },
    #[error("NotTorsionAtPrecision: every maximal minor vanishes at precision")]
    NotTorsionAtPrecision,
    #[error("UnsupportedShape: {0}")]
    UnsupportedShape(String),
    #[error("TooLarge: {0}")]
    TooLarge(String),
    #[error("DescentViolation at level {level}: {detail}")]
    DescentViolation { level: usize, detail: String },
    #[error("CertificateFailed at level {level}: projected {projected} but found {expected}")]
    CertificateFailed {
        level: usize,
        projected: String,
        expected: String,
    },
    #[error("CapExceeded: quotient ring has {size} elements, cap is {cap}")]
    CapExceeded { size: String, cap: u64 },
    #[error("Mismatch: predicted {predicted} but enumerated {enumerated}")]
    Mismatch {
        predicted: String,
        enumerated: String,
    },
}

impl Error {
    /// Short variant name, used in reports.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidContext(_) => "InvalidContext",
            Error::ContextMismatch => "ContextMismatch",
            Error::NotAUnit => "NotAUnit",
            Error::LevelUnderflow => "LevelUnderflow",
            Error::PrecisionExhausted(_) => "PrecisionExhausted",
            Error::DegreeCapExceeded => "DegreeCapExceeded",
            Error::NotSquarefreeModP => "NotSquarefreeModP",
            Error::GroupNotSplit(_) => "GroupNotSplit",
            Error::NotQuadratic { .. } => "NotQuadratic",
            Error::NotTorsionAtPrecision => "NotTorsionAtPrecision",
            Error::UnsupportedShape(_) => "UnsupportedShape",
            Error::TooLarge(_) => "TooLarge",
            Error::DescentViolation { .. } => "DescentViolation",
            Error::CertificateFailed { .. } => "CertificateFailed",
            Error::CapExceeded { .. } => "CapExceeded",
            Error::Mismatch { .. } => "Mismatch",
        }
    }

    /// True for failures caused by running out of p-adic or degree precision.
    pub fn is_precision(&self) -> bool {
        matches!(
            self,
            Error::PrecisionExhausted(_) | Error::DegreeCapExceeded | Error::NotTorsionAtPrecision
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
