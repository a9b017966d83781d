use thiserror::Error;

/// Why a chord fails to be minor-like.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MinorLikeViolation {
    /// No sibling pair of preimages has length at least 1/3.
    NoLongPreimagePair,
    /// The chord enters the interior of its candidate central strip.
    MeetsStripInterior,
}

impl std::fmt::Display for MinorLikeViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MinorLikeViolation::NoLongPreimagePair => {
                f.write_str("no sibling preimage pair of length >= 1/3")
            }
            MinorLikeViolation::MeetsStripInterior => {
                f.write_str("chord meets the interior of its central strip")
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum QmlError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("not minor-like: {0}")]
    NotMinorLike(MinorLikeViolation),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T, E = QmlError> = std::result::Result<T, E>;
