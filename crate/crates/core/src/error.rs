use thiserror::Error;

/// Failures of the note-matrix, feature and statistics layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("voice selection yielded no notes")]
    EmptyVoice,
    #[error("note matrix is not flagged monophonic; run enforce_monophony first")]
    NotMonophonic,
    #[error("empty input")]
    EmptyInput,
    #[error("sample lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("sample '{0}' has zero variance")]
    ZeroVariance(String),
    #[error("degenerate sample: n = {0}, at least 3 values required")]
    DegenerateSample(usize),
    #[error("incomplete beta continued fraction did not converge for a = {a}, b = {b}, x = {x}")]
    NonConvergence { a: String, b: String, x: String },
    #[error("sample '{0}' contains a non-finite value")]
    NonFinite(String),
    #[error("invalid voice selector: {0}")]
    InvalidSelector(String),
}
