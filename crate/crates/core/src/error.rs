use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabError {
    #[error("leading principal minor {0} vanishes; matrix is not in B_-B")]
    NotInOpenCell(usize),
    #[error("rank decision is ambiguous: singular value {value:e} is within a decade of the threshold {threshold:e}")]
    RankAmbiguous { value: f64, threshold: f64 },
    #[error("element is not in the requested cell: {0}")]
    WrongCell(String),
    #[error("sampler exhausted its retry budget ({0} attempts)")]
    SamplerExhausted(usize),
    #[error("torus element is not regular semisimple")]
    NotRegularSemisimple,
    #[error("stratum is empty: {0}")]
    EmptyStratum(String),
    #[error("point is not in X_t: {0}")]
    NotInXt(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, LabError>;
