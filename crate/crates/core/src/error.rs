use thiserror::Error;

/// Errors produced across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("expression is not an exact x-derivative: {0}")]
    NotExact(String),
    #[error("no value assigned to `{0}`")]
    MissingAssignment(String),
    #[error("density contains t-derivatives: {0}")]
    TJetInDensity(String),
    #[error("parse error at offset {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("gauge window too narrow: need generator components down to grade -{needed}, have -{have}")]
    WindowTooNarrow { needed: usize, have: usize },
    #[error("underdetermined system at grade {grade}: {msg}")]
    UnderdeterminedSystem { grade: i32, msg: String },
    #[error("element has an identity component and cannot be written in the loop basis")]
    NotTraceless,
    #[error("Lax matrix does not have the form required for diagonal rotation: {0}")]
    NotRotatable(String),
    #[error("nonzero residual at positive grade {grade} ({component}) without deformer content")]
    PositiveGradeResidual { grade: i32, component: String },
    #[error("constraint system not reducible: {0}")]
    NotReducible(String),
    #[error("deformer system not resolvable by potentials: {0}")]
    NotResolvable(String),
    #[error("density not supported by the numerical compiler: {0}")]
    UnsupportedDensity(String),
    #[error("solution blew up at t = {t}")]
    BlowUp { t: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("golden file mismatch: {0}")]
    GoldenMismatch(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
