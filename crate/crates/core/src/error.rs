use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("rotation number is rational")]
    RationalRotation,
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("depth overflow: {0}")]
    DepthOverflow(String),
    #[error("search exhausted: {0}")]
    SearchExhausted(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("window has empty interior")]
    EmptyWindow,
    #[error("germ undecidable at this depth: radius {radius:.3e} below resolution {resolution:.3e}")]
    GermUndecidable { radius: f64, resolution: f64 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit code used by the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::DepthOverflow(_) | Error::SearchExhausted(_) => 3,
            Error::Io(_) | Error::Json(_) | Error::Csv(_) => 1,
            _ => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Error::RationalRotation => "RationalRotation",
            Error::ZeroDenominator => "ZeroDenominator",
            Error::DepthOverflow(_) => "DepthOverflow",
            Error::SearchExhausted(_) => "SearchExhausted",
            Error::Precondition(_) => "PreconditionViolated",
            Error::EmptyWindow => "EmptyWindow",
            Error::GermUndecidable { .. } => "GermUndecidable",
            Error::Parse(_) => "ParseError",
            Error::Io(_) => "Io",
            Error::Json(_) => "Json",
            Error::Csv(_) => "Csv",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
