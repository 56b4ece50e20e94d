use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid graph spec: {0}")]
    InvalidGraph(String),
    #[error("vertex {0} lies outside the window")]
    OutsideWindow(String),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("radius index range too small: have [-{have}, {have}], need at least [-{need}, {need}]")]
    InsufficientRange { have: u64, need: u64 },
    #[error("moment functions need a finite-mean law: {0}")]
    InfiniteMean(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid probability {name} = {value}")]
    InvalidProbability { name: &'static str, value: f64 },
    #[error("cones overlap inside the window")]
    OverlappingCones,
    #[error("no index k in the window satisfies the A_k event")]
    EmptyIndexSet,
    #[error("series tail could not be certified: {0}")]
    NoTailCertificate(String),
    #[error("no admissible value: {0}")]
    NoAdmissible(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid config: {0}")]
    Config(String),
    #[error("invalid config field `{field}`: {msg}")]
    InvalidField { field: String, msg: String },
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// Whether the error comes from bad input rather than a failed run.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidGraph(_)
                | Error::InvalidDistribution(_)
                | Error::InvalidProbability { .. }
                | Error::Parse { .. }
                | Error::Config(_)
                | Error::InvalidField { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
