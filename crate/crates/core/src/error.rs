use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid topology: {0}")]
    Topology(String),
    #[error("invalid instance: {0}")]
    Instance(String),
    #[error("malformed model: {0}")]
    Model(String),
    #[error("LP format error on line {line}: {message}")]
    LpFormat { line: usize, message: String },
    #[error("phase `{phase}` is infeasible after {retries} retries: {detail}")]
    Infeasible {
        phase: String,
        retries: usize,
        detail: String,
    },
    #[error("phase `{phase}` stopped at a solver limit ({status}) without an incumbent")]
    NoIncumbent { phase: String, status: String },
    #[error("instance exceeds the brute-force bounds: {0}")]
    OracleBounds(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
