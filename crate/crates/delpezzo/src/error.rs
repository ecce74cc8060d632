use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed configuration: {0}")]
    MalformedConfig(String),
    #[error("not a weak del Pezzo surface: {reason} (witness {witness})")]
    NotWeakDelPezzo { reason: String, witness: String },
    #[error("classes live on different surfaces")]
    MismatchedAmbient,
    #[error("not a pencil: {0}")]
    NotAPencil(String),
    #[error("fixed-part subtraction did not terminate")]
    FixedPointFailure,
    #[error("no integral fiber decomposition: {0}")]
    NoIntegralSolution(String),
    #[error("(-2)-curve pairing graph is not an ADE diagram: {0}")]
    NotAde(String),
    #[error("unknown Kodaira fiber tag: {0}")]
    UnknownFiberTag(String),
    #[error("no effective identity found with k <= {0}")]
    IdentityNotFound(u32),
    #[error("unknown hierarchy dag: {0}")]
    UnknownDag(String),
    #[error("conflicting facts for node {node}:\n{detail}")]
    Conflict { node: String, detail: String },
    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
