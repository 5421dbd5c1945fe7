use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    Graph(String),
    #[error("invalid graph map: {0}")]
    Map(String),
    #[error("spectral computation failed: {0}")]
    Spectral(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("Nielsen path present: {0}")]
    NielsenPathPresent(String),
    #[error("Nielsen path search inconclusive at bound {bound}; increase the bound")]
    UnknownAtBound { bound: usize },
    #[error("fold decomposition failed: {0}")]
    Fold(String),
    #[error("oracle disagreement: {0}")]
    OracleMismatch(String),
    #[error("not a lone axis: {0}")]
    NotLoneAxis(String),
    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("line {line}: {check}: {message}")]
    Semantic { line: usize, check: &'static str, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn at_stage(self, stage: &'static str) -> Error {
        Error::Stage { stage, source: Box::new(self) }
    }
}
