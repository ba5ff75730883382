use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("config error{}: {msg}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Config { line: Option<usize>, msg: String },

    #[error("invalid value for `{field}`: {msg}")]
    Validation { field: &'static str, msg: String },

    #[error("argument error: {0}")]
    Argument(String),

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("out of range: {0}")]
    Range(String),

    #[error("step size underflow at t = {t} ps (h = {h:e} ps)")]
    Stiffness { t: f64, h: f64 },

    #[error("two-photon density matrix has no weight to normalize (trace = {0:e})")]
    DegenerateNormalization(f64),

    #[error("{module}: {source}")]
    Context {
        module: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Wraps the error with the name of the pipeline stage that produced it.
    pub fn in_module(self, module: &'static str) -> Self {
        Error::Context {
            module,
            source: Box::new(self),
        }
    }

    /// Returns the innermost error, skipping `Context` wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Context { source, .. } => source.root(),
            e => e,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
