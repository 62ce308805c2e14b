use std::path::PathBuf;

/// Errors raised anywhere in the simulator.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("invalid index: {0}")]
    InvalidIndex(String),

    #[error("invalid embedding: {0}")]
    InvalidEmbedding(String),

    #[error("space mismatch: {0}")]
    SpaceMismatch(String),

    #[error("space shape: {0}")]
    SpaceShape(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("wrong state kind: {0}")]
    WrongKind(String),

    #[error("invalid target: {0}")]
    InvalidTarget(String),

    #[error("numeric validity: {0}")]
    NumericValidity(String),

    #[error("model regime: {0}")]
    ModelRegime(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("truncation too small: tail population {tail:.3e} exceeds {limit:.1e} at truncation {truncation}")]
    TruncationTooSmall { truncation: usize, tail: f64, limit: f64 },

    #[error("integrator accuracy: {what} drift {drift:.3e} at t = {time}; retry with rtol <= {suggested_rtol:.1e}")]
    IntegratorAccuracy {
        what: &'static str,
        drift: f64,
        time: f64,
        suggested_rtol: f64,
    },

    #[error("integrator failure: {0}")]
    Integrator(String),

    #[error("ill-posed: {0}")]
    IllPosed(String),

    #[error("steady state not reached by t = {time}: residual {residual:.3e}")]
    Convergence {
        time: f64,
        residual: f64,
        /// (time, max-norm residual) pairs recorded while marching.
        trajectory: Vec<(f64, f64)>,
    },

    #[error("config error at `{path}`: {msg}")]
    Config { path: String, msg: String },

    #[error("unknown config keys: {}", .0.join(", "))]
    UnknownKeys(Vec<String>),

    #[error("scenario `{scenario}`: {source}")]
    Scenario {
        scenario: String,
        #[source]
        source: Box<Error>,
    },

    #[error("I/O error at {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn config(path: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            msg: msg.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Attach the scenario name to an engine error.
    pub fn in_scenario(self, scenario: &str) -> Self {
        match self {
            e @ Error::Scenario { .. } => e,
            e => Error::Scenario {
                scenario: scenario.to_string(),
                source: Box::new(e),
            },
        }
    }

    /// Process exit code used by the CLI: 1 config, 2 numerical, 3 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Scenario { source, .. } => source.exit_code(),
            Error::Config { .. } | Error::UnknownKeys(_) | Error::ModelRegime(_) => 1,
            Error::TruncationTooSmall { .. } | Error::InvalidTarget(_) => 1,
            Error::Io { .. } => 3,
            _ => 2,
        }
    }
}
