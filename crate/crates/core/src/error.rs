use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("latency estimator has {count} cached objects but a zero mean latency")]
    EstimatorState { count: u64 },

    #[error("data for object {rank} arrived with no recorded forward")]
    MissingForward { rank: u32 },

    #[error("object {rank} is already cached")]
    AlreadyCached { rank: u32 },

    #[error("protocol error at node {node}: {msg}")]
    Protocol { node: usize, msg: String },

    #[error("invalid path model: {0}")]
    PathModel(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unknown preset `{0}` (expected single, line or tree)")]
    UnknownPreset(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("config parse error: {0}")]
    Toml(#[from] toml::de::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
