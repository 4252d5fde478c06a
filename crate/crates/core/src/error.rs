use thiserror::Error;

/// Errors produced by corpus ingestion and the analysis operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: malformed event record: {message}")]
    MalformedRecord { line: usize, message: String },

    #[error("line {line}: day {day} outside observation window [1, {horizon}]")]
    DayOutOfWindow { line: usize, day: i64, horizon: u32 },

    #[error("day {day} out of range [1, {horizon}]")]
    DayOutOfRange { day: u32, horizon: u32 },

    #[error("unknown blog identifier `{0}`")]
    UnknownBlog(String),

    #[error("unknown URL identifier `{0}`")]
    UnknownUrl(String),

    #[error("edge ({0}, {1}) does not exist in the aggregated graph")]
    NoSuchEdge(String, String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("window scheme exceeds corpus horizon: t0={t0}, T={window_len}, windows={windows} needs day {needed} but horizon is {horizon}")]
    WindowExceedsHorizon {
        t0: u32,
        window_len: u32,
        windows: u32,
        needed: u32,
        horizon: u32,
    },

    #[error("malformed index file: {0}")]
    MalformedIndex(String),

    #[error("malformed manifest: {0}")]
    MalformedManifest(String),

    #[error("malformed generator config: {0}")]
    MalformedConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors caused by the underlying I/O layer rather than
    /// invalid input content. Used by the CLI to pick its exit code.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io(_))
    }
}
