use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("invalid distance {0} m (must be > 0)")]
    InvalidDistance(f64),

    #[error("location {0} serves no tiles")]
    EmptyTileSet(usize),

    #[error("index error: {0}")]
    Index(String),

    #[error("team {0} has no users")]
    NoUsers(usize),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("instance too large: {count} joint profiles exceeds limit {limit}")]
    TooLarge { count: u128, limit: u128 },

    #[error("all values are zero")]
    AllZero,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error in {file}: {message}")]
    Parse { file: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
