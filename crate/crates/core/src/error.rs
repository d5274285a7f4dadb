use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid circuit: {0}")]
    Circuit(String),
    #[error("format error: {0}")]
    Format(String),
    #[error("bad magic bytes")]
    BadMagic,
    #[error("unsupported format version {0}")]
    Version(u8),
    #[error("file truncated")]
    Truncated,
    #[error("checksum mismatch: stored {stored:#018x}, computed {computed:#018x}")]
    Checksum { stored: u64, computed: u64 },
    #[error("database too shallow: need depth {need}, have {have}")]
    TooShallow { need: usize, have: usize },
    #[error("resource budget exceeded: {0}")]
    Budget(String),
    #[error("singular matrix")]
    Singular,
    #[error("unknown target `{0}`")]
    UnknownTarget(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
