use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("bad flow magic {0}")]
    BadMagic(f32),
    #[error("file truncated: expected {expected} bytes, found {found}")]
    TruncatedFile { expected: usize, found: usize },
    #[error("non-positive dimensions {width}x{height}")]
    NonPositiveDims { width: i64, height: i64 },
    #[error("bad header: {0}")]
    BadHeader(String),
    #[error("run lengths sum to {sum}, expected {expected}")]
    RunSumMismatch { sum: u64, expected: u64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("no pixel is valid in both flow and depth")]
    NoValidPixels,
    #[error("empty frame sequence")]
    EmptySequence,
    #[error("window [{start}, {start}+{length}) out of range for {count} intervals")]
    OutOfRange {
        start: usize,
        length: usize,
        count: usize,
    },
    #[error("prediction for {candidate} does not match the window grid: {detail}")]
    WindowCountMismatch { candidate: String, detail: String },
    #[error("candidate {0} has no frame embeddings")]
    NoCandidateEmbeddings(String),
    #[error("confidence needs at least 2 candidates, got {0}")]
    TooFewCandidates(usize),
    #[error("video {0} has missing or duplicate sequence order")]
    UnorderedVideo(String),
    #[error("wearers connect every video; no wearer-disjoint partition exists")]
    InfeasiblePartition,
    #[error("split has an empty {0} side")]
    EmptySide(&'static str),
    #[error("artifact missing: {}", .0.display())]
    ArtifactMissing(PathBuf),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{}: {source}", path.display())]
    InFile {
        path: PathBuf,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn json(path: impl Into<PathBuf>, source: serde_json::Error) -> Self {
        Error::Json {
            path: path.into(),
            source,
        }
    }

    /// Attaches the offending file to a format error.
    pub(crate) fn in_file(self, path: impl Into<PathBuf>) -> Self {
        match self {
            e @ (Error::Io { .. } | Error::Json { .. } | Error::InFile { .. }) => e,
            Error::ArtifactMissing(p) => Error::ArtifactMissing(p),
            other => Error::InFile {
                path: path.into(),
                source: Box::new(other),
            },
        }
    }

    /// The error with any file context stripped.
    pub fn root(&self) -> &Error {
        match self {
            Error::InFile { source, .. } => source.root(),
            e => e,
        }
    }

    /// True for malformed or missing inputs, false for violated preconditions
    /// and configuration errors.
    pub fn is_input_error(&self) -> bool {
        match self {
            Error::InFile { source, .. } => source.is_input_error(),
            Error::BadMagic(_)
            | Error::TruncatedFile { .. }
            | Error::NonPositiveDims { .. }
            | Error::BadHeader(_)
            | Error::RunSumMismatch { .. }
            | Error::ArtifactMissing(_)
            | Error::InvalidInput(_)
            | Error::Io { .. }
            | Error::Json { .. } => true,
            _ => false,
        }
    }
}
