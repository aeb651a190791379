use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Location-carrying failure from one of the binary or text readers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("bad magic at byte {offset}")]
    BadMagic { offset: u64 },
    #[error("truncated at byte {offset}: expected {expected} more bytes")]
    Truncated { offset: u64, expected: u64 },
    #[error("non-finite value at byte {offset}")]
    NonFinite { offset: u64 },
    #[error("{count} trailing bytes after byte {offset}")]
    TrailingBytes { offset: u64, count: u64 },
    #[error("invalid header at byte {offset}: {message}")]
    Header { offset: u64, message: String },
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
}

impl ParseError {
    pub fn line(line: usize, message: impl Into<String>) -> Self {
        ParseError::Line {
            line,
            message: message.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid pose: {0}")]
    InvalidPose(String),
    #[error("camera escaped the world envelope at frame {frame}")]
    CameraEscapedEnvelope { frame: usize },
    #[error("2D trajectory has no depth source (depth map or depth hint)")]
    MissingDepth,
    #[error("out of frame: {0}")]
    OutOfFrame(String),
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: {message}")]
    Semantic { path: String, message: String },
    #[error("unsupported document version {0:?}")]
    VersionUnsupported(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{}: {source}", path.display())]
    File {
        path: PathBuf,
        #[source]
        source: Box<Error>,
    },
    #[error("image: {0}")]
    Image(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn invalid(message: impl Into<String>) -> Self {
        Error::InvalidArgument(message.into())
    }

    pub fn semantic(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Semantic {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn in_file(self, path: impl Into<PathBuf>) -> Self {
        Error::File {
            path: path.into(),
            source: Box::new(self),
        }
    }

    /// Stable machine-readable kind, used by the CLI error line and the service.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid-argument",
            Error::InvalidPose(_) => "invalid-pose",
            Error::CameraEscapedEnvelope { .. } => "camera-escaped-envelope",
            Error::MissingDepth => "missing-depth",
            Error::OutOfFrame(_) => "out-of-frame",
            Error::Syntax { .. } => "syntax-error",
            Error::Semantic { .. } => "semantic-error",
            Error::VersionUnsupported(_) => "version-unsupported",
            Error::Parse(p) => match p {
                ParseError::BadMagic { .. } => "bad-magic",
                ParseError::Truncated { .. } => "truncated",
                ParseError::NonFinite { .. } => "non-finite",
                ParseError::TrailingBytes { .. } => "trailing-bytes",
                ParseError::Header { .. } | ParseError::Line { .. } => "parse-error",
            },
            Error::File { source, .. } => source.kind(),
            Error::Image(_) => "image-error",
            Error::Io(_) => "io-error",
        }
    }

    /// The innermost error, looking through file wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::File { source, .. } => source.root(),
            other => other,
        }
    }

    /// Frame index carried by the error, if any.
    pub fn frame(&self) -> Option<usize> {
        match self.root() {
            Error::CameraEscapedEnvelope { frame } => Some(*frame),
            _ => None,
        }
    }
}

impl From<image::ImageError> for Error {
    fn from(e: image::ImageError) -> Self {
        Error::Image(e.to_string())
    }
}
