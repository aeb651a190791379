use std::path::Path;

use motionscene_client::{ClientError, ErrorBody, ErrorDetail};

/// A failed command, printed as one JSON line on stderr.
#[derive(Debug)]
pub struct Failure(pub ErrorDetail);

impl Failure {
    pub fn new(kind: &str, message: impl Into<String>) -> Self {
        Failure(ErrorDetail {
            kind: kind.into(),
            message: message.into(),
            frame: None,
        })
    }

    pub fn invalid(message: impl Into<String>) -> Self {
        Failure::new("invalid-argument", message)
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        Failure::new("io-error", format!("{}: {e}", path.display()))
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(&ErrorBody {
            error: self.0.clone(),
        })
        .expect("error body serializes")
    }
}

impl From<motionscene::Error> for Failure {
    fn from(e: motionscene::Error) -> Self {
        Failure(ErrorDetail {
            kind: e.kind().into(),
            message: e.to_string(),
            frame: e.frame(),
        })
    }
}

impl From<ClientError> for Failure {
    fn from(e: ClientError) -> Self {
        match e {
            ClientError::Api { detail, .. } => Failure(detail),
            other => Failure::new(other.kind(), other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::new("io-error", e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::new("syntax-error", e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::new("parse-error", e.to_string())
    }
}
