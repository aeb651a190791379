use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;

use crate::api::{ErrorBody, ErrorDetail};

#[derive(Debug)]
pub enum ApiError {
    NotFound(String),
    Core(motionscene::Error),
}

impl ApiError {
    pub fn detail(&self) -> ErrorDetail {
        match self {
            ApiError::NotFound(message) => ErrorDetail {
                kind: "not-found".into(),
                message: message.clone(),
                frame: None,
            },
            ApiError::Core(e) => ErrorDetail {
                kind: e.kind().into(),
                message: e.to_string(),
                frame: e.frame(),
            },
        }
    }

    pub fn status(&self) -> StatusCode {
        match self {
            ApiError::NotFound(_) => StatusCode::NOT_FOUND,
            ApiError::Core(e) => match e.root() {
                motionscene::Error::CameraEscapedEnvelope { .. } => StatusCode::UNPROCESSABLE_ENTITY,
                motionscene::Error::Io(_) => StatusCode::INTERNAL_SERVER_ERROR,
                _ => StatusCode::BAD_REQUEST,
            },
        }
    }

    pub fn invalid(message: impl Into<String>) -> Self {
        ApiError::Core(motionscene::Error::invalid(message))
    }
}

impl From<motionscene::Error> for ApiError {
    fn from(e: motionscene::Error) -> Self {
        ApiError::Core(e)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status(), Json(ErrorBody { error: self.detail() })).into_response()
    }
}
