//! Thin async client for the motion scene service.
//!
//! ```no_run
//! # async fn demo(png: Vec<u8>) -> Result<(), motionscene_client::ClientError> {
//! use motionscene_client::{Client, LayerKind};
//! let client = Client::new("http://127.0.0.1:8080")?;
//! let session = client.create_session(&png, None, 16).await?;
//! let frame = client.frame(session.id, 1, LayerKind::Envelope, None).await?;
//! # let _ = frame;
//! # Ok(())
//! # }
//! ```

use std::time::Duration;

use base64::Engine as _;
use reqwest::{Method, Response, StatusCode};
pub use motionscene_service::api::*;

#[derive(Debug, thiserror::Error)]
pub enum ClientError {
    #[error("invalid base url {0:?}")]
    BaseUrl(String),
    #[error("transport: {0}")]
    Transport(#[from] reqwest::Error),
    #[error("{status}: {} ({})", .detail.message, .detail.kind)]
    Api {
        status: StatusCode,
        detail: ErrorDetail,
    },
    #[error("render job {0} did not finish in time")]
    Timeout(u64),
}

impl ClientError {
    /// Service error kind, e.g. `camera-escaped-envelope`.
    pub fn kind(&self) -> &str {
        match self {
            ClientError::Api { detail, .. } => &detail.kind,
            ClientError::BaseUrl(_) => "invalid-argument",
            ClientError::Transport(_) => "transport-error",
            ClientError::Timeout(_) => "timeout",
        }
    }
}

pub type Result<T> = std::result::Result<T, ClientError>;

/// A rendered layer as returned by the service.
#[derive(Debug, Clone, PartialEq)]
pub struct FramePng {
    pub png: Vec<u8>,
    pub version: u64,
    pub cache_hit: bool,
}

#[derive(Debug, Clone)]
pub struct Client {
    http: reqwest::Client,
    base: String,
}

impl Client {
    pub fn new(base_url: &str) -> Result<Self> {
        let base = base_url.trim_end_matches('/').to_string();
        if !(base.starts_with("http://") || base.starts_with("https://")) {
            return Err(ClientError::BaseUrl(base_url.to_string()));
        }
        Ok(Client {
            http: reqwest::Client::new(),
            base,
        })
    }

    pub fn base_url(&self) -> &str {
        &self.base
    }

    async fn call(&self, method: Method, path: &str, body: Option<String>) -> Result<Response> {
        let mut req = self.http.request(method, format!("{}{path}", self.base));
        if let Some(body) = body {
            req = req.header("content-type", "application/json").body(body);
        }
        let resp = req.send().await?;
        if resp.status().is_success() {
            return Ok(resp);
        }
        let status = resp.status();
        let detail = match resp.json::<ErrorBody>().await {
            Ok(body) => body.error,
            Err(_) => ErrorDetail {
                kind: "http-error".into(),
                message: status.to_string(),
                frame: None,
            },
        };
        Err(ClientError::Api { status, detail })
    }

    async fn json<T: serde::de::DeserializeOwned>(
        &self,
        method: Method,
        path: &str,
        body: Option<String>,
    ) -> Result<T> {
        Ok(self.call(method, path, body).await?.json().await?)
    }

    pub async fn create_session(
        &self,
        reference_png: &[u8],
        depth: Option<DepthUpload>,
        frames: usize,
    ) -> Result<SessionInfo> {
        let req = CreateSession {
            reference_png: base64::engine::general_purpose::STANDARD.encode(reference_png),
            depth,
            frames,
        };
        self.json(Method::POST, "/sessions", Some(to_json(&req))).await
    }

    pub async fn session(&self, id: u64) -> Result<SessionInfo> {
        self.json(Method::GET, &format!("/sessions/{id}"), None).await
    }

    pub async fn delete_session(&self, id: u64) -> Result<()> {
        self.call(Method::DELETE, &format!("/sessions/{id}"), None).await?;
        Ok(())
    }

    pub async fn camera(&self, id: u64) -> Result<CameraState> {
        self.json(Method::GET, &format!("/sessions/{id}/camera"), None).await
    }

    pub async fn set_camera(&self, id: u64, update: &CameraUpdate) -> Result<CameraState> {
        self.json(Method::PUT, &format!("/sessions/{id}/camera"), Some(to_json(update)))
            .await
    }

    pub async fn spheres(&self, id: u64) -> Result<SphereList> {
        self.json(Method::GET, &format!("/sessions/{id}/spheres"), None).await
    }

    pub async fn draw_sphere(&self, id: u64, drawn: &DrawnTrajectory) -> Result<SphereChange> {
        self.json(Method::POST, &format!("/sessions/{id}/spheres"), Some(to_json(drawn)))
            .await
    }

    pub async fn redraw_sphere(
        &self,
        id: u64,
        sphere: u32,
        drawn: &DrawnTrajectory,
    ) -> Result<SphereChange> {
        let path = format!("/sessions/{id}/spheres/{sphere}");
        self.json(Method::PUT, &path, Some(to_json(drawn))).await
    }

    pub async fn delete_sphere(&self, id: u64, sphere: u32) -> Result<SphereChange> {
        self.json(Method::DELETE, &format!("/sessions/{id}/spheres/{sphere}"), None)
            .await
    }

    pub async fn start_render(&self, id: u64, first: usize, last: usize) -> Result<RenderJob> {
        let req = RenderRequest { first, last };
        self.json(Method::POST, &format!("/sessions/{id}/render"), Some(to_json(&req)))
            .await
    }

    pub async fn job(&self, id: u64, job: u64) -> Result<RenderJob> {
        self.json(Method::GET, &format!("/sessions/{id}/jobs/{job}"), None).await
    }

    /// Polls a render job until it is done or failed.
    pub async fn wait_job(&self, id: u64, job: u64, timeout: Duration) -> Result<RenderJob> {
        let deadline = tokio::time::Instant::now() + timeout;
        loop {
            let state = self.job(id, job).await?;
            if matches!(state.status, JobStatus::Done | JobStatus::Failed) {
                return Ok(state);
            }
            if tokio::time::Instant::now() >= deadline {
                return Err(ClientError::Timeout(job));
            }
            tokio::time::sleep(Duration::from_millis(20)).await;
        }
    }

    /// One layer as PNG. `opacity` only applies to the composite layer.
    pub async fn frame(
        &self,
        id: u64,
        frame: usize,
        layer: LayerKind,
        opacity: Option<f64>,
    ) -> Result<FramePng> {
        let mut path = format!("/sessions/{id}/frames/{frame}/{}", layer.as_str());
        if let Some(o) = opacity {
            path.push_str(&format!("?opacity={o}"));
        }
        let resp = self.call(Method::GET, &path, None).await?;
        let header = |name: &str| {
            resp.headers()
                .get(name)
                .and_then(|v| v.to_str().ok())
                .map(str::to_string)
        };
        let version = header(VERSION_HEADER)
            .and_then(|v| v.parse().ok())
            .unwrap_or_default();
        let cache_hit = header(CACHE_HEADER).as_deref() == Some("hit");
        let png = resp.bytes().await?.to_vec();
        Ok(FramePng {
            png,
            version,
            cache_hit,
        })
    }

    /// The current scene as a scene document.
    pub async fn export_scene(&self, id: u64) -> Result<String> {
        Ok(self
            .call(Method::GET, &format!("/sessions/{id}/scene"), None)
            .await?
            .text()
            .await?)
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("request types always serialize")
}
