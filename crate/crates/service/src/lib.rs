//! HTTP/JSON service for authoring motion scenes.
//!
//! Sessions hold a reference image, an optional depth map and the current
//! scene. Every edit produces a new scene version; rendered frames are cached
//! per version and dropped when the scene changes.

pub mod api;
pub mod error;
pub mod routes;
pub mod state;

use std::sync::Arc;

pub use api::*;
pub use error::ApiError;
pub use routes::router;
pub use state::Store;

/// Listen port from the environment, falling back to [`DEFAULT_PORT`].
pub fn port_from_env() -> Result<u16, String> {
    match std::env::var(PORT_ENV) {
        Err(_) => Ok(DEFAULT_PORT),
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| format!("{PORT_ENV}={v:?} is not a port number")),
    }
}

/// Serves a fresh store on `listener` until the process stops.
pub async fn serve(listener: tokio::net::TcpListener) -> std::io::Result<()> {
    let app = router(Arc::new(Store::default()));
    if let Ok(addr) = listener.local_addr() {
        tracing::info!(%addr, "listening");
    }
    axum::serve(listener, app).await
}
