//! HTTP facade and persistence for the FSN knowledge base: JSON API, edit
//! journal and `<piechart>` documents.

pub mod api;
pub mod config;
pub mod error;
pub mod journal;
pub mod piedoc;
pub mod state;

use std::future::Future;
use std::net::SocketAddr;
use std::sync::Arc;

use tokio::net::TcpListener;

pub use api::router;
pub use config::{Cli, Config};
pub use error::{ApiError, ERROR_TABLE};
pub use journal::{Journal, JournalRecord};
pub use piedoc::{export_pie_document, import_pie_document, PieDocError, PieDocument, Slice};
pub use state::{AppState, CommitError, ServiceError, Snapshot};

/// A loaded state bound to a listening socket.
pub struct Server {
    listener: TcpListener,
    state: Arc<AppState>,
}

impl Server {
    /// Opens the data directory, then binds `config.bind:config.port`.
    pub async fn bind(config: &Config) -> Result<Self, ServiceError> {
        let state = Arc::new(AppState::open(config)?);
        let listener = TcpListener::bind((config.bind, config.port)).await.map_err(|e| {
            if e.kind() == std::io::ErrorKind::AddrInUse {
                ServiceError::PortInUse(config.port)
            } else {
                ServiceError::Io(e)
            }
        })?;
        Ok(Self { listener, state })
    }

    pub fn local_addr(&self) -> std::io::Result<SocketAddr> {
        self.listener.local_addr()
    }

    pub fn state(&self) -> Arc<AppState> {
        self.state.clone()
    }

    pub async fn run(self, shutdown: impl Future<Output = ()> + Send + 'static) -> std::io::Result<()> {
        axum::serve(self.listener, router(self.state))
            .with_graceful_shutdown(shutdown)
            .await
    }
}

pub async fn serve(config: &Config) -> Result<(), ServiceError> {
    let server = Server::bind(config).await?;
    eprintln!("fsn-service listening on http://{}", server.local_addr()?);
    server
        .run(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
