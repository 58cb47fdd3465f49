//! The MiBoard game server: sessions, matchmaking and one task per running
//! game, reached over WebSocket.

pub mod clock;
pub mod config;
pub mod frames;
pub mod lobby;
pub mod net;
pub mod room;

use std::net::SocketAddr;
use std::sync::Arc;
use std::time::Duration;

use anyhow::Context;
use axum::serve::ListenerExt;
use miboard_core::persistence::corpus::Corpus;
use tokio::sync::oneshot;
use tokio::task::JoinHandle;

pub use clock::Clock;
pub use config::{Overrides, ServerConfig};
pub use lobby::Lobby;

/// A server listening on a socket.
pub struct Server {
    pub addr: SocketAddr,
    pub lobby: Arc<Lobby>,
    stop: oneshot::Sender<()>,
    task: JoinHandle<std::io::Result<()>>,
}

impl Server {
    /// Loads the corpus, binds `0.0.0.0:<port>` and starts serving.
    pub async fn start(config: ServerConfig) -> anyhow::Result<Server> {
        let corpus = Corpus::load(&config.corpus, &config.rules.reasons)
            .with_context(|| format!("loading corpus from {}", config.corpus.display()))?;
        std::fs::create_dir_all(&config.log_dir).with_context(|| format!("creating {}", config.log_dir.display()))?;
        let clock = if config.virtual_clock { Clock::virtual_clock() } else { Clock::Wall };
        let seed = config.seed.unwrap_or_else(rand::random);
        tracing::info!(texts = corpus.len(), seed, virtual_clock = config.virtual_clock, "starting");
        let lobby = Arc::new(Lobby::new(&config.zones, corpus, config.rules.clone(), seed, clock, config.log_dir.clone()));
        let app = net::App {
            lobby: lobby.clone(),
            heartbeat: Duration::from_secs(config.heartbeat_secs.max(1)),
            missed_heartbeats: config.missed_heartbeats.max(1),
        };
        let listener = tokio::net::TcpListener::bind(("0.0.0.0", config.port))
            .await
            .with_context(|| format!("binding port {}", config.port))?;
        let addr = listener.local_addr()?;
        // Frames are small and lockstep clients wait on each one.
        let listener = listener.tap_io(|tcp| {
            let _ = tcp.set_nodelay(true);
        });
        let (stop, stopped) = oneshot::channel::<()>();
        let task = tokio::spawn(async move {
            axum::serve(listener, net::router(app))
                .with_graceful_shutdown(async {
                    let _ = stopped.await;
                })
                .await
        });
        tracing::info!(%addr, "listening");
        Ok(Server { addr, lobby, stop, task })
    }

    pub fn ws_url(&self) -> String {
        format!("ws://127.0.0.1:{}/ws", self.addr.port())
    }

    pub fn http_url(&self) -> String {
        format!("http://127.0.0.1:{}", self.addr.port())
    }

    /// Aborts running games (each logs its abort), then stops listening.
    pub async fn shutdown(self) {
        for actor in self.lobby.shutdown() {
            let _ = actor.await;
        }
        let _ = self.stop.send(());
        // Open WebSockets keep graceful shutdown waiting; do not wait long.
        let _ = tokio::time::timeout(Duration::from_secs(1), self.task).await;
    }
}
