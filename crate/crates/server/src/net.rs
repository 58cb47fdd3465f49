//! HTTP side: the WebSocket endpoint with heartbeats, and the clock control
//! endpoint of test mode.

use std::sync::Arc;
use std::time::{Duration, Instant};

use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use futures::{SinkExt, StreamExt};
use miboard_core::protocol::{decode, encode};
use serde::{Deserialize, Serialize};
use tokio::sync::mpsc;

use crate::lobby::Lobby;

#[derive(Clone)]
pub struct App {
    pub lobby: Arc<Lobby>,
    pub heartbeat: Duration,
    pub missed_heartbeats: u32,
}

pub fn router(app: App) -> Router {
    Router::new()
        .route("/ws", get(ws))
        .route("/health", get(|| async { "ok" }))
        .route("/control/clock", get(clock))
        .route("/control/advance", post(advance))
        .with_state(app)
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ClockReading {
    pub now_ms: u64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Advance {
    pub ms: u64,
}

async fn clock(State(app): State<App>) -> Json<ClockReading> {
    Json(ClockReading {
        now_ms: app.lobby.clock().now_ms(),
    })
}

async fn advance(State(app): State<App>, Json(req): Json<Advance>) -> Response {
    match app.lobby.clock().advance(req.ms) {
        Some(now_ms) => Json(ClockReading { now_ms }).into_response(),
        None => (StatusCode::CONFLICT, "the server runs on the wall clock").into_response(),
    }
}

async fn ws(State(app): State<App>, upgrade: WebSocketUpgrade) -> Response {
    upgrade.on_upgrade(move |socket| connection(app, socket))
}

async fn connection(app: App, socket: WebSocket) {
    let (mut sink, mut stream) = socket.split();
    let (tx, mut outbox) = mpsc::unbounded_channel();
    let session = app.lobby.connect(tx);
    tracing::debug!(%session, "connected");
    let mut ping = tokio::time::interval(app.heartbeat);
    ping.tick().await;
    let mut last_seen = Instant::now();
    let limit = app.heartbeat * app.missed_heartbeats;

    loop {
        tokio::select! {
            out = outbox.recv() => {
                let Some(msg) = out else { break };
                if sink.send(Message::Text(encode(&msg).into())).await.is_err() {
                    break;
                }
            }
            inbound = stream.next() => {
                let bytes = match inbound {
                    Some(Ok(Message::Text(t))) => t.as_bytes().to_vec(),
                    Some(Ok(Message::Binary(b))) => b.to_vec(),
                    Some(Ok(Message::Ping(_) | Message::Pong(_))) => {
                        last_seen = Instant::now();
                        continue;
                    }
                    Some(Ok(Message::Close(_))) | Some(Err(_)) | None => break,
                };
                last_seen = Instant::now();
                match decode(&bytes) {
                    Ok(msg) => app.lobby.handle(&session, msg),
                    Err(e) => app.lobby.notify(&session, e.to_rejected()),
                }
            }
            _ = ping.tick() => {
                if last_seen.elapsed() >= limit {
                    tracing::info!(%session, "missed heartbeats, disconnecting");
                    break;
                }
                if sink.send(Message::Ping(Default::default())).await.is_err() {
                    break;
                }
            }
        }
    }
    app.lobby.disconnect(&session);
    tracing::debug!(%session, "disconnected");
}
