//! One bot's WebSocket connection.

use std::time::Duration;

use futures::{SinkExt, StreamExt};
use miboard_core::protocol::view::ClientView;
use miboard_core::protocol::{decode, encode, WireMessage};
use tokio::net::TcpStream;
use tokio_tungstenite::tungstenite::Message;
use tokio_tungstenite::{MaybeTlsStream, WebSocketStream};

use crate::policy::{Memory, Policy};
use crate::HarnessError;

pub struct Bot {
    pub name: String,
    pub policy: Policy,
    pub memory: Memory,
    pub view: ClientView,
    /// Every frame received, as it arrived on the wire.
    pub transcript: Vec<String>,
    pub frames: Vec<WireMessage>,
    ws: Option<WebSocketStream<MaybeTlsStream<TcpStream>>>,
}

impl Bot {
    pub async fn connect(url: &str, name: &str, policy: Policy) -> Result<Bot, HarnessError> {
        let (ws, _) = tokio_tungstenite::connect_async_with_config(url, None, true).await.map_err(|e| HarnessError::Connect {
            url: url.to_string(),
            reason: e.to_string(),
        })?;
        Ok(Bot {
            name: name.to_string(),
            policy,
            memory: Memory::default(),
            view: ClientView::default(),
            transcript: Vec::new(),
            frames: Vec::new(),
            ws: Some(ws),
        })
    }

    pub fn is_connected(&self) -> bool {
        self.ws.is_some()
    }

    pub async fn send(&mut self, msg: &WireMessage, step: usize) -> Result<(), HarnessError> {
        let ws = self.ws.as_mut().ok_or_else(|| HarnessError::closed(step, &self.name))?;
        ws.send(Message::text(encode(msg)))
            .await
            .map_err(|e| HarnessError::Connection {
                step,
                reason: e.to_string(),
            })
    }

    /// Waits for the next frame and folds it into the view.
    pub async fn recv(&mut self, step: usize, wait: Duration) -> Result<WireMessage, HarnessError> {
        loop {
            let ws = self.ws.as_mut().ok_or_else(|| HarnessError::closed(step, &self.name))?;
            let next = tokio::time::timeout(wait, ws.next()).await.map_err(|_| HarnessError::Timeout {
                step,
                what: format!("a frame for {}", self.name),
            })?;
            let bytes = match next {
                Some(Ok(Message::Text(t))) => t.as_bytes().to_vec(),
                Some(Ok(Message::Binary(b))) => b.to_vec(),
                Some(Ok(_)) => continue,
                Some(Err(e)) => {
                    return Err(HarnessError::Connection {
                        step,
                        reason: e.to_string(),
                    })
                }
                None => return Err(HarnessError::closed(step, &self.name)),
            };
            let msg = decode(&bytes).map_err(|e| HarnessError::AssertionFailed {
                step,
                detail: format!("{} got an undecodable frame: {e}", self.name),
            })?;
            self.view.apply(&msg).map_err(|e| HarnessError::AssertionFailed {
                step,
                detail: format!("{}: {e}", self.name),
            })?;
            self.transcript.push(String::from_utf8_lossy(&bytes).into_owned());
            self.frames.push(msg.clone());
            return Ok(msg);
        }
    }

    /// Drops the connection without a goodbye.
    pub async fn disconnect(&mut self) {
        if let Some(mut ws) = self.ws.take() {
            let _ = ws.close(None).await;
        }
    }

    pub fn decide(&mut self) -> Option<WireMessage> {
        if !self.is_connected() {
            return None;
        }
        self.policy.decide(&self.view, &mut self.memory)
    }
}
