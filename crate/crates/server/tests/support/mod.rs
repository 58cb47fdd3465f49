//! A bare WebSocket client and a server on an ephemeral port.

#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::time::Duration;

use futures::{SinkExt, StreamExt};
use miboard_core::persistence::log::{read_log, EventRecord};
use miboard_core::protocol::view::ClientView;
use miboard_core::protocol::{decode, encode, Control, Visibility, WireMessage};
use miboard_core::{Argument, Span, Strategy};
use miboard_server::{Server, ServerConfig};
use tempfile::TempDir;
use tokio::net::TcpStream;
use tokio_tungstenite::tungstenite::Message;
use tokio_tungstenite::{MaybeTlsStream, WebSocketStream};

pub const WAIT: Duration = Duration::from_secs(5);

pub fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

pub struct Harness {
    pub server: Server,
    pub logs: TempDir,
}

impl Harness {
    pub async fn start(seed: u64) -> Harness {
        let logs = tempfile::tempdir().unwrap();
        let config = ServerConfig {
            port: 0,
            corpus: corpus_dir(),
            log_dir: logs.path().to_path_buf(),
            seed: Some(seed),
            virtual_clock: true,
            ..ServerConfig::default()
        };
        Harness {
            server: Server::start(config).await.unwrap(),
            logs,
        }
    }

    pub async fn client(&self) -> Client {
        Client::connect(&self.server.ws_url()).await
    }

    /// Connects and seats `n` clients, then starts their game.
    pub async fn game(&self, n: usize) -> Vec<Client> {
        let mut clients = Vec::new();
        for i in 0..n {
            let mut c = self.client().await;
            c.send(Control::JoinZone {
                name: format!("p{i}"),
                zone: None,
            })
            .await;
            clients.push(c);
            settle(&mut clients, i).await.unwrap();
        }
        clients[0].send(Control::StartGame {}).await;
        settle(&mut clients, 0).await.unwrap();
        clients
    }

    pub fn log(&self, game_id: &str) -> Vec<EventRecord> {
        read_log(&self.logs.path().join(format!("{game_id}.log"))).unwrap().1
    }

    pub fn advance(&self, ms: u64) {
        self.server.lobby.clock().advance(ms).unwrap();
    }
}

pub struct Client {
    ws: WebSocketStream<MaybeTlsStream<TcpStream>>,
    pub view: ClientView,
    pub frames: Vec<WireMessage>,
}

impl Client {
    pub async fn connect(url: &str) -> Client {
        let (ws, _) = tokio_tungstenite::connect_async_with_config(url, None, true).await.unwrap();
        Client {
            ws,
            view: ClientView::default(),
            frames: Vec::new(),
        }
    }

    pub async fn send_raw(&mut self, text: &str) {
        self.ws.send(Message::text(text)).await.unwrap();
    }

    pub async fn send_msg(&mut self, msg: WireMessage) {
        self.send_raw(&encode(&msg)).await;
    }

    /// Sends `control` tagged with the current game.
    pub async fn send(&mut self, control: Control) {
        let mut m = WireMessage::request(control);
        m.game_id = self.view.game_id.clone();
        self.send_msg(m).await;
    }

    pub async fn try_recv(&mut self, wait: Duration) -> Option<WireMessage> {
        loop {
            let next = tokio::time::timeout(wait, self.ws.next()).await.ok()??;
            let bytes = match next.ok()? {
                Message::Text(t) => t.as_bytes().to_vec(),
                Message::Binary(b) => b.to_vec(),
                Message::Close(_) => return None,
                _ => continue,
            };
            let msg = decode(&bytes).expect("server frames decode");
            self.view.apply(&msg).expect("frames arrive in order and to their owner");
            self.frames.push(msg.clone());
            return Some(msg);
        }
    }

    pub async fn recv(&mut self) -> WireMessage {
        self.try_recv(WAIT).await.expect("a frame")
    }

    /// Reads until a frame with `code` arrives.
    pub async fn recv_code(&mut self, code: &str) -> WireMessage {
        loop {
            let m = self.recv().await;
            if m.code() == code {
                return m;
            }
        }
    }

    pub async fn silent_for(&mut self, wait: Duration) -> bool {
        self.try_recv(wait).await.is_none()
    }

    pub fn saw(&self, code: &str) -> bool {
        self.frames.iter().any(|m| m.code() == code)
    }

    pub fn argument(&self, strategy: Strategy) -> Argument {
        let reason = &self.view.reasons.reasons_for(strategy)[0];
        Argument::new(strategy, &[reason.code.as_str()], Span::new(0, 1))
    }
}

/// Reads `actor`'s reply to its last request (up to the batch's closing
/// roster update, or a refusal), then catches everyone else up.
pub async fn settle(clients: &mut [Client], actor: usize) -> Result<(), String> {
    let seq = loop {
        let m = clients[actor].recv().await;
        match (&m.visibility, m.control()) {
            (Visibility::Private(_), Some(Control::Rejected { code, .. })) => return Err(code.clone()),
            (Visibility::Broadcast, Some(Control::RosterUpdate { .. })) => break m.seq,
            _ => {}
        }
    };
    catch_up(clients, seq).await;
    Ok(())
}

pub async fn catch_up(clients: &mut [Client], seq: u64) {
    for c in clients.iter_mut() {
        while c.view.last_seq.is_none_or(|l| l < seq) {
            c.recv().await;
        }
    }
}

pub fn reader(clients: &[Client]) -> usize {
    clients[0].view.reader.index()
}

/// Plays the current turn to the discussion: every seat names a
/// different strategy.
pub async fn to_discussion(clients: &mut [Client]) {
    let r = reader(clients);
    clients[r]
        .send(Control::SubmitSe {
            text: "This links back to the first sentence.".into(),
        })
        .await;
    settle(clients, r).await.unwrap();
    for i in 0..clients.len() {
        let arg = clients[i].argument(Strategy::ASSIGNABLE[i]);
        clients[i].send(Control::SubmitArgument { argument: arg }).await;
        settle(clients, i).await.unwrap();
    }
    assert_eq!(clients[0].view.phase, Some(miboard_core::Phase::Discussion));
}
