//! One running game: a task that owns the state, the log and the discussion
//! timer, and is the only writer of all three.

use std::path::PathBuf;
use std::sync::Arc;

use miboard_core::command::Command;
use miboard_core::game::{AbortReason, GameEvent, GameSetup, GameState};
use miboard_core::persistence::corpus::Corpus;
use miboard_core::persistence::log::{LogWriter, RecordedGame};
use miboard_core::persistence::PersistError;
use miboard_core::protocol::gate::{gate_chat, ChatContext, Gate};
use miboard_core::protocol::message::ChatBody;
use miboard_core::protocol::{Body, Control, WireMessage};
use miboard_core::rng::GameRng;
use miboard_core::{GameError, Phase, Seat};
use tokio::sync::mpsc;

use crate::clock::Clock;
use crate::frames::{game_started, roster_update, translate, Out, Sequencer, To};
use crate::lobby::{Lobby, Outbox, RoomKey};

#[derive(Debug)]
pub enum RoomMsg {
    Request { session: String, msg: WireMessage },
    /// A frame the lobby wants delivered to one member, numbered by the room.
    Notice { session: String, control: Control },
    /// A member disconnected; the game is aborted.
    Leave { session: String },
    Shutdown,
}

pub struct RoomActor {
    pub key: RoomKey,
    pub setup: GameSetup,
    pub state: GameState,
    pub members: Vec<Option<Outbox>>,
    pub seq: Sequencer,
    pub clock: Clock,
    pub corpus: Arc<Corpus>,
    pub log_dir: PathBuf,
    pub lobby: Arc<Lobby>,
}

struct Running {
    key: RoomKey,
    game: RecordedGame,
    setup: GameSetup,
    members: Vec<Option<Outbox>>,
    seq: Sequencer,
    clock: Clock,
    corpus: Arc<Corpus>,
    text_rng: GameRng,
    deadline: Option<u64>,
    /// Set when the log can no longer be written.
    broken: bool,
}

impl RoomActor {
    pub async fn run(self, mut rx: mpsc::UnboundedReceiver<RoomMsg>) {
        let lobby = self.lobby.clone();
        let key = self.key.clone();
        let writer = LogWriter::create(&self.log_dir, &self.setup.game_id);
        let started = writer.and_then(|w| RecordedGame::start(&self.setup, &self.key.1, self.clock.now_ms(), w));
        let game = match started {
            Ok(g) => g,
            Err(e) => {
                tracing::error!(game = %self.setup.game_id, "cannot open game log: {e}");
                let mut seq = self.seq;
                let msg = seq.stamp(
                    Some(&self.setup.game_id),
                    None,
                    None,
                    Body::Control(Control::GameAborted {
                        reason: AbortReason::ServerShutdown,
                        scores: self.state.scores(),
                    }),
                );
                for tx in self.members.iter().flatten() {
                    let _ = tx.send(msg.clone());
                }
                lobby.finish(&key);
                return;
            }
        };
        // The text stream already chose this game's text; later picks continue it.
        let mut text_rng = GameRng::text_stream(self.setup.seed);
        self.corpus.pick_random_entry(&mut text_rng);
        let mut room = Running {
            key: self.key,
            setup: self.setup,
            game,
            members: self.members,
            seq: self.seq,
            clock: self.clock,
            corpus: self.corpus,
            text_rng,
            deadline: None,
            broken: false,
        };
        tracing::info!(game = %room.setup.game_id, room = %room.key.1, "game started");
        room.open();

        while !room.is_over() {
            let clock = room.clock.clone();
            let deadline = room.deadline;
            let timer = async move {
                match deadline {
                    Some(d) => clock.sleep_until(d).await,
                    None => std::future::pending().await,
                }
            };
            tokio::select! {
                msg = rx.recv() => match msg {
                    Some(RoomMsg::Request { session, msg }) => room.request(&session, msg),
                    Some(RoomMsg::Notice { session, control }) => room.notice(&session, control),
                    Some(RoomMsg::Leave { session }) => room.player_left(&session),
                    Some(RoomMsg::Shutdown) | None => room.abort(AbortReason::ServerShutdown),
                },
                () = timer => room.timeout(),
            }
        }
        tracing::info!(game = %room.setup.game_id, result = ?room.game.state().result(), "game over");
        lobby.finish(&room.key);
    }
}

impl Running {
    fn state(&self) -> &GameState {
        self.game.state()
    }

    fn is_over(&self) -> bool {
        self.broken || self.state().phase() == Phase::GameOver
    }

    fn seat_of(&self, session: &str) -> Option<Seat> {
        self.state().seat_of(session)
    }

    fn send(&mut self, outs: Vec<Out>) {
        let game_id = self.setup.game_id.clone();
        for out in outs {
            match out.to {
                To::All => {
                    let msg = self.seq.stamp(Some(&game_id), None, out.sender, out.body);
                    for tx in self.members.iter().flatten() {
                        let _ = tx.send(msg.clone());
                    }
                }
                To::Seat(seat) => {
                    let id = self.state().players()[seat.index()].id.clone();
                    let msg = self.seq.stamp(Some(&game_id), Some(&id), out.sender, out.body);
                    if let Some(Some(tx)) = self.members.get(seat.index()) {
                        let _ = tx.send(msg);
                    }
                }
            }
        }
    }

    fn reject(&mut self, seat: Seat, code: &str, reason: impl Into<String>) {
        self.send(vec![Out::seat(seat, Control::rejected(code, reason))]);
    }

    /// Applies and logs one command. A log failure ends the game.
    fn apply(&mut self, actor: Option<Seat>, command: &Command) -> Result<Vec<GameEvent>, GameError> {
        match self.game.apply(actor, command, self.clock.now_ms()) {
            Ok(applied) => applied.outcome,
            Err(e) => {
                self.log_failed(e);
                Err(GameError::GameOver)
            }
        }
    }

    fn log_failed(&mut self, e: PersistError) {
        tracing::error!(game = %self.setup.game_id, "log write failed, aborting: {e}");
        self.broken = true;
        let scores = self.state().scores();
        self.send(vec![Out::all(Control::GameAborted {
            reason: AbortReason::ServerShutdown,
            scores,
        })]);
    }

    /// Runs the steps that need no player, then closes the batch.
    fn settle(&mut self, mut outs: Vec<Out>) {
        loop {
            if self.broken {
                return;
            }
            let (actor, command) = if self.state().needs_replacement_text() {
                let text = self.corpus.pick_random_text(&mut self.text_rng).clone();
                (None, Command::ReplaceText { text })
            } else if let Some(step) = self.state().pending_system_command() {
                step
            } else {
                break;
            };
            match self.apply(actor, &command) {
                Ok(events) => outs.extend(translate(self.state(), &command, &events)),
                Err(e) => {
                    // The engine offered this step; refusing it is a bug.
                    tracing::error!(game = %self.setup.game_id, "system step {} refused: {e}", command.code());
                    break;
                }
            }
        }
        if self.broken {
            return;
        }
        outs.push(Out::all(roster_update(self.state())));
        self.send(outs);
        self.deadline = match (self.state().phase(), self.deadline) {
            (Phase::Discussion, Some(d)) => Some(d),
            (Phase::Discussion, None) => Some(self.clock.now_ms() + self.state().config().discussion_secs * 1000),
            _ => None,
        };
    }

    fn open(&mut self) {
        let started = game_started(&self.setup, self.state());
        self.settle(vec![Out::all(started)]);
    }

    fn run(&mut self, seat: Seat, command: Command) {
        if command.reader_only() && seat != self.state().reader() {
            return self.reject(seat, "NotYourTurn", format!("only the reader may {}", command.wire_code()));
        }
        match self.apply(Some(seat), &command) {
            Ok(events) => {
                let outs = translate(self.state(), &command, &events);
                self.settle(outs);
            }
            Err(_) if self.broken => {}
            Err(e) => self.reject(seat, e.code(), e.to_string()),
        }
    }

    fn request(&mut self, session: &str, msg: WireMessage) {
        let Some(seat) = self.seat_of(session) else {
            return;
        };
        if msg.game_id.as_deref().is_some_and(|g| g != self.setup.game_id) {
            return self.reject(seat, "NoSuchGame", "that game is not running in this room");
        }
        let command = match msg.body {
            Body::Chat(ChatBody { text, .. }) => return self.chat(seat, session, text),
            Body::Control(c) => match c {
                Control::RerollStrategy {} => Command::RerollStrategy,
                Control::RerollValue {} => Command::RerollValue,
                Control::SubmitSe { text } => Command::SubmitSelfExplanation { text },
                Control::SubmitArgument { argument } => Command::SubmitArgument { argument },
                Control::DiscussionSend { text } => Command::PostDiscussionMessage { text },
                Control::DiscussionPass {} => Command::PassDiscussion,
                Control::RevoteSubmit { strategies } => Command::SubmitRevote { strategies },
                Control::UsePower { card, target } => Command::UsePowerCard { card, target },
                Control::SkipPower {} => Command::SkipPower,
                Control::RollDice {} => Command::RollAndMove,
                Control::DrawEvent {} => Command::DrawEventCard,
                Control::JoinZone { .. } => return self.reject(seat, "AlreadyInRoom", "leave the running game first"),
                Control::StartGame {} => return self.reject(seat, "AlreadyStarted", "this room's game is running"),
                other => return self.reject(seat, "UnexpectedCode", format!("{} is sent by the server", other.code())),
            },
        };
        self.run(seat, command);
    }

    fn chat(&mut self, seat: Seat, session: &str, text: String) {
        match gate_chat(ChatContext::of(self.state(), seat)) {
            Gate::Deny(reason) => self.reject(seat, "ChatDenied", format!("{reason:?}")),
            Gate::Allow if self.state().phase() == Phase::Discussion => {
                self.run(seat, Command::PostDiscussionMessage { text });
            }
            Gate::Allow => {
                // Idle chat while the reader composes: guessers only.
                let reader = self.state().reader();
                let outs = (0..self.state().player_count())
                    .map(Seat)
                    .filter(|s| *s != reader)
                    .map(|s| Out {
                        to: To::Seat(s),
                        sender: Some(session.to_string()),
                        body: Body::Chat(ChatBody {
                            text: text.clone(),
                            contribution: None,
                        }),
                    })
                    .collect();
                self.settle(outs);
            }
        }
    }

    fn notice(&mut self, session: &str, control: Control) {
        if let Some(seat) = self.seat_of(session) {
            self.send(vec![Out::seat(seat, control)]);
        }
    }

    fn timeout(&mut self) {
        self.deadline = None;
        if self.state().phase() != Phase::Discussion {
            return;
        }
        match self.apply(None, &Command::DiscussionTimeout) {
            Ok(events) => {
                let outs = translate(self.state(), &Command::DiscussionTimeout, &events);
                self.settle(outs);
            }
            Err(e) => tracing::error!(game = %self.setup.game_id, "timeout refused: {e}"),
        }
    }

    fn abort(&mut self, reason: AbortReason) {
        if self.is_over() {
            return;
        }
        let command = Command::Abort { reason };
        if let Ok(events) = self.apply(None, &command) {
            let outs = translate(self.state(), &command, &events);
            self.send(outs);
        }
    }

    fn player_left(&mut self, session: &str) {
        if let Some(seat) = self.seat_of(session) {
            self.members[seat.index()] = None;
        }
        self.abort(AbortReason::PlayerLeft {
            player: session.to_string(),
        });
    }
}
