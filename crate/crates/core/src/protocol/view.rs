//! A client's picture of its game, folded from the frames it receives.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use super::message::{Body, Control, RosterEntry, Visibility, WireMessage};
use crate::board::{EventCard, PowerCard};
use crate::config::Taxonomy;
use crate::game::{AbortReason, Phase, PublicState};
use crate::model::{Argument, Seat, Strategy, TaskAssignment};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ViewError {
    #[error("broadcast seq jumped from {last} to {got}")]
    Gap { last: u64, got: u64 },
    #[error("private frame for {0} delivered to the wrong player")]
    Misdelivered(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct ClientView {
    pub player_id: Option<String>,
    pub seat: Option<Seat>,
    pub room_id: Option<String>,
    pub roster: Vec<RosterEntry>,
    pub started: bool,
    pub waiting_on: Vec<String>,
    /// Seq of the last broadcast frame.
    pub last_seq: Option<u64>,

    pub game_id: Option<String>,
    pub max_contributions: u32,
    pub reasons: Taxonomy,
    pub phase: Option<Phase>,
    pub reader: Seat,
    pub turn_number: u32,
    pub scores: Vec<i32>,
    pub tokens: Vec<u32>,
    pub frozen: Vec<bool>,
    pub text_id: Option<String>,
    pub sentences: Vec<String>,
    pub target: usize,

    pub task: Option<TaskAssignment>,
    pub self_explanation: Option<String>,
    pub arguments: Vec<Argument>,
    pub revotes: Vec<BTreeSet<Strategy>>,
    pub contributions: Vec<u32>,
    pub discussion_timed_out: bool,
    pub hand: Vec<PowerCard>,
    pub last_dice: Vec<u8>,
    pub last_event: Option<EventCard>,
    pub winner: Option<Seat>,
    pub aborted: Option<AbortReason>,
    pub last_rejected: Option<String>,
}

impl ClientView {
    pub fn is_over(&self) -> bool {
        self.phase == Some(Phase::GameOver)
    }

    pub fn is_reader(&self) -> bool {
        self.seat == Some(self.reader)
    }

    pub fn seat_of(&self, player_id: &str) -> Option<Seat> {
        self.roster.iter().find(|r| r.player_id == player_id).map(|r| Seat(r.seat))
    }

    /// The public state this view has reconstructed, once a game started.
    pub fn public_state(&self) -> Option<PublicState> {
        Some(PublicState {
            phase: self.phase?,
            reader: self.reader,
            turn_number: self.turn_number,
            scores: self.scores.clone(),
            tokens: self.tokens.clone(),
            frozen: self.frozen.clone(),
        })
    }

    fn reset_turn(&mut self) {
        self.task = None;
        self.self_explanation = None;
        self.arguments.clear();
        self.revotes.clear();
        self.contributions = vec![0; self.roster.len()];
        self.discussion_timed_out = false;
        self.last_dice.clear();
        self.last_event = None;
    }

    pub fn apply(&mut self, msg: &WireMessage) -> Result<(), ViewError> {
        if let Body::Control(Control::RoomJoined { .. }) = &msg.body {
            // A new room starts a new sequence.
            self.last_seq = (msg.seq > 0).then_some(msg.seq);
        }
        match &msg.visibility {
            Visibility::Broadcast => {
                if let Some(last) = self.last_seq {
                    if msg.seq != last + 1 {
                        return Err(ViewError::Gap { last, got: msg.seq });
                    }
                }
                self.last_seq = Some(msg.seq);
            }
            Visibility::Private(to) => {
                if self.player_id.as_ref().is_some_and(|me| me != to) {
                    return Err(ViewError::Misdelivered(to.clone()));
                }
            }
        }
        match &msg.body {
            Body::Chat(chat) => {
                if let (Some(count), Some(seat)) = (chat.contribution, msg.sender.as_deref().and_then(|s| self.seat_of(s))) {
                    if let Some(c) = self.contributions.get_mut(seat.index()) {
                        *c = count;
                    }
                }
            }
            Body::Control(c) => self.apply_control(c),
        }
        Ok(())
    }

    fn apply_control(&mut self, c: &Control) {
        match c {
            Control::RoomJoined {
                room_id, player_id, seat, ..
            } => {
                self.room_id = Some(room_id.clone());
                self.player_id = Some(player_id.clone());
                self.seat = Some(Seat(*seat));
            }
            Control::RosterUpdate {
                members,
                started,
                waiting_on,
            } => {
                self.roster = members.clone();
                self.started = *started;
                self.waiting_on = waiting_on.clone();
                if let Some(me) = &self.player_id {
                    self.seat = self.roster.iter().find(|r| &r.player_id == me).map(|r| Seat(r.seat));
                }
            }
            Control::GameStarted {
                game_id,
                players,
                text_id,
                max_contributions,
                reasons,
                ..
            } => {
                self.reasons = reasons.clone();
                let n = players.len();
                self.game_id = Some(game_id.clone());
                self.roster = players.clone();
                self.started = true;
                self.max_contributions = *max_contributions;
                self.phase = Some(Phase::TurnStart);
                self.reader = Seat(0);
                self.turn_number = 1;
                self.scores = vec![0; n];
                self.tokens = vec![0; n];
                self.frozen = vec![false; n];
                self.text_id = Some(text_id.clone());
                self.hand.clear();
                self.winner = None;
                self.aborted = None;
                self.reset_turn();
            }
            Control::PhaseChanged {
                phase,
                reader,
                turn_number,
                ..
            } => {
                if *phase == Phase::TurnStart && *turn_number != self.turn_number {
                    self.reset_turn();
                }
                self.phase = Some(*phase);
                self.reader = *reader;
                self.turn_number = *turn_number;
            }
            Control::TextReveal {
                text_id,
                sentences,
                target,
            } => {
                self.text_id = Some(text_id.clone());
                self.sentences = sentences.clone();
                self.target = *target;
            }
            Control::TaskAssigned { task } => self.task = Some(task.clone()),
            Control::SeBroadcast { text, .. } => self.self_explanation = Some(text.clone()),
            Control::ArgumentsRevealed {
                arguments, revotes, ..
            } => {
                if !arguments.is_empty() {
                    self.arguments = arguments.clone();
                }
                if !revotes.is_empty() {
                    self.revotes = revotes.clone();
                }
            }
            Control::ScoreUpdate { scores, task, .. } => {
                self.scores = scores.clone();
                if task.is_some() {
                    self.task = task.clone();
                }
            }
            Control::DiscussionOpened { .. } => {
                self.contributions = vec![0; self.roster.len()];
            }
            Control::RevoteOpened { timed_out } => self.discussion_timed_out = *timed_out,
            Control::DiceResult { dice, .. } => self.last_dice = dice.clone(),
            Control::TokenMoved { player, to, .. } => {
                if let Some(t) = self.tokens.get_mut(player.index()) {
                    *t = *to;
                }
            }
            Control::EventCardDrawn { card, .. } => self.last_event = Some(*card),
            Control::PowerCardGranted { hand, .. } => self.hand = hand.clone(),
            Control::PlayerFrozen { target, frozen } => {
                if let Some(f) = self.frozen.get_mut(target.index()) {
                    *f = *frozen;
                }
            }
            Control::GameOver { winner, scores } => {
                self.winner = Some(*winner);
                self.scores = scores.clone();
                self.phase = Some(Phase::GameOver);
            }
            Control::GameAborted { reason, scores } => {
                self.aborted = Some(reason.clone());
                if !scores.is_empty() {
                    self.scores = scores.clone();
                }
                self.phase = Some(Phase::GameOver);
            }
            Control::Rejected { code, .. } => self.last_rejected = Some(code.clone()),
            _ => {}
        }
    }
}
