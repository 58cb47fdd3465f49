//! Who may chat when.

use serde::Serialize;

use crate::game::{GameState, Phase};
use crate::model::Seat;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ChatContext {
    /// Before the room's game starts.
    Lobby,
    InGame {
        phase: Phase,
        is_reader: bool,
        /// Whether the sender can still contribute to a discussion.
        can_contribute: bool,
    },
}

impl ChatContext {
    pub fn of(state: &GameState, seat: Seat) -> ChatContext {
        let d = state.discussion();
        ChatContext::InGame {
            phase: state.phase(),
            is_reader: state.reader() == seat,
            can_contribute: !d.forfeited[seat.index()] && d.contributions[seat.index()] < state.config().max_contributions,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DenyReason {
    /// The reader is composing and is not idle.
    ReaderBusy,
    /// Passed or used every contribution.
    DiscussionClosedForSender,
    /// The current phase does not allow chat.
    PhaseClosed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Gate {
    Allow,
    Deny(DenyReason),
}

pub fn gate_chat(ctx: ChatContext) -> Gate {
    match ctx {
        ChatContext::Lobby => Gate::Allow,
        ChatContext::InGame {
            phase: Phase::Discussion,
            can_contribute,
            ..
        } => {
            if can_contribute {
                Gate::Allow
            } else {
                Gate::Deny(DenyReason::DiscussionClosedForSender)
            }
        }
        ChatContext::InGame {
            phase: Phase::ReaderCompose,
            is_reader,
            ..
        } => {
            if is_reader {
                Gate::Deny(DenyReason::ReaderBusy)
            } else {
                Gate::Allow
            }
        }
        ChatContext::InGame { .. } => Gate::Deny(DenyReason::PhaseClosed),
    }
}
