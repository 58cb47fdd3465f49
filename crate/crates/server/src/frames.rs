//! Turning engine events into wire frames, and numbering them.

use miboard_core::command::Command;
use miboard_core::game::{GameEvent, GameSetup, GameState};
use miboard_core::protocol::message::{ChatBody, MoveCause, RosterEntry, ScoreReason};
use miboard_core::protocol::{Body, Control, Visibility, WireMessage};
use miboard_core::scoring::FirstVoteOutcome;
use miboard_core::{Phase, Seat};

/// Who a frame goes to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum To {
    All,
    Seat(Seat),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Out {
    pub to: To,
    pub sender: Option<String>,
    pub body: Body,
}

impl Out {
    pub fn all(c: Control) -> Out {
        Out {
            to: To::All,
            sender: None,
            body: Body::Control(c),
        }
    }

    pub fn seat(seat: Seat, c: Control) -> Out {
        Out {
            to: To::Seat(seat),
            sender: None,
            body: Body::Control(c),
        }
    }
}

/// Assigns room sequence numbers. Broadcasts take the next number; a private
/// frame repeats the number of the latest broadcast, so every recipient sees
/// a gapless broadcast sequence.
#[derive(Debug, Clone, Default)]
pub struct Sequencer {
    last: u64,
}

impl Sequencer {
    pub fn starting_at(last: u64) -> Self {
        Sequencer { last }
    }

    pub fn last(&self) -> u64 {
        self.last
    }

    pub fn stamp(&mut self, game_id: Option<&str>, recipient: Option<&str>, sender: Option<String>, body: Body) -> WireMessage {
        let visibility = match recipient {
            None => {
                self.last += 1;
                Visibility::Broadcast
            }
            Some(r) => Visibility::Private(r.to_string()),
        };
        WireMessage {
            seq: self.last,
            game_id: game_id.map(str::to_string),
            sender,
            visibility,
            body,
        }
    }
}

pub fn roster_of(state: &GameState) -> Vec<RosterEntry> {
    state
        .players()
        .iter()
        .enumerate()
        .map(|(seat, p)| RosterEntry {
            player_id: p.id.clone(),
            name: p.name.clone(),
            seat,
        })
        .collect()
}

/// The roster frame that closes every batch; it names whom the game now
/// waits on.
pub fn roster_update(state: &GameState) -> Control {
    Control::RosterUpdate {
        members: roster_of(state),
        started: true,
        waiting_on: state
            .waiting_on()
            .into_iter()
            .map(|s| state.players()[s.index()].id.clone())
            .collect(),
    }
}

pub fn game_started(setup: &GameSetup, state: &GameState) -> Control {
    let c = state.config();
    Control::GameStarted {
        game_id: setup.game_id.clone(),
        players: roster_of(state),
        text_id: state.text().id.clone(),
        title: state.text().title.clone(),
        path_length: c.path_length,
        point_values: c.point_values.clone(),
        max_contributions: c.max_contributions,
        discussion_secs: c.discussion_secs,
        reasons: c.reasons.clone(),
    }
}

fn phase_changed(state: &GameState, phase: Phase) -> Control {
    Control::PhaseChanged {
        phase,
        reader: state.reader(),
        turn_number: state.turn_number(),
        waiting_on: if phase == state.phase() { state.waiting_on() } else { Vec::new() },
    }
}

/// Frames announcing what `command` did; `state` is the state after it.
pub fn translate(state: &GameState, command: &Command, events: &[GameEvent]) -> Vec<Out> {
    let mut out = Vec::new();
    let cause = match command {
        Command::RollAndMove => MoveCause::Dice,
        _ => MoveCause::EventCard,
    };
    for event in events {
        match event {
            GameEvent::PhaseChanged { phase } => {
                out.push(Out::all(phase_changed(state, *phase)));
                match phase {
                    Phase::Discussion => out.push(Out::all(Control::DiscussionOpened {
                        deadline_secs: state.config().discussion_secs,
                        max_contributions: state.config().max_contributions,
                    })),
                    Phase::Revote => out.push(Out::all(Control::RevoteOpened {
                        timed_out: state.discussion().timed_out,
                    })),
                    _ => {}
                }
            }
            GameEvent::TextRevealed { target } => {
                if let Ok(reveal) = state.visible_text() {
                    out.push(Out::all(Control::TextReveal {
                        text_id: state.text().id.clone(),
                        sentences: reveal.sentences.to_vec(),
                        target: *target,
                    }));
                }
            }
            GameEvent::TaskAssigned { reader, task } => {
                out.push(Out::seat(*reader, Control::TaskAssigned { task: task.clone() }));
            }
            GameEvent::TaskRerolled { reader, task, cost } => {
                out.push(Out::seat(*reader, Control::TaskAssigned { task: task.clone() }));
                let mut deltas = vec![0; state.player_count()];
                deltas[reader.index()] = -cost;
                out.push(Out::seat(
                    *reader,
                    Control::ScoreUpdate {
                        reason: ScoreReason::Reroll,
                        deltas,
                        scores: state.scores(),
                        outcome: None,
                        accepted: Vec::new(),
                        task: None,
                    },
                ));
            }
            GameEvent::SelfExplanationSubmitted { reader, text } => {
                out.push(Out::all(Control::SeBroadcast {
                    reader: *reader,
                    text: text.clone(),
                }));
            }
            GameEvent::ArgumentsRevealed { arguments } => out.push(Out::all(Control::ArgumentsRevealed {
                round: 1,
                arguments: arguments.clone(),
                revotes: Vec::new(),
            })),
            GameEvent::FirstVoteScored { outcome, deltas, task } => out.push(Out::all(Control::ScoreUpdate {
                reason: ScoreReason::FirstVote,
                deltas: deltas.clone(),
                scores: state.scores(),
                outcome: Some(*outcome),
                accepted: match outcome {
                    FirstVoteOutcome::Unanimous(s) => vec![*s],
                    FirstVoteOutcome::Disagreement => Vec::new(),
                },
                task: task.clone(),
            })),
            GameEvent::DiscussionMessage { seat, text, count } => out.push(Out {
                to: To::All,
                sender: Some(state.players()[seat.index()].id.clone()),
                body: Body::Chat(ChatBody {
                    text: text.clone(),
                    contribution: Some(*count),
                }),
            }),
            GameEvent::RevotesRevealed { revotes } => out.push(Out::all(Control::ArgumentsRevealed {
                round: 2,
                arguments: Vec::new(),
                revotes: revotes.clone(),
            })),
            GameEvent::RevoteScored { accepted, deltas, task } => out.push(Out::all(Control::ScoreUpdate {
                reason: ScoreReason::Revote,
                deltas: deltas.clone(),
                scores: state.scores(),
                outcome: None,
                accepted: accepted.iter().copied().collect(),
                task: Some(task.clone()),
            })),
            GameEvent::PowerPlayed { seat, .. } => out.push(Out::seat(
                *seat,
                Control::PowerCardGranted {
                    card: None,
                    hand: state.board().hand(*seat).to_vec(),
                },
            )),
            GameEvent::PlayerFrozen { target } => out.push(Out::all(Control::PlayerFrozen {
                target: *target,
                frozen: true,
            })),
            GameEvent::FrozenTurnSkipped { seat } => out.push(Out::all(Control::PlayerFrozen {
                target: *seat,
                frozen: false,
            })),
            GameEvent::DiceRolled { seat, dice } => out.push(Out::all(Control::DiceResult {
                player: *seat,
                dice: dice.clone(),
                total: dice.iter().map(|d| *d as u32).sum(),
            })),
            GameEvent::TokenMoved { seat, from, to } => out.push(Out::all(Control::TokenMoved {
                player: *seat,
                from: *from,
                to: *to,
                cause,
            })),
            GameEvent::EventCardDrawn { seat, card } => out.push(Out::all(Control::EventCardDrawn {
                player: *seat,
                card: *card,
            })),
            GameEvent::PowerCardGranted { seat, card } => out.push(Out::seat(
                *seat,
                Control::PowerCardGranted {
                    card: Some(*card),
                    hand: state.board().hand(*seat).to_vec(),
                },
            )),
            GameEvent::GameWon { winner } => out.push(Out::all(Control::GameOver {
                winner: *winner,
                scores: state.scores(),
            })),
            GameEvent::GameAborted { reason } => out.push(Out::all(Control::GameAborted {
                reason: reason.clone(),
                scores: state.scores(),
            })),
            // Covered by the roster frame or by the phase change that follows.
            GameEvent::ArgumentSealed { .. }
            | GameEvent::RevoteSealed { .. }
            | GameEvent::DiscussionOpened
            | GameEvent::DiscussionPassed { .. }
            | GameEvent::DiscussionTimedOut
            | GameEvent::TurnStarted { .. }
            | GameEvent::TextReplaced { .. } => {}
        }
    }
    out
}
