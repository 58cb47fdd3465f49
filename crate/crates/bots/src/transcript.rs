//! Per-turn summaries folded from one bot's frames.

use miboard_core::protocol::message::ScoreReason;
use miboard_core::protocol::{Control, WireMessage};
use miboard_core::scoring::FirstVoteOutcome;
use miboard_core::{Phase, Seat, Strategy, TaskAssignment};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TurnSummary {
    pub turn: u32,
    pub reader: Seat,
    pub phases: Vec<Phase>,
    pub task: Option<TaskAssignment>,
    pub first_vote: Option<FirstVoteOutcome>,
    pub first_deltas: Vec<i32>,
    pub revote_deltas: Vec<i32>,
    pub accepted: Vec<Strategy>,
    /// Whether the discussion ended on its timer, if there was one.
    pub timed_out: Option<bool>,
}

impl TurnSummary {
    fn new(turn: u32, reader: Seat) -> Self {
        TurnSummary {
            turn,
            reader,
            phases: Vec::new(),
            task: None,
            first_vote: None,
            first_deltas: Vec::new(),
            revote_deltas: Vec::new(),
            accepted: Vec::new(),
            timed_out: None,
        }
    }

    fn enter(&mut self, phase: Phase) {
        if self.phases.last() != Some(&phase) {
            self.phases.push(phase);
        }
    }
}

pub fn summarize(frames: &[WireMessage]) -> Vec<TurnSummary> {
    let mut turns: Vec<TurnSummary> = Vec::new();
    for msg in frames {
        let Some(control) = msg.control() else { continue };
        match control {
            Control::GameStarted { .. } => {
                let mut t = TurnSummary::new(1, Seat(0));
                t.enter(Phase::TurnStart);
                turns.push(t);
            }
            Control::PhaseChanged {
                phase,
                reader,
                turn_number,
                ..
            } => {
                if turns.last().is_none_or(|t| t.turn != *turn_number) {
                    turns.push(TurnSummary::new(*turn_number, *reader));
                }
                let t = turns.last_mut().expect("pushed above");
                t.reader = *reader;
                t.enter(*phase);
            }
            _ => {
                let Some(t) = turns.last_mut() else { continue };
                match control {
                    Control::ScoreUpdate {
                        reason: ScoreReason::FirstVote,
                        deltas,
                        outcome,
                        task,
                        ..
                    } => {
                        t.first_vote = outcome.clone();
                        t.first_deltas = deltas.clone();
                        if task.is_some() {
                            t.task = task.clone();
                        }
                    }
                    Control::ScoreUpdate {
                        reason: ScoreReason::Revote,
                        deltas,
                        accepted,
                        ..
                    } => {
                        t.revote_deltas = deltas.clone();
                        t.accepted = accepted.clone();
                    }
                    Control::TaskAssigned { task } => t.task = Some(task.clone()),
                    Control::RevoteOpened { timed_out } => t.timed_out = Some(*timed_out),
                    _ => {}
                }
            }
        }
    }
    turns
}

/// First-vote deltas when everyone named the reader's strategy.
pub fn unanimous_deltas(players: usize, reader: Seat, value: u32) -> Vec<i32> {
    let value = value as i32;
    (0..players)
        .map(|s| if s == reader.index() { value + 5 } else { value / 2 + 5 })
        .collect()
}
