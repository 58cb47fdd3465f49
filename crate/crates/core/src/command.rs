//! Every state transition of a game as one serializable value.
//!
//! Commands are what the event log records and what replay folds back
//! through [`GameState::apply`].

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::board::PowerCard;
use crate::error::GameError;
use crate::game::{AbortReason, GameEvent, GameState, Phase};
use crate::model::{Argument, Seat, Strategy};
use crate::text::TextDocument;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "code", content = "payload", deny_unknown_fields)]
pub enum Command {
    DrawTask,
    RerollStrategy,
    RerollValue,
    SubmitSelfExplanation { text: String },
    SubmitArgument { argument: Argument },
    ScoreFirstVote,
    PostDiscussionMessage { text: String },
    PassDiscussion,
    DiscussionTimeout,
    SubmitRevote { strategies: BTreeSet<Strategy> },
    ScoreRevote,
    UsePowerCard { card: PowerCard, target: Option<Seat> },
    SkipPower,
    RollAndMove,
    DrawEventCard,
    CheckWinAndAdvance,
    ReplaceText { text: TextDocument },
    Abort { reason: AbortReason },
}

impl Command {
    /// The command's tag, as recorded in the event log.
    pub fn code(&self) -> &'static str {
        match self {
            Command::DrawTask => "DrawTask",
            Command::RerollStrategy => "RerollStrategy",
            Command::RerollValue => "RerollValue",
            Command::SubmitSelfExplanation { .. } => "SubmitSelfExplanation",
            Command::SubmitArgument { .. } => "SubmitArgument",
            Command::ScoreFirstVote => "ScoreFirstVote",
            Command::PostDiscussionMessage { .. } => "PostDiscussionMessage",
            Command::PassDiscussion => "PassDiscussion",
            Command::DiscussionTimeout => "DiscussionTimeout",
            Command::SubmitRevote { .. } => "SubmitRevote",
            Command::ScoreRevote => "ScoreRevote",
            Command::UsePowerCard { .. } => "UsePowerCard",
            Command::SkipPower => "SkipPower",
            Command::RollAndMove => "RollAndMove",
            Command::DrawEventCard => "DrawEventCard",
            Command::CheckWinAndAdvance => "CheckWinAndAdvance",
            Command::ReplaceText { .. } => "ReplaceText",
            Command::Abort { .. } => "Abort",
        }
    }

    /// The wire message that carries this command. Client-initiated commands
    /// map to the request that triggers them; commands the server applies on
    /// its own map to the frame announcing their effect.
    pub fn wire_code(&self) -> &'static str {
        match self {
            Command::DrawTask => "TaskAssigned",
            Command::RerollStrategy => "RerollStrategy",
            Command::RerollValue => "RerollValue",
            Command::SubmitSelfExplanation { .. } => "SubmitSE",
            Command::SubmitArgument { .. } => "SubmitArgument",
            Command::ScoreFirstVote => "ScoreUpdate",
            Command::PostDiscussionMessage { .. } => "DiscussionSend",
            Command::PassDiscussion => "DiscussionPass",
            Command::DiscussionTimeout => "RevoteOpened",
            Command::SubmitRevote { .. } => "RevoteSubmit",
            Command::ScoreRevote => "ScoreUpdate",
            Command::UsePowerCard { .. } => "UsePower",
            Command::SkipPower => "SkipPower",
            Command::RollAndMove => "RollDice",
            Command::DrawEventCard => "DrawEvent",
            Command::CheckWinAndAdvance => "PhaseChanged",
            Command::ReplaceText { .. } => "TextReveal",
            Command::Abort { .. } => "GameAborted",
        }
    }

    /// One representative of every variant, for exhaustiveness checks.
    pub fn samples() -> Vec<Command> {
        use crate::model::Span;
        vec![
            Command::DrawTask,
            Command::RerollStrategy,
            Command::RerollValue,
            Command::SubmitSelfExplanation { text: "It says".into() },
            Command::SubmitArgument {
                argument: Argument::new(Strategy::Bridging, &["specific_sentence"], Span::new(0, 2)),
            },
            Command::ScoreFirstVote,
            Command::PostDiscussionMessage { text: "hi".into() },
            Command::PassDiscussion,
            Command::DiscussionTimeout,
            Command::SubmitRevote {
                strategies: [Strategy::Prediction].into(),
            },
            Command::ScoreRevote,
            Command::UsePowerCard {
                card: PowerCard::Freeze,
                target: Some(Seat(1)),
            },
            Command::SkipPower,
            Command::RollAndMove,
            Command::DrawEventCard,
            Command::CheckWinAndAdvance,
            Command::ReplaceText {
                text: TextDocument {
                    id: "t".into(),
                    title: "T".into(),
                    sentences: vec!["One.".into()],
                    targets: vec![1],
                },
            },
            Command::Abort {
                reason: AbortReason::ServerShutdown,
            },
        ]
    }

    /// Whether only the current reader may issue this command.
    pub fn reader_only(&self) -> bool {
        matches!(
            self,
            Command::DrawTask
                | Command::RerollStrategy
                | Command::RerollValue
                | Command::SubmitSelfExplanation { .. }
                | Command::UsePowerCard { .. }
                | Command::SkipPower
                | Command::RollAndMove
                | Command::DrawEventCard
        )
    }
}

impl GameState {
    /// Applies one command on behalf of `actor` (`None` for commands the
    /// hosting layer injects).
    pub fn apply(&mut self, actor: Option<Seat>, command: &Command) -> Result<Vec<GameEvent>, GameError> {
        match command {
            Command::DrawTask => self.draw_task(actor),
            Command::RerollStrategy => self.reroll_strategy(actor),
            Command::RerollValue => self.reroll_value(actor),
            Command::SubmitSelfExplanation { text } => self.submit_self_explanation(actor, text),
            Command::SubmitArgument { argument } => self.submit_argument(actor, argument),
            Command::ScoreFirstVote => self.score_first_vote(),
            Command::PostDiscussionMessage { text } => self.post_discussion_message(actor, text),
            Command::PassDiscussion => self.pass_discussion(actor),
            Command::DiscussionTimeout => self.discussion_timeout(),
            Command::SubmitRevote { strategies } => self.submit_revote(actor, strategies),
            Command::ScoreRevote => self.score_revote(),
            Command::UsePowerCard { card, target } => self.use_power_card(actor, *card, *target),
            Command::SkipPower => self.skip_power(actor),
            Command::RollAndMove => self.roll_and_move(actor),
            Command::DrawEventCard => self.draw_event_card(actor),
            Command::CheckWinAndAdvance => self.check_win_and_advance(),
            Command::ReplaceText { text } => self.replace_text(text),
            Command::Abort { reason } => self.abort(reason),
        }
    }

    /// The step the hosting layer must apply next without waiting for a
    /// player, if any. At `TurnStart` with the text used up this is `None`
    /// and [`GameState::needs_replacement_text`] is true.
    pub fn pending_system_command(&self) -> Option<(Option<Seat>, Command)> {
        match self.phase() {
            Phase::TurnStart if !self.needs_replacement_text() => Some((Some(self.reader()), Command::DrawTask)),
            Phase::FirstSummary => Some((None, Command::ScoreFirstVote)),
            Phase::FinalSummary => Some((None, Command::ScoreRevote)),
            Phase::WinCheck => Some((None, Command::CheckWinAndAdvance)),
            _ => None,
        }
    }

    pub fn needs_replacement_text(&self) -> bool {
        self.phase() == Phase::TurnStart && self.visible_text().is_err()
    }
}
