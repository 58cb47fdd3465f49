//! The message catalog.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::board::{EventCard, PowerCard};
use crate::config::Taxonomy;
use crate::game::{AbortReason, Phase};
use crate::model::{Argument, Seat, Strategy, TaskAssignment};
use crate::scoring::FirstVoteOutcome;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Control,
    Chat,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Visibility {
    Broadcast,
    /// Delivered only to this player id.
    Private(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChatBody {
    pub text: String,
    /// Set on delivered discussion messages: the sender's contribution count.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contribution: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Body {
    Control(Control),
    Chat(ChatBody),
}

/// One frame on the wire.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WireMessage {
    pub seq: u64,
    pub game_id: Option<String>,
    pub sender: Option<String>,
    pub visibility: Visibility,
    pub body: Body,
}

impl WireMessage {
    /// A client request; the server assigns `seq` to what it sends, so
    /// clients send 0.
    pub fn request(control: Control) -> Self {
        WireMessage {
            seq: 0,
            game_id: None,
            sender: None,
            visibility: Visibility::Broadcast,
            body: Body::Control(control),
        }
    }

    pub fn chat(text: impl Into<String>) -> Self {
        WireMessage {
            seq: 0,
            game_id: None,
            sender: None,
            visibility: Visibility::Broadcast,
            body: Body::Chat(ChatBody {
                text: text.into(),
                contribution: None,
            }),
        }
    }

    pub fn kind(&self) -> Kind {
        match self.body {
            Body::Control(_) => Kind::Control,
            Body::Chat(_) => Kind::Chat,
        }
    }

    pub fn control(&self) -> Option<&Control> {
        match &self.body {
            Body::Control(c) => Some(c),
            Body::Chat(_) => None,
        }
    }

    /// `ChatSend`/`ChatDeliver` for chat frames, otherwise the control code.
    pub fn code(&self) -> &'static str {
        match &self.body {
            Body::Control(c) => c.code(),
            Body::Chat(_) if self.sender.is_some() => "ChatDeliver",
            Body::Chat(_) => "ChatSend",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RosterEntry {
    pub player_id: String,
    pub name: String,
    pub seat: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScoreReason {
    FirstVote,
    Revote,
    Reroll,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MoveCause {
    Dice,
    EventCard,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Direction {
    ClientToServer,
    ServerToClient,
}

/// Control payloads. The variant name is the frame's `code`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "code", content = "payload", deny_unknown_fields)]
pub enum Control {
    // client -> server
    JoinZone {
        name: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        zone: Option<String>,
    },
    StartGame {},
    RerollStrategy {},
    RerollValue {},
    #[serde(rename = "SubmitSE")]
    SubmitSe {
        text: String,
    },
    SubmitArgument {
        argument: Argument,
    },
    DiscussionSend {
        text: String,
    },
    DiscussionPass {},
    RevoteSubmit {
        strategies: BTreeSet<Strategy>,
    },
    UsePower {
        card: PowerCard,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        target: Option<Seat>,
    },
    SkipPower {},
    RollDice {},
    DrawEvent {},

    // server -> client
    RoomJoined {
        room_id: String,
        zone_id: String,
        session_id: String,
        player_id: String,
        seat: usize,
        token: String,
    },
    RosterUpdate {
        members: Vec<RosterEntry>,
        started: bool,
        /// Player ids the game is waiting on.
        waiting_on: Vec<String>,
    },
    GameStarted {
        game_id: String,
        players: Vec<RosterEntry>,
        text_id: String,
        title: String,
        path_length: u32,
        point_values: Vec<u32>,
        max_contributions: u32,
        discussion_secs: u64,
        /// Reasons offered for each strategy in this game.
        reasons: Taxonomy,
    },
    PhaseChanged {
        phase: Phase,
        reader: Seat,
        turn_number: u32,
        waiting_on: Vec<Seat>,
    },
    TextReveal {
        text_id: String,
        sentences: Vec<String>,
        target: usize,
    },
    TaskAssigned {
        task: TaskAssignment,
    },
    #[serde(rename = "SEBroadcast")]
    SeBroadcast {
        reader: Seat,
        text: String,
    },
    ArgumentsRevealed {
        /// 1 for the first vote, 2 for the revote.
        round: u8,
        arguments: Vec<Argument>,
        revotes: Vec<BTreeSet<Strategy>>,
    },
    ScoreUpdate {
        reason: ScoreReason,
        deltas: Vec<i32>,
        scores: Vec<i32>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        outcome: Option<FirstVoteOutcome>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        accepted: Vec<Strategy>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        task: Option<TaskAssignment>,
    },
    DiscussionOpened {
        deadline_secs: u64,
        max_contributions: u32,
    },
    RevoteOpened {
        timed_out: bool,
    },
    DiceResult {
        player: Seat,
        dice: Vec<u8>,
        total: u32,
    },
    TokenMoved {
        player: Seat,
        from: u32,
        to: u32,
        cause: MoveCause,
    },
    EventCardDrawn {
        player: Seat,
        card: EventCard,
    },
    PowerCardGranted {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        card: Option<PowerCard>,
        hand: Vec<PowerCard>,
    },
    PlayerFrozen {
        target: Seat,
        /// False when the frozen turn has been skipped and the flag cleared.
        frozen: bool,
    },
    GameOver {
        winner: Seat,
        scores: Vec<i32>,
    },
    GameAborted {
        reason: AbortReason,
        scores: Vec<i32>,
    },
    Rejected {
        code: String,
        reason: String,
    },
}

impl Control {
    /// Every control code with its direction.
    pub const CATALOG: [(&'static str, Direction); 33] = [
        ("JoinZone", Direction::ClientToServer),
        ("StartGame", Direction::ClientToServer),
        ("RerollStrategy", Direction::ClientToServer),
        ("RerollValue", Direction::ClientToServer),
        ("SubmitSE", Direction::ClientToServer),
        ("SubmitArgument", Direction::ClientToServer),
        ("DiscussionSend", Direction::ClientToServer),
        ("DiscussionPass", Direction::ClientToServer),
        ("RevoteSubmit", Direction::ClientToServer),
        ("UsePower", Direction::ClientToServer),
        ("SkipPower", Direction::ClientToServer),
        ("RollDice", Direction::ClientToServer),
        ("DrawEvent", Direction::ClientToServer),
        ("RoomJoined", Direction::ServerToClient),
        ("RosterUpdate", Direction::ServerToClient),
        ("GameStarted", Direction::ServerToClient),
        ("PhaseChanged", Direction::ServerToClient),
        ("TextReveal", Direction::ServerToClient),
        ("TaskAssigned", Direction::ServerToClient),
        ("SEBroadcast", Direction::ServerToClient),
        ("ArgumentsRevealed", Direction::ServerToClient),
        ("ScoreUpdate", Direction::ServerToClient),
        ("DiscussionOpened", Direction::ServerToClient),
        ("RevoteOpened", Direction::ServerToClient),
        ("DiceResult", Direction::ServerToClient),
        ("TokenMoved", Direction::ServerToClient),
        ("EventCardDrawn", Direction::ServerToClient),
        ("PowerCardGranted", Direction::ServerToClient),
        ("PlayerFrozen", Direction::ServerToClient),
        ("GameOver", Direction::ServerToClient),
        ("GameAborted", Direction::ServerToClient),
        ("Rejected", Direction::ServerToClient),
        ("ChatDeliver", Direction::ServerToClient),
    ];

    pub fn is_known_code(code: &str) -> bool {
        Self::CATALOG.iter().any(|(c, _)| *c == code && *c != "ChatDeliver")
    }

    pub fn code(&self) -> &'static str {
        match self {
            Control::JoinZone { .. } => "JoinZone",
            Control::StartGame {} => "StartGame",
            Control::RerollStrategy {} => "RerollStrategy",
            Control::RerollValue {} => "RerollValue",
            Control::SubmitSe { .. } => "SubmitSE",
            Control::SubmitArgument { .. } => "SubmitArgument",
            Control::DiscussionSend { .. } => "DiscussionSend",
            Control::DiscussionPass {} => "DiscussionPass",
            Control::RevoteSubmit { .. } => "RevoteSubmit",
            Control::UsePower { .. } => "UsePower",
            Control::SkipPower {} => "SkipPower",
            Control::RollDice {} => "RollDice",
            Control::DrawEvent {} => "DrawEvent",
            Control::RoomJoined { .. } => "RoomJoined",
            Control::RosterUpdate { .. } => "RosterUpdate",
            Control::GameStarted { .. } => "GameStarted",
            Control::PhaseChanged { .. } => "PhaseChanged",
            Control::TextReveal { .. } => "TextReveal",
            Control::TaskAssigned { .. } => "TaskAssigned",
            Control::SeBroadcast { .. } => "SEBroadcast",
            Control::ArgumentsRevealed { .. } => "ArgumentsRevealed",
            Control::ScoreUpdate { .. } => "ScoreUpdate",
            Control::DiscussionOpened { .. } => "DiscussionOpened",
            Control::RevoteOpened { .. } => "RevoteOpened",
            Control::DiceResult { .. } => "DiceResult",
            Control::TokenMoved { .. } => "TokenMoved",
            Control::EventCardDrawn { .. } => "EventCardDrawn",
            Control::PowerCardGranted { .. } => "PowerCardGranted",
            Control::PlayerFrozen { .. } => "PlayerFrozen",
            Control::GameOver { .. } => "GameOver",
            Control::GameAborted { .. } => "GameAborted",
            Control::Rejected { .. } => "Rejected",
        }
    }

    pub fn rejected(code: &str, reason: impl Into<String>) -> Control {
        Control::Rejected {
            code: code.to_string(),
            reason: reason.into(),
        }
    }

    /// One representative per control code, for round-trip and
    /// exhaustiveness checks.
    pub fn samples() -> Vec<Control> {
        use crate::model::Span;
        use Strategy::*;
        let task = TaskAssignment {
            strategy: Prediction,
            value: 20,
            strategy_rerolls: 1,
            value_rerolls: 0,
        };
        let arg = Argument::new(Bridging, &["specific_sentence"], Span::new(0, 4));
        let roster = vec![RosterEntry {
            player_id: "s1".into(),
            name: "Ann".into(),
            seat: 0,
        }];
        vec![
            Control::JoinZone {
                name: "Ann".into(),
                zone: Some("main".into()),
            },
            Control::StartGame {},
            Control::RerollStrategy {},
            Control::RerollValue {},
            Control::SubmitSe {
                text: "I heard about pH in chemistry...".into(),
            },
            Control::SubmitArgument { argument: arg.clone() },
            Control::DiscussionSend { text: "why?".into() },
            Control::DiscussionPass {},
            Control::RevoteSubmit {
                strategies: [Prediction, Bridging].into(),
            },
            Control::UsePower {
                card: PowerCard::Freeze,
                target: Some(Seat(2)),
            },
            Control::SkipPower {},
            Control::RollDice {},
            Control::DrawEvent {},
            Control::RoomJoined {
                room_id: "r1".into(),
                zone_id: "main".into(),
                session_id: "s1".into(),
                player_id: "s1".into(),
                seat: 0,
                token: "0123abcd".into(),
            },
            Control::RosterUpdate {
                members: roster.clone(),
                started: true,
                waiting_on: vec!["s1".into()],
            },
            Control::GameStarted {
                game_id: "g1".into(),
                players: roster,
                text_id: "ph-water".into(),
                title: "Water".into(),
                path_length: 30,
                point_values: vec![12, 14, 16, 18, 20],
                max_contributions: 5,
                discussion_secs: 120,
                reasons: crate::RulesConfig::default().reasons,
            },
            Control::PhaseChanged {
                phase: Phase::Discussion,
                reader: Seat(1),
                turn_number: 3,
                waiting_on: vec![Seat(0), Seat(2)],
            },
            Control::TextReveal {
                text_id: "ph-water".into(),
                sentences: vec!["One.".into(), "Two.".into()],
                target: 2,
            },
            Control::TaskAssigned { task: task.clone() },
            Control::SeBroadcast {
                reader: Seat(0),
                text: "It is like".into(),
            },
            Control::ArgumentsRevealed {
                round: 1,
                arguments: vec![arg],
                revotes: vec![],
            },
            Control::ScoreUpdate {
                reason: ScoreReason::FirstVote,
                deltas: vec![25, 15, 15],
                scores: vec![25, 15, 5],
                outcome: Some(FirstVoteOutcome::Unanimous(Prediction)),
                accepted: vec![Prediction],
                task: Some(task),
            },
            Control::DiscussionOpened {
                deadline_secs: 120,
                max_contributions: 5,
            },
            Control::RevoteOpened { timed_out: true },
            Control::DiceResult {
                player: Seat(0),
                dice: vec![3, 4],
                total: 7,
            },
            Control::TokenMoved {
                player: Seat(0),
                from: 3,
                to: 0,
                cause: MoveCause::EventCard,
            },
            Control::EventCardDrawn {
                player: Seat(0),
                card: EventCard::Backward { spaces: 3 },
            },
            Control::PowerCardGranted {
                card: Some(PowerCard::ExtraTurn),
                hand: vec![PowerCard::ExtraTurn],
            },
            Control::PlayerFrozen {
                target: Seat(1),
                frozen: true,
            },
            Control::GameOver {
                winner: Seat(2),
                scores: vec![1, -2, 3],
            },
            Control::GameAborted {
                reason: AbortReason::PlayerLeft { player: "s2".into() },
                scores: vec![0, 0, 0],
            },
            Control::rejected("NotYourTurn", "only the reader may roll"),
        ]
    }
}
