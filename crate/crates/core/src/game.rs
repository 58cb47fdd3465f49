//! The authoritative state of one game and every rule that changes it.
//!
//! All operations are synchronous and deterministic: randomness comes only
//! from the game's seeded [`GameRng`] and time is never read. An operation
//! either succeeds, returning the [`GameEvent`]s it produced, or fails with a
//! [`GameError`] and leaves the state exactly as it was.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::board::{Board, EventCard, PowerCard};
use crate::config::RulesConfig;
use crate::error::GameError;
use crate::model::{Argument, Seat, Strategy, TaskAssignment};
use crate::rng::GameRng;
use crate::scoring::{self, FirstVoteOutcome};
use crate::text::{Reveal, TextDocument};

pub const MIN_PLAYERS: usize = 3;
pub const MAX_PLAYERS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Phase {
    TurnStart,
    ReaderCompose,
    Identification,
    FirstSummary,
    Discussion,
    Revote,
    FinalSummary,
    PowerCardWindow,
    DiceRoll,
    EventCardDraw,
    WinCheck,
    GameOver,
}

impl Phase {
    pub const ALL: [Phase; 12] = [
        Phase::TurnStart,
        Phase::ReaderCompose,
        Phase::Identification,
        Phase::FirstSummary,
        Phase::Discussion,
        Phase::Revote,
        Phase::FinalSummary,
        Phase::PowerCardWindow,
        Phase::DiceRoll,
        Phase::EventCardDraw,
        Phase::WinCheck,
        Phase::GameOver,
    ];

    /// Phases reachable in one operation. Every live phase can also reach
    /// `GameOver` through an abort.
    pub fn successors(self) -> &'static [Phase] {
        use Phase::*;
        match self {
            TurnStart => &[ReaderCompose, GameOver],
            ReaderCompose => &[Identification, GameOver],
            Identification => &[FirstSummary, GameOver],
            FirstSummary => &[PowerCardWindow, Discussion, GameOver],
            Discussion => &[Revote, GameOver],
            Revote => &[FinalSummary, GameOver],
            FinalSummary => &[PowerCardWindow, GameOver],
            PowerCardWindow => &[DiceRoll, GameOver],
            DiceRoll => &[EventCardDraw, GameOver],
            EventCardDraw => &[WinCheck, GameOver],
            WinCheck => &[TurnStart, GameOver],
            GameOver => &[],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlayerDescriptor {
    pub id: String,
    pub name: String,
}

impl PlayerDescriptor {
    pub fn new(id: impl Into<String>, name: impl Into<String>) -> Self {
        PlayerDescriptor {
            id: id.into(),
            name: name.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Player {
    pub id: String,
    pub name: String,
    pub score: i32,
}

/// Everything needed to construct a game; the first line of every game log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameSetup {
    pub game_id: String,
    pub players: Vec<PlayerDescriptor>,
    pub text: TextDocument,
    pub config: RulesConfig,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "reason")]
pub enum AbortReason {
    PlayerLeft { player: String },
    ServerShutdown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result")]
pub enum GameResult {
    Won { winner: Seat },
    Aborted(AbortReason),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Discussion {
    pub contributions: Vec<u32>,
    pub forfeited: Vec<bool>,
    pub timed_out: bool,
}

impl Discussion {
    fn new(players: usize) -> Self {
        Discussion {
            contributions: vec![0; players],
            forfeited: vec![false; players],
            timed_out: false,
        }
    }
}

/// Something that happened during an operation, in order.
///
/// `TaskAssigned`, `TaskRerolled` and `PowerCardGranted` concern one player's
/// private information.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event")]
pub enum GameEvent {
    PhaseChanged { phase: Phase },
    TaskAssigned { reader: Seat, task: TaskAssignment },
    TextRevealed { target: usize },
    TaskRerolled { reader: Seat, task: TaskAssignment, cost: i32 },
    SelfExplanationSubmitted { reader: Seat, text: String },
    ArgumentSealed { seat: Seat },
    ArgumentsRevealed { arguments: Vec<Argument> },
    FirstVoteScored {
        outcome: FirstVoteOutcome,
        deltas: Vec<i32>,
        task: Option<TaskAssignment>,
    },
    DiscussionOpened,
    DiscussionMessage { seat: Seat, text: String, count: u32 },
    DiscussionPassed { seat: Seat },
    DiscussionTimedOut,
    RevoteSealed { seat: Seat },
    RevotesRevealed { revotes: Vec<BTreeSet<Strategy>> },
    RevoteScored {
        accepted: BTreeSet<Strategy>,
        deltas: Vec<i32>,
        task: TaskAssignment,
    },
    PowerPlayed { seat: Seat, card: PowerCard, target: Option<Seat> },
    PlayerFrozen { target: Seat },
    DiceRolled { seat: Seat, dice: Vec<u8> },
    TokenMoved { seat: Seat, from: u32, to: u32 },
    EventCardDrawn { seat: Seat, card: EventCard },
    PowerCardGranted { seat: Seat, card: PowerCard },
    FrozenTurnSkipped { seat: Seat },
    TurnStarted { reader: Seat, turn_number: u32 },
    TextReplaced { text_id: String },
    GameWon { winner: Seat },
    GameAborted { reason: AbortReason },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameState {
    game_id: String,
    seed: u64,
    config: RulesConfig,
    players: Vec<Player>,
    reader: Seat,
    frozen: Vec<bool>,
    phase: Phase,
    board: Board,
    text: TextDocument,
    /// Index into `text.targets` for the current turn.
    text_cursor: usize,
    turn_number: u32,
    task: Option<TaskAssignment>,
    task_revealed: bool,
    self_explanation: Option<String>,
    first_votes: Vec<Option<Argument>>,
    arguments_revealed: bool,
    revotes: Vec<Option<BTreeSet<Strategy>>>,
    revotes_revealed: bool,
    discussion: Discussion,
    extra_turn_pending: bool,
    two_dice_armed: bool,
    result: Option<GameResult>,
    rng: GameRng,
}

/// The part of a game every player is shown.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PublicState {
    pub phase: Phase,
    pub reader: Seat,
    pub turn_number: u32,
    pub scores: Vec<i32>,
    pub tokens: Vec<u32>,
    pub frozen: Vec<bool>,
}

/// What one player is allowed to know about a game.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PlayerView {
    pub viewer: Seat,
    pub phase: Phase,
    pub reader: Seat,
    pub turn_number: u32,
    pub scores: Vec<i32>,
    pub tokens: Vec<u32>,
    pub frozen: Vec<bool>,
    pub task: Option<TaskAssignment>,
    pub self_explanation: Option<String>,
    pub arguments: Vec<Option<Argument>>,
    pub revotes: Vec<Option<BTreeSet<Strategy>>>,
    pub submitted: Vec<bool>,
    pub hand: Vec<PowerCard>,
}

impl GameState {
    pub fn new(setup: &GameSetup) -> Result<GameState, GameError> {
        let n = setup.players.len();
        if !(MIN_PLAYERS..=MAX_PLAYERS).contains(&n) {
            return Err(GameError::InvalidPlayerCount(n));
        }
        for (i, p) in setup.players.iter().enumerate() {
            if setup.players[..i].iter().any(|q| q.id == p.id) {
                return Err(GameError::DuplicatePlayer(p.id.clone()));
            }
        }
        setup.text.validate().map_err(GameError::InvalidText)?;
        setup.config.validate()?;

        let mut rng = GameRng::new(setup.seed);
        let board = Board::new(n, &setup.config, &mut rng);
        Ok(GameState {
            game_id: setup.game_id.clone(),
            seed: setup.seed,
            config: setup.config.clone(),
            players: setup
                .players
                .iter()
                .map(|p| Player {
                    id: p.id.clone(),
                    name: p.name.clone(),
                    score: 0,
                })
                .collect(),
            reader: Seat(0),
            frozen: vec![false; n],
            phase: Phase::TurnStart,
            board,
            text: setup.text.clone(),
            text_cursor: 0,
            turn_number: 1,
            task: None,
            task_revealed: false,
            self_explanation: None,
            first_votes: vec![None; n],
            arguments_revealed: false,
            revotes: vec![None; n],
            revotes_revealed: false,
            discussion: Discussion::new(n),
            extra_turn_pending: false,
            two_dice_armed: false,
            result: None,
            rng,
        })
    }

    pub fn game_id(&self) -> &str {
        &self.game_id
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn config(&self) -> &RulesConfig {
        &self.config
    }

    pub fn players(&self) -> &[Player] {
        &self.players
    }

    pub fn player_count(&self) -> usize {
        self.players.len()
    }

    pub fn seat_of(&self, player_id: &str) -> Option<Seat> {
        self.players.iter().position(|p| p.id == player_id).map(Seat)
    }

    pub fn scores(&self) -> Vec<i32> {
        self.players.iter().map(|p| p.score).collect()
    }

    pub fn reader(&self) -> Seat {
        self.reader
    }

    pub fn is_frozen(&self, seat: Seat) -> bool {
        self.frozen[seat.index()]
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn board(&self) -> &Board {
        &self.board
    }

    pub fn text(&self) -> &TextDocument {
        &self.text
    }

    pub fn turn_number(&self) -> u32 {
        self.turn_number
    }

    /// The reader's task. Authority-side accessor: players see it through
    /// [`GameState::view_for`].
    pub fn task(&self) -> Option<&TaskAssignment> {
        self.task.as_ref()
    }

    pub fn self_explanation(&self) -> Option<&str> {
        self.self_explanation.as_deref()
    }

    pub fn discussion(&self) -> &Discussion {
        &self.discussion
    }

    pub fn extra_turn_pending(&self) -> bool {
        self.extra_turn_pending
    }

    pub fn two_dice_armed(&self) -> bool {
        self.two_dice_armed
    }

    pub fn result(&self) -> Option<&GameResult> {
        self.result.as_ref()
    }

    pub fn has_submitted_argument(&self, seat: Seat) -> bool {
        self.first_votes[seat.index()].is_some()
    }

    pub fn has_revoted(&self, seat: Seat) -> bool {
        self.revotes[seat.index()].is_some()
    }

    /// Sentences shown this turn: 1 through the current target sentence.
    pub fn visible_text(&self) -> Result<Reveal<'_>, GameError> {
        self.text.reveal(self.text_cursor).ok_or(GameError::TextExhausted)
    }

    pub fn public_state(&self) -> PublicState {
        PublicState {
            phase: self.phase,
            reader: self.reader,
            turn_number: self.turn_number,
            scores: self.scores(),
            tokens: self.board.tokens().to_vec(),
            frozen: self.frozen.clone(),
        }
    }

    /// Players the current phase is waiting on.
    pub fn waiting_on(&self) -> Vec<Seat> {
        let all = (0..self.players.len()).map(Seat);
        match self.phase {
            Phase::ReaderCompose | Phase::PowerCardWindow | Phase::DiceRoll | Phase::EventCardDraw => {
                vec![self.reader]
            }
            Phase::Identification => all.filter(|s| !self.has_submitted_argument(*s)).collect(),
            Phase::Discussion => all
                .filter(|s| {
                    !self.discussion.forfeited[s.index()]
                        && self.discussion.contributions[s.index()] < self.config.max_contributions
                })
                .collect(),
            Phase::Revote => all.filter(|s| !self.has_revoted(*s)).collect(),
            _ => Vec::new(),
        }
    }

    /// The state as `viewer` may see it: their own submissions and hand,
    /// everyone's submissions once revealed, and the task only for the reader
    /// or after scoring.
    pub fn view_for(&self, viewer: Seat) -> PlayerView {
        let own_or_revealed = |seat: usize, revealed: bool| revealed || seat == viewer.index();
        PlayerView {
            viewer,
            phase: self.phase,
            reader: self.reader,
            turn_number: self.turn_number,
            scores: self.scores(),
            tokens: self.board.tokens().to_vec(),
            frozen: self.frozen.clone(),
            task: self
                .task
                .clone()
                .filter(|_| viewer == self.reader || self.task_revealed),
            self_explanation: self.self_explanation.clone(),
            arguments: self
                .first_votes
                .iter()
                .enumerate()
                .map(|(i, a)| a.clone().filter(|_| own_or_revealed(i, self.arguments_revealed)))
                .collect(),
            revotes: self
                .revotes
                .iter()
                .enumerate()
                .map(|(i, r)| r.clone().filter(|_| own_or_revealed(i, self.revotes_revealed)))
                .collect(),
            submitted: match self.phase {
                Phase::Revote => self.revotes.iter().map(Option::is_some).collect(),
                _ => self.first_votes.iter().map(Option::is_some).collect(),
            },
            hand: self.board.hand(viewer).to_vec(),
        }
    }

    // ---- guards -------------------------------------------------------

    fn expect_phase(&self, expected: Phase) -> Result<(), GameError> {
        if self.phase == expected {
            Ok(())
        } else if self.phase == Phase::GameOver {
            Err(GameError::GameOver)
        } else {
            Err(GameError::WrongPhase {
                expected,
                actual: self.phase,
            })
        }
    }

    fn seat(&self, actor: Option<Seat>) -> Result<Seat, GameError> {
        let seat = actor.ok_or(GameError::NoActor)?;
        if seat.index() < self.players.len() {
            Ok(seat)
        } else {
            Err(GameError::NoSuchPlayer(seat.index()))
        }
    }

    fn expect_reader(&self, actor: Option<Seat>) -> Result<Seat, GameError> {
        let seat = self.seat(actor)?;
        if seat == self.reader {
            Ok(seat)
        } else {
            Err(GameError::NotReader)
        }
    }

    fn set_phase(&mut self, phase: Phase, events: &mut Vec<GameEvent>) {
        self.phase = phase;
        events.push(GameEvent::PhaseChanged { phase });
    }

    fn current_task(&self) -> &TaskAssignment {
        self.task.as_ref().expect("a task is drawn before the reader composes")
    }

    // ---- reader's task ----------------------------------------------

    pub fn draw_task(&mut self, actor: Option<Seat>) -> Result<Vec<GameEvent>, GameError> {
        self.expect_phase(Phase::TurnStart)?;
        let reader = self.expect_reader(actor)?;
        let target = self.visible_text()?.target;

        let strategy = Strategy::ASSIGNABLE[self.rng.below(Strategy::ASSIGNABLE.len())];
        let value = self.config.point_values[self.rng.below(self.config.point_values.len())];
        let task = TaskAssignment {
            strategy,
            value,
            strategy_rerolls: 0,
            value_rerolls: 0,
        };
        self.task = Some(task.clone());
        let mut events = vec![GameEvent::TextRevealed { target }, GameEvent::TaskAssigned { reader, task }];
        self.set_phase(Phase::ReaderCompose, &mut events);
        Ok(events)
    }

    pub fn reroll_strategy(&mut self, actor: Option<Seat>) -> Result<Vec<GameEvent>, GameError> {
        self.expect_phase(Phase::ReaderCompose)?;
        let reader = self.expect_reader(actor)?;
        let current = self.current_task().strategy;
        let options: Vec<Strategy> = Strategy::ASSIGNABLE.into_iter().filter(|s| *s != current).collect();
        let strategy = options[self.rng.below(options.len())];

        let cost = self.config.strategy_reroll_cost;
        self.players[reader.index()].score -= cost;
        let task = self.task.as_mut().expect("task drawn");
        task.strategy = strategy;
        task.strategy_rerolls += 1;
        Ok(vec![GameEvent::TaskRerolled {
            reader,
            task: task.clone(),
            cost,
        }])
    }

    pub fn reroll_value(&mut self, actor: Option<Seat>) -> Result<Vec<GameEvent>, GameError> {
        self.expect_phase(Phase::ReaderCompose)?;
        let reader = self.expect_reader(actor)?;
        let current = self.current_task().value;
        let options: Vec<u32> = self.config.point_values.iter().copied().filter(|v| *v != current).collect();
        let value = options[self.rng.below(options.len())];

        let cost = self.config.value_reroll_cost;
        self.players[reader.index()].score -= cost;
        let task = self.task.as_mut().expect("task drawn");
        task.value = value;
        task.value_rerolls += 1;
        Ok(vec![GameEvent::TaskRerolled {
            reader,
            task: task.clone(),
            cost,
        }])
    }

    pub fn submit_self_explanation(&mut self, actor: Option<Seat>, text: &str) -> Result<Vec<GameEvent>, GameError> {
        self.expect_phase(Phase::ReaderCompose)?;
        let reader = self.expect_reader(actor)?;
        if text.trim().is_empty() {
            return Err(GameError::EmptySelfExplanation);
        }
        self.self_explanation = Some(text.to_string());
        let mut events = vec![GameEvent::SelfExplanationSubmitted {
            reader,
            text: text.to_string(),
        }];
        self.set_phase(Phase::Identification, &mut events);
        Ok(events)
    }

    // ---- first vote --------------------------------------------------

    pub fn submit_argument(&mut self, actor: Option<Seat>, argument: &Argument) -> Result<Vec<GameEvent>, GameError> {
        self.expect_phase(Phase::Identification)?;
        let seat = self.seat(actor)?;
        if self.first_votes[seat.index()].is_some() {
            return Err(GameError::AlreadySubmitted);
        }
        let se = self.self_explanation.as_deref().unwrap_or_default();
        argument.validate(&self.config.reasons, se)?;

        self.first_votes[seat.index()] = Some(argument.clone());
        let mut events = vec![GameEvent::ArgumentSealed { seat }];
        if self.first_votes.iter().all(Option::is_some) {
            self.arguments_revealed = true;
            events.push(GameEvent::ArgumentsRevealed {
                arguments: self.first_votes.iter().flatten().cloned().collect(),
            });
            self.set_phase(Phase::FirstSummary, &mut events);
        }
        Ok(events)
    }

    fn first_round_strategies(&self) -> Option<Vec<Strategy>> {
        self.first_votes.iter().map(|a| a.as_ref().map(|a| a.strategy)).collect()
    }

    pub fn score_first_vote(&mut self) -> Result<Vec<GameEvent>, GameError> {
        self.expect_phase(Phase::FirstSummary)?;
        let votes = self.first_round_strategies().ok_or(GameError::MissingArguments)?;
        let score = scoring::score_first_vote(&votes, self.reader, self.current_task(), &self.config);
        for (player, delta) in self.players.iter_mut().zip(&score.deltas) {
            player.score += delta;
        }
        let unanimous = matches!(score.outcome, FirstVoteOutcome::Unanimous(_));
        if unanimous {
            self.task_revealed = true;
        }
        let mut events = vec![GameEvent::FirstVoteScored {
            outcome: score.outcome,
            deltas: score.deltas,
            task: self.task.clone().filter(|_| unanimous),
        }];
        if unanimous {
            self.set_phase(Phase::PowerCardWindow, &mut events);
        } else {
            self.discussion = Discussion::new(self.players.len());
            events.push(GameEvent::DiscussionOpened);
            self.set_phase(Phase::Discussion, &mut events);
        }
        Ok(events)
    }

    // ---- discussion --------------------------------------------------

    fn discussion_finished(&self) -> bool {
        let cap = self.config.max_contributions;
        self.discussion
            .contributions
            .iter()
            .zip(&self.discussion.forfeited)
            .all(|(count, forfeited)| *forfeited || *count >= cap)
    }

    fn close_discussion_if_finished(&mut self, events: &mut Vec<GameEvent>) {
        if self.discussion_finished() {
            self.set_phase(Phase::Revote, events);
        }
    }

    pub fn post_discussion_message(&mut self, actor: Option<Seat>, text: &str) -> Result<Vec<GameEvent>, GameError> {
        self.expect_phase(Phase::Discussion)?;
        let seat = self.seat(actor)?;
        if self.discussion.forfeited[seat.index()] {
            return Err(GameError::Forfeited);
        }
        if self.discussion.contributions[seat.index()] >= self.config.max_contributions {
            return Err(GameError::ContributionLimitReached);
        }
        self.discussion.contributions[seat.index()] += 1;
        let mut events = vec![GameEvent::DiscussionMessage {
            seat,
            text: text.to_string(),
            count: self.discussion.contributions[seat.index()],
        }];
        self.close_discussion_if_finished(&mut events);
        Ok(events)
    }

    /// Forfeits the player's remaining contributions. Passing twice is a no-op.
    pub fn pass_discussion(&mut self, actor: Option<Seat>) -> Result<Vec<GameEvent>, GameError> {
        self.expect_phase(Phase::Discussion)?;
        let seat = self.seat(actor)?;
        if self.discussion.forfeited[seat.index()] {
            return Ok(Vec::new());
        }
        self.discussion.forfeited[seat.index()] = true;
        let mut events = vec![GameEvent::DiscussionPassed { seat }];
        self.close_discussion_if_finished(&mut events);
        Ok(events)
    }

    /// The discussion time limit expired. Injected by whoever owns the clock.
    pub fn discussion_timeout(&mut self) -> Result<Vec<GameEvent>, GameError> {
        self.expect_phase(Phase::Discussion)?;
        self.discussion.timed_out = true;
        let mut events = vec![GameEvent::DiscussionTimedOut];
        self.set_phase(Phase::Revote, &mut events);
        Ok(events)
    }

    // ---- revote ------------------------------------------------------

    pub fn submit_revote(&mut self, actor: Option<Seat>, strategies: &BTreeSet<Strategy>) -> Result<Vec<GameEvent>, GameError> {
        self.expect_phase(Phase::Revote)?;
        let seat = self.seat(actor)?;
        if self.revotes[seat.index()].is_some() {
            return Err(GameError::AlreadySubmitted);
        }
        if strategies.is_empty() {
            return Err(GameError::EmptySelection);
        }
        self.revotes[seat.index()] = Some(strategies.clone());
        let mut events = vec![GameEvent::RevoteSealed { seat }];
        if self.revotes.iter().all(Option::is_some) {
            self.revotes_revealed = true;
            events.push(GameEvent::RevotesRevealed {
                revotes: self.revotes.iter().flatten().cloned().collect(),
            });
            self.set_phase(Phase::FinalSummary, &mut events);
        }
        Ok(events)
    }

    pub fn score_revote(&mut self) -> Result<Vec<GameEvent>, GameError> {
        self.expect_phase(Phase::FinalSummary)?;
        let first = self.first_round_strategies().ok_or(GameError::MissingArguments)?;
        let revotes: Vec<BTreeSet<Strategy>> = self
            .revotes
            .iter()
            .cloned()
            .collect::<Option<_>>()
            .ok_or(GameError::MissingRevotes)?;
        let task = self.current_task().clone();
        let deltas = scoring::score_revote(&first, &revotes, self.reader, &task, &self.config);
        for (player, delta) in self.players.iter_mut().zip(&deltas) {
            player.score += delta;
        }
        self.task_revealed = true;
        let mut events = vec![GameEvent::RevoteScored {
            accepted: scoring::accepted(&revotes, self.players.len()),
            deltas,
            task,
        }];
        self.set_phase(Phase::PowerCardWindow, &mut events);
        Ok(events)
    }

    // ---- board -------------------------------------------------------

    pub fn use_power_card(&mut self, actor: Option<Seat>, card: PowerCard, target: Option<Seat>) -> Result<Vec<GameEvent>, GameError> {
        self.expect_phase(Phase::PowerCardWindow)?;
        let seat = self.expect_reader(actor)?;
        if !self.board.holds(seat, card) {
            return Err(GameError::CardNotHeld);
        }
        let target = match card {
            PowerCard::Freeze => match target {
                Some(t) if t != seat && t.index() < self.players.len() => Some(t),
                _ => return Err(GameError::InvalidFreezeTarget),
            },
            _ => None,
        };
        self.board.discard_power(seat, card);
        let mut events = vec![GameEvent::PowerPlayed { seat, card, target }];
        match card {
            PowerCard::ExtraTurn => self.extra_turn_pending = true,
            PowerCard::RollTwoDice => self.two_dice_armed = true,
            PowerCard::Freeze => {
                let target = target.expect("checked above");
                self.frozen[target.index()] = true;
                events.push(GameEvent::PlayerFrozen { target });
            }
        }
        Ok(events)
    }

    pub fn skip_power(&mut self, actor: Option<Seat>) -> Result<Vec<GameEvent>, GameError> {
        self.expect_phase(Phase::PowerCardWindow)?;
        self.expect_reader(actor)?;
        let mut events = Vec::new();
        self.set_phase(Phase::DiceRoll, &mut events);
        Ok(events)
    }

    pub fn roll_and_move(&mut self, actor: Option<Seat>) -> Result<Vec<GameEvent>, GameError> {
        self.expect_phase(Phase::DiceRoll)?;
        self.expect_reader(actor)?;
        let count = if self.two_dice_armed { 2 } else { 1 };
        let dice: Vec<u8> = (0..count).map(|_| self.rng.die()).collect();
        Ok(self.move_by_dice(dice))
    }

    fn move_by_dice(&mut self, dice: Vec<u8>) -> Vec<GameEvent> {
        let seat = self.reader;
        self.two_dice_armed = false;
        let total: i64 = dice.iter().map(|d| *d as i64).sum();
        let (from, to) = self.board.displace(seat, total);
        let mut events = vec![GameEvent::DiceRolled { seat, dice }, GameEvent::TokenMoved { seat, from, to }];
        self.set_phase(Phase::EventCardDraw, &mut events);
        events
    }

    pub fn draw_event_card(&mut self, actor: Option<Seat>) -> Result<Vec<GameEvent>, GameError> {
        self.expect_phase(Phase::EventCardDraw)?;
        let seat = self.expect_reader(actor)?;
        let card = self.board.draw_event(&mut self.rng);
        let mut events = vec![GameEvent::EventCardDrawn { seat, card }];
        match card {
            EventCard::Forward { spaces } | EventCard::Backward { spaces } => {
                let delta = if matches!(card, EventCard::Forward { .. }) {
                    spaces as i64
                } else {
                    -(spaces as i64)
                };
                let (from, to) = self.board.displace(seat, delta);
                events.push(GameEvent::TokenMoved { seat, from, to });
            }
            EventCard::DrawPower => {
                if let Some(card) = self.board.draw_power(seat, &mut self.rng) {
                    events.push(GameEvent::PowerCardGranted { seat, card });
                }
            }
        }
        self.set_phase(Phase::WinCheck, &mut events);
        Ok(events)
    }

    pub fn check_win_and_advance(&mut self) -> Result<Vec<GameEvent>, GameError> {
        self.expect_phase(Phase::WinCheck)?;
        let mut events = Vec::new();
        let finished = (0..self.players.len()).map(Seat).find(|s| self.board.at_finish(*s));
        if let Some(winner) = finished {
            self.result = Some(GameResult::Won { winner });
            events.push(GameEvent::GameWon { winner });
            self.set_phase(Phase::GameOver, &mut events);
            return Ok(events);
        }

        if self.extra_turn_pending {
            self.extra_turn_pending = false;
        } else {
            let n = self.players.len();
            let mut next = (self.reader.index() + 1) % n;
            while self.frozen[next] {
                self.frozen[next] = false;
                events.push(GameEvent::FrozenTurnSkipped { seat: Seat(next) });
                next = (next + 1) % n;
            }
            self.reader = Seat(next);
        }
        self.turn_number += 1;
        self.text_cursor += 1;
        self.reset_turn();
        events.push(GameEvent::TurnStarted {
            reader: self.reader,
            turn_number: self.turn_number,
        });
        self.set_phase(Phase::TurnStart, &mut events);
        Ok(events)
    }

    fn reset_turn(&mut self) {
        let n = self.players.len();
        self.task = None;
        self.task_revealed = false;
        self.self_explanation = None;
        self.first_votes = vec![None; n];
        self.arguments_revealed = false;
        self.revotes = vec![None; n];
        self.revotes_revealed = false;
        self.discussion = Discussion::new(n);
        self.two_dice_armed = false;
    }

    /// Swaps in a continuation text once every target of the current one has
    /// been used; the reveal schedule restarts at its first target.
    pub fn replace_text(&mut self, text: &TextDocument) -> Result<Vec<GameEvent>, GameError> {
        self.expect_phase(Phase::TurnStart)?;
        text.validate().map_err(GameError::InvalidText)?;
        self.text = text.clone();
        self.text_cursor = 0;
        Ok(vec![GameEvent::TextReplaced { text_id: text.id.clone() }])
    }

    pub fn abort(&mut self, reason: &AbortReason) -> Result<Vec<GameEvent>, GameError> {
        if self.phase == Phase::GameOver {
            return Err(GameError::GameOver);
        }
        self.result = Some(GameResult::Aborted(reason.clone()));
        let mut events = vec![GameEvent::GameAborted { reason: reason.clone() }];
        self.set_phase(Phase::GameOver, &mut events);
        Ok(events)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::model::Span;
    use Strategy::*;

    pub(crate) fn ph_text() -> TextDocument {
        TextDocument {
            id: "ph".into(),
            title: "Water quality".into(),
            sentences: vec![
                "Water quality is evaluated using pH values for many reasons.".into(),
                "For example, if the pH of your tap water is too high, it might indicate that calcium or magnesium deposits are forming in and may clog your water pipes.".into(),
                "On the other hand, if the pH is too low, the water may be corroding your pipes.".into(),
                "The pH of water is important to life.".into(),
            ],
            targets: vec![1, 3, 4],
        }
    }

    pub(crate) fn setup(players: usize, seed: u64) -> GameSetup {
        GameSetup {
            game_id: "g1".into(),
            players: (0..players)
                .map(|i| PlayerDescriptor::new(format!("p{i}"), format!("Player {i}")))
                .collect(),
            text: ph_text(),
            config: RulesConfig::default(),
            seed,
        }
    }

    pub(crate) fn game(players: usize, seed: u64) -> GameState {
        GameState::new(&setup(players, seed)).unwrap()
    }

    const SE: &str = "I heard about pH in chemistry. I bet we learn about what neutral pH is.";

    fn arg(strategy: Strategy) -> Argument {
        let reason = RulesConfig::default().reasons.reasons_for(strategy)[0].code.clone();
        let mut a = Argument::new(strategy, &[&reason], Span::new(2, 7));
        if reason == "other" {
            a.freetext = Some("because".into());
        }
        a
    }

    fn force_task(g: &mut GameState, strategy: Strategy, value: u32) {
        if let Some(t) = g.task.as_mut() {
            t.strategy = strategy;
            t.value = value;
        }
    }

    /// Plays to FirstSummary with the given first-round strategies.
    fn to_first_summary(g: &mut GameState, votes: &[Strategy]) {
        let r = Some(g.reader());
        g.draw_task(r).unwrap();
        g.submit_self_explanation(r, SE).unwrap();
        for (i, v) in votes.iter().enumerate() {
            g.submit_argument(Some(Seat(i)), &arg(*v)).unwrap();
        }
        assert_eq!(g.phase(), Phase::FirstSummary);
    }

    #[test]
    fn new_game_initial_state() {
        let g = game(3, 42);
        assert_eq!(g.scores(), vec![0, 0, 0]);
        assert_eq!(g.board().tokens(), &[0, 0, 0]);
        assert_eq!(g.phase(), Phase::TurnStart);
        assert_eq!(g.reader(), Seat(0));
        assert_eq!(g.turn_number(), 1);
    }

    #[test]
    fn player_count_bounds() {
        for n in [0, 1, 2, 5, 6] {
            assert_eq!(GameState::new(&setup(n, 1)), Err(GameError::InvalidPlayerCount(n)));
        }
        assert!(GameState::new(&setup(3, 1)).is_ok());
        assert!(GameState::new(&setup(4, 1)).is_ok());
    }

    #[test]
    fn invalid_text_rejected() {
        let mut s = setup(3, 1);
        s.text.targets = vec![5];
        assert!(matches!(GameState::new(&s), Err(GameError::InvalidText(_))));
    }

    #[test]
    fn duplicate_ids_rejected() {
        let mut s = setup(3, 1);
        s.players[2].id = "p0".into();
        assert!(matches!(GameState::new(&s), Err(GameError::DuplicatePlayer(_))));
    }

    #[test]
    fn construction_is_deterministic() {
        assert_eq!(game(3, 42), game(3, 42));
        assert_eq!(game(3, 42).board().event_deck(), game(3, 42).board().event_deck());
        assert_ne!(game(3, 42).board().event_deck(), game(3, 43).board().event_deck());
    }

    #[test]
    fn draw_task_guards() {
        let mut g = game(3, 1);
        assert_eq!(g.draw_task(Some(Seat(1))), Err(GameError::NotReader));
        g.draw_task(Some(Seat(0))).unwrap();
        assert_eq!(g.phase(), Phase::ReaderCompose);
        assert!(matches!(g.draw_task(Some(Seat(0))), Err(GameError::WrongPhase { .. })));
        let t = g.task().unwrap();
        assert!(t.strategy.is_assignable());
        assert!([12, 14, 16, 18, 20].contains(&t.value));
    }

    #[test]
    fn rerolls_cost_points_and_change_the_task() {
        let mut g = game(3, 3);
        g.draw_task(Some(Seat(0))).unwrap();
        let before = g.task().unwrap().strategy;
        g.reroll_strategy(Some(Seat(0))).unwrap();
        assert_ne!(g.task().unwrap().strategy, before);
        assert_eq!(g.scores()[0], -10);
        g.reroll_strategy(Some(Seat(0))).unwrap();
        g.reroll_strategy(Some(Seat(0))).unwrap();
        assert_eq!(g.scores()[0], -30);
        assert_eq!(g.task().unwrap().strategy_rerolls, 3);

        force_task(&mut g, Bridging, 12);
        g.players[0].score = 20;
        g.reroll_value(Some(Seat(0))).unwrap();
        assert_eq!(g.scores()[0], 15);
        assert!([14, 16, 18, 20].contains(&g.task().unwrap().value));
        assert_eq!(g.reroll_value(Some(Seat(1))), Err(GameError::NotReader));

        g.submit_self_explanation(Some(Seat(0)), SE).unwrap();
        assert!(matches!(g.reroll_value(Some(Seat(0))), Err(GameError::WrongPhase { .. })));
        assert!(matches!(g.reroll_strategy(Some(Seat(0))), Err(GameError::WrongPhase { .. })));
    }

    #[test]
    fn self_explanation_guards() {
        let mut g = game(3, 1);
        g.draw_task(Some(Seat(0))).unwrap();
        assert_eq!(g.submit_self_explanation(Some(Seat(0)), "  "), Err(GameError::EmptySelfExplanation));
        assert_eq!(g.submit_self_explanation(Some(Seat(1)), SE), Err(GameError::NotReader));
        g.submit_self_explanation(Some(Seat(0)), "I heard about pH in chemistry...").unwrap();
        assert_eq!(g.phase(), Phase::Identification);
        assert_eq!(g.self_explanation(), Some("I heard about pH in chemistry..."));
    }

    #[test]
    fn arguments_are_sealed_until_the_last_one() {
        let mut g = game(3, 1);
        g.draw_task(Some(Seat(0))).unwrap();
        g.submit_self_explanation(Some(Seat(0)), SE).unwrap();
        g.submit_argument(Some(Seat(1)), &arg(Prediction)).unwrap();
        assert_eq!(g.submit_argument(Some(Seat(1)), &arg(Prediction)), Err(GameError::AlreadySubmitted));
        assert!(g.view_for(Seat(0)).arguments[1].is_none());
        assert!(g.view_for(Seat(1)).arguments[1].is_some());
        let bad = Argument::new(Bridging, &["specific_sentence"], Span::new(5, 2));
        assert!(matches!(g.submit_argument(Some(Seat(2)), &bad), Err(GameError::InvalidArgument(_))));
        g.submit_argument(Some(Seat(2)), &arg(Prediction)).unwrap();
        let events = g.submit_argument(Some(Seat(0)), &arg(Bridging)).unwrap();
        assert_eq!(g.phase(), Phase::FirstSummary);
        assert!(events.iter().any(|e| matches!(e, GameEvent::ArgumentsRevealed { arguments } if arguments.len() == 3)));
        assert!(g.view_for(Seat(2)).arguments.iter().all(Option::is_some));
    }

    #[test]
    fn unanimous_first_vote_skips_discussion() {
        let mut g = game(3, 1);
        to_first_summary(&mut g, &[Prediction; 3]);
        force_task(&mut g, Prediction, 20);
        g.score_first_vote().unwrap();
        assert_eq!(g.scores(), vec![25, 15, 15]);
        assert_eq!(g.phase(), Phase::PowerCardWindow);
        assert!(g.view_for(Seat(1)).task.is_some());
    }

    #[test]
    fn disagreement_opens_discussion_without_points() {
        let mut g = game(3, 1);
        to_first_summary(&mut g, &[Bridging, Prediction, Prediction]);
        g.score_first_vote().unwrap();
        assert_eq!(g.scores(), vec![0, 0, 0]);
        assert_eq!(g.phase(), Phase::Discussion);
        assert!(g.view_for(Seat(1)).task.is_none());
    }

    fn to_discussion(g: &mut GameState) {
        to_first_summary(g, &[Bridging, Prediction, Prediction]);
        g.score_first_vote().unwrap();
    }

    #[test]
    fn contribution_cap() {
        let mut g = game(3, 1);
        to_discussion(&mut g);
        for i in 1..=5 {
            let ev = g.post_discussion_message(Some(Seat(1)), "I think it predicts").unwrap();
            assert!(matches!(ev[0], GameEvent::DiscussionMessage { count, .. } if count == i));
        }
        assert_eq!(g.discussion().contributions[1], 5);
        assert_eq!(
            g.post_discussion_message(Some(Seat(1)), "one more"),
            Err(GameError::ContributionLimitReached)
        );
        g.pass_discussion(Some(Seat(2))).unwrap();
        assert_eq!(g.post_discussion_message(Some(Seat(2)), "wait"), Err(GameError::Forfeited));
        assert_eq!(g.phase(), Phase::Discussion);
        assert_eq!(g.pass_discussion(Some(Seat(2))), Ok(vec![]));
        g.pass_discussion(Some(Seat(0))).unwrap();
        assert_eq!(g.phase(), Phase::Revote);
    }

    #[test]
    fn timeout_ends_discussion() {
        let mut g = game(3, 1);
        to_discussion(&mut g);
        g.post_discussion_message(Some(Seat(0)), "hmm").unwrap();
        g.discussion_timeout().unwrap();
        assert_eq!(g.phase(), Phase::Revote);
        assert!(g.discussion().timed_out);
        assert!(matches!(g.discussion_timeout(), Err(GameError::WrongPhase { .. })));
    }

    #[test]
    fn revote_flow_and_scoring() {
        let mut g = game(3, 1);
        to_first_summary(&mut g, &[Bridging, Prediction, Prediction]);
        force_task(&mut g, Prediction, 20);
        g.score_first_vote().unwrap();
        for s in 0..3 {
            g.pass_discussion(Some(Seat(s))).unwrap();
        }
        assert_eq!(g.submit_revote(Some(Seat(1)), &BTreeSet::new()), Err(GameError::EmptySelection));
        g.submit_revote(Some(Seat(0)), &[Prediction, Bridging].into()).unwrap();
        assert_eq!(
            g.submit_revote(Some(Seat(0)), &[Prediction].into()),
            Err(GameError::AlreadySubmitted)
        );
        assert!(g.view_for(Seat(1)).revotes[0].is_none());
        g.submit_revote(Some(Seat(1)), &[Prediction].into()).unwrap();
        g.submit_revote(Some(Seat(2)), &[Prediction].into()).unwrap();
        assert_eq!(g.phase(), Phase::FinalSummary);
        g.score_revote().unwrap();
        assert_eq!(g.scores(), vec![20, 15, 15]);
        assert_eq!(g.phase(), Phase::PowerCardWindow);
    }

    fn to_power_window(g: &mut GameState) {
        let votes = vec![Prediction; g.player_count()];
        to_first_summary(g, &votes);
        g.score_first_vote().unwrap();
        assert_eq!(g.phase(), Phase::PowerCardWindow);
    }

    #[test]
    fn power_cards() {
        let mut g = game(3, 1);
        to_power_window(&mut g);
        assert_eq!(g.use_power_card(Some(Seat(0)), PowerCard::Freeze, Some(Seat(1))), Err(GameError::CardNotHeld));
        g.board.set_hand_for_test(Seat(0), vec![PowerCard::Freeze, PowerCard::RollTwoDice, PowerCard::ExtraTurn]);
        assert_eq!(
            g.use_power_card(Some(Seat(0)), PowerCard::Freeze, Some(Seat(0))),
            Err(GameError::InvalidFreezeTarget)
        );
        assert_eq!(
            g.use_power_card(Some(Seat(0)), PowerCard::Freeze, None),
            Err(GameError::InvalidFreezeTarget)
        );
        assert_eq!(
            g.use_power_card(Some(Seat(0)), PowerCard::Freeze, Some(Seat(7))),
            Err(GameError::InvalidFreezeTarget)
        );
        assert_eq!(g.use_power_card(Some(Seat(1)), PowerCard::ExtraTurn, None), Err(GameError::NotReader));
        g.use_power_card(Some(Seat(0)), PowerCard::Freeze, Some(Seat(1))).unwrap();
        assert!(g.is_frozen(Seat(1)));
        g.use_power_card(Some(Seat(0)), PowerCard::RollTwoDice, None).unwrap();
        assert!(g.two_dice_armed());
        assert!(g.board().hand(Seat(0)).contains(&PowerCard::ExtraTurn));
        g.skip_power(Some(Seat(0))).unwrap();
        assert_eq!(g.phase(), Phase::DiceRoll);
        g.roll_and_move(Some(Seat(0))).unwrap();
        assert!((2..=12).contains(&g.board().token(Seat(0))));
    }

    #[test]
    fn dice_movement() {
        let mut g = game(3, 1);
        g.phase = Phase::DiceRoll;
        g.move_by_dice(vec![4]);
        assert_eq!(g.board().token(Seat(0)), 4);
        let mut g = game(3, 1);
        g.board.displace(Seat(0), 28);
        g.move_by_dice(vec![6]);
        assert_eq!(g.board().token(Seat(0)), 30);
        let mut g = game(3, 1);
        g.two_dice_armed = true;
        let ev = g.move_by_dice(vec![3, 4]);
        assert!(ev.contains(&GameEvent::TokenMoved { seat: Seat(0), from: 0, to: 7 }));
        assert!(!g.two_dice_armed());
    }

    #[test]
    fn skip_with_empty_hand() {
        let mut g = game(3, 1);
        to_power_window(&mut g);
        assert!(g.board().hand(Seat(0)).is_empty());
        g.skip_power(Some(Seat(0))).unwrap();
        assert_eq!(g.phase(), Phase::DiceRoll);
        assert_eq!(g.skip_power(Some(Seat(0))), Err(GameError::WrongPhase { expected: Phase::PowerCardWindow, actual: Phase::DiceRoll }));
    }

    #[test]
    fn backward_event_clamps_at_origin() {
        let mut g = game(3, 1);
        g.board.displace(Seat(0), 3);
        g.phase = Phase::EventCardDraw;
        g.board.push_event_for_test(EventCard::Backward { spaces: 3 });
        g.draw_event_card(Some(Seat(0))).unwrap();
        assert_eq!(g.board().token(Seat(0)), 0);
        assert_eq!(g.phase(), Phase::WinCheck);
    }

    #[test]
    fn draw_power_event_grows_the_hand() {
        let mut g = game(3, 1);
        g.phase = Phase::EventCardDraw;
        g.board.push_event_for_test(EventCard::DrawPower);
        g.draw_event_card(Some(Seat(0))).unwrap();
        assert_eq!(g.board().hand(Seat(0)).len(), 1);
    }

    #[test]
    fn win_and_turn_rotation() {
        let mut g = game(3, 1);
        g.phase = Phase::WinCheck;
        g.check_win_and_advance().unwrap();
        assert_eq!(g.reader(), Seat(1));
        assert_eq!(g.turn_number(), 2);
        assert_eq!(g.phase(), Phase::TurnStart);

        g.phase = Phase::WinCheck;
        g.extra_turn_pending = true;
        g.check_win_and_advance().unwrap();
        assert_eq!(g.reader(), Seat(1));
        assert!(!g.extra_turn_pending());

        g.phase = Phase::WinCheck;
        g.frozen[2] = true;
        let ev = g.check_win_and_advance().unwrap();
        assert_eq!(g.reader(), Seat(0));
        assert!(!g.is_frozen(Seat(2)));
        assert!(ev.contains(&GameEvent::FrozenTurnSkipped { seat: Seat(2) }));

        g.phase = Phase::WinCheck;
        g.board.displace(Seat(0), 30);
        g.check_win_and_advance().unwrap();
        assert_eq!(g.phase(), Phase::GameOver);
        assert_eq!(g.result(), Some(&GameResult::Won { winner: Seat(0) }));
        assert_eq!(g.draw_task(Some(Seat(0))), Err(GameError::GameOver));
    }

    #[test]
    fn text_reveal_follows_targets() {
        let mut s = setup(3, 1);
        s.text.sentences = (1..=6).map(|i| format!("S{i}.")).collect();
        s.text.targets = vec![3, 5, 6];
        let mut g = GameState::new(&s).unwrap();
        assert_eq!(g.visible_text().unwrap().sentences.len(), 3);
        g.phase = Phase::WinCheck;
        g.check_win_and_advance().unwrap();
        let r = g.visible_text().unwrap();
        assert_eq!(r.sentences, &["S1.", "S2.", "S3.", "S4.", "S5."]);
        assert_eq!(r.target, 5);
        g.phase = Phase::WinCheck;
        g.check_win_and_advance().unwrap();
        g.phase = Phase::WinCheck;
        g.check_win_and_advance().unwrap();
        assert_eq!(g.visible_text().unwrap_err(), GameError::TextExhausted);
        assert_eq!(g.draw_task(Some(g.reader())), Err(GameError::TextExhausted));
        g.replace_text(&ph_text()).unwrap();
        assert_eq!(g.visible_text().unwrap().target, 1);
        assert!(g.draw_task(Some(g.reader())).is_ok());
    }

    #[test]
    fn abort_ends_the_game_once() {
        let mut g = game(4, 1);
        let reason = AbortReason::PlayerLeft { player: "p2".into() };
        g.abort(&reason).unwrap();
        assert_eq!(g.phase(), Phase::GameOver);
        assert_eq!(g.abort(&reason), Err(GameError::GameOver));
    }

    #[test]
    fn failed_operations_leave_state_unchanged() {
        let mut g = game(3, 1);
        let before = g.clone();
        let _ = g.draw_task(Some(Seat(2)));
        let _ = g.roll_and_move(Some(Seat(0)));
        assert_eq!(g, before);
    }
}
