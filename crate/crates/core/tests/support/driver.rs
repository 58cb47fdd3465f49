//! Plays whole games through the engine with randomly chosen legal moves.

#![allow(dead_code)]

use std::collections::BTreeSet;

use miboard_core::command::Command;
use miboard_core::game::{GameSetup, GameState, Phase, PlayerDescriptor};
use miboard_core::{Argument, PowerCard, RulesConfig, Seat, Span, Strategy, TextDocument};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn ph_text() -> TextDocument {
    TextDocument {
        id: "ph-water".into(),
        title: "Water quality and pH".into(),
        sentences: vec![
            "Water quality is evaluated using pH values for many reasons.".into(),
            "For example, if the pH of your tap water is too high, it might indicate that calcium or magnesium deposits are forming in and may clog your water pipes.".into(),
            "On the other hand, if the pH is too low, the water may be corroding your pipes.".into(),
            "The pH of water is important to life.".into(),
        ],
        targets: vec![1, 3, 4],
    }
}

pub fn setup(players: usize, seed: u64) -> GameSetup {
    GameSetup {
        game_id: format!("g{seed}"),
        players: (0..players)
            .map(|i| PlayerDescriptor::new(format!("s{}", i + 1), format!("Player {}", i + 1)))
            .collect(),
        text: ph_text(),
        config: RulesConfig::default(),
        seed,
    }
}

pub const SE: &str = "I heard about pH in chemistry. I bet we learn about neutral pH next.";

/// A valid argument for `strategy` against [`SE`].
pub fn argument(state: &GameState, strategy: Strategy) -> Argument {
    let reason = state.config().reasons.reasons_for(strategy)[0].code.clone();
    let arg = Argument::new(strategy, &[&reason], Span::new(2, 7));
    if reason == "other" {
        arg.with_freetext("it connects to class")
    } else {
        arg
    }
}

fn random_strategy(rng: &mut impl Rng) -> Strategy {
    Strategy::ALL[rng.gen_range(0..6)]
}

/// A legal move for the current state, or `None` once the game is over.
pub fn legal_move(state: &GameState, rng: &mut impl Rng) -> Option<(Option<Seat>, Command)> {
    if state.phase() == Phase::GameOver {
        return None;
    }
    if state.needs_replacement_text() {
        return Some((None, Command::ReplaceText { text: ph_text() }));
    }
    if let Some(step) = state.pending_system_command() {
        return Some(step);
    }
    let reader = Some(state.reader());
    let n = state.player_count();
    let cmd = match state.phase() {
        Phase::ReaderCompose => match rng.gen_range(0..10) {
            0 => (reader, Command::RerollStrategy),
            1 => (reader, Command::RerollValue),
            _ => (reader, Command::SubmitSelfExplanation { text: SE.into() }),
        },
        Phase::Identification => {
            let seat = (0..n).map(Seat).find(|s| !state.has_submitted_argument(*s)).unwrap();
            // Skew towards agreement so both branches are common.
            let strategy = if rng.gen_bool(0.5) {
                state.task().unwrap().strategy
            } else {
                random_strategy(rng)
            };
            (Some(seat), Command::SubmitArgument { argument: argument(state, strategy) })
        }
        Phase::Discussion => {
            let waiting = state.waiting_on();
            if waiting.is_empty() || rng.gen_range(0..12) == 0 {
                (None, Command::DiscussionTimeout)
            } else {
                let seat = waiting[rng.gen_range(0..waiting.len())];
                if rng.gen_bool(0.3) {
                    (Some(seat), Command::PassDiscussion)
                } else {
                    (Some(seat), Command::PostDiscussionMessage { text: "I think so".into() })
                }
            }
        }
        Phase::Revote => {
            let seat = (0..n).map(Seat).find(|s| !state.has_revoted(*s)).unwrap();
            let mut set = BTreeSet::new();
            while set.is_empty() {
                for s in Strategy::ALL {
                    if rng.gen_range(0..4) == 0 {
                        set.insert(s);
                    }
                }
            }
            (Some(seat), Command::SubmitRevote { strategies: set })
        }
        Phase::PowerCardWindow => {
            let hand = state.board().hand(state.reader());
            if !hand.is_empty() && rng.gen_bool(0.7) {
                let card = hand[rng.gen_range(0..hand.len())];
                let target = match card {
                    PowerCard::Freeze => Some(Seat((state.reader().index() + 1 + rng.gen_range(0..n - 1)) % n)),
                    _ => None,
                };
                (reader, Command::UsePowerCard { card, target })
            } else {
                (reader, Command::SkipPower)
            }
        }
        Phase::DiceRoll => (reader, Command::RollAndMove),
        Phase::EventCardDraw => (reader, Command::DrawEventCard),
        Phase::TurnStart | Phase::FirstSummary | Phase::FinalSummary | Phase::WinCheck | Phase::GameOver => {
            unreachable!("handled above")
        }
    };
    Some(cmd)
}

pub struct PlayedGame {
    pub setup: GameSetup,
    pub commands: Vec<(Option<Seat>, Command)>,
    pub events: Vec<miboard_core::GameEvent>,
    pub state: GameState,
}

/// Plays to the end (or `max_steps`) with moves drawn from `policy_seed`.
pub fn play(setup: GameSetup, policy_seed: u64, max_steps: usize) -> PlayedGame {
    let mut rng = ChaCha8Rng::seed_from_u64(policy_seed);
    let mut state = GameState::new(&setup).unwrap();
    let mut commands = Vec::new();
    let mut events = Vec::new();
    for _ in 0..max_steps {
        let Some((actor, cmd)) = legal_move(&state, &mut rng) else { break };
        let ev = state
            .apply(actor, &cmd)
            .unwrap_or_else(|e| panic!("legal move {cmd:?} by {actor:?} refused: {e}"));
        events.extend(ev);
        commands.push((actor, cmd));
    }
    PlayedGame {
        setup,
        commands,
        events,
        state,
    }
}
