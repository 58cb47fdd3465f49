//! Deterministic bot decision tables.

use std::collections::{BTreeSet, HashSet};

use miboard_core::protocol::view::ClientView;
use miboard_core::protocol::{Control, WireMessage};
use miboard_core::{Argument, Phase, PowerCard, Seat, Span, Strategy};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolicyKind {
    /// Writes the canned self-explanation for its task and identifies the
    /// strategy behind every self-explanation correctly.
    Agree,
    /// Always names a strategy fixed by its seat, so no two bots agree.
    Disagree,
    /// Like `Agree`, but rerolls strategy and value once per reader turn.
    Reroller,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiscussionStyle {
    /// Says nothing, so only the timer ends the discussion.
    #[default]
    Silent,
    Pass,
    /// Two messages, then a pass.
    Talk,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Policy {
    pub kind: PolicyKind,
    pub discussion: DiscussionStyle,
    pub use_powers: bool,
    pub seed: u64,
}

/// Canned self-explanations, one per assignable strategy.
pub fn canned_explanation(strategy: Strategy) -> &'static str {
    match strategy {
        Strategy::Bridging => "This sentence links back to what the text said earlier about the same idea.",
        Strategy::ComprehensionMonitoring => "I am not sure I understand this part yet, so I should read it again.",
        Strategy::Elaboration => "This reminds me of something I learned outside of this text.",
        Strategy::Paraphrasing => "In other words, the sentence says the same thing in simpler words.",
        Strategy::Prediction => "I bet the next sentence will explain what happens because of this.",
        Strategy::Other => "Hmm.",
    }
}

/// The strategy a canned self-explanation stands for.
pub fn read_explanation(text: &str) -> Strategy {
    Strategy::ASSIGNABLE
        .into_iter()
        .find(|s| canned_explanation(*s) == text)
        .unwrap_or(Strategy::Other)
}

const TALK: [&str; 4] = [
    "I think it is clearly that one.",
    "The wording gives it away for me.",
    "I could be convinced otherwise.",
    "Look at how it starts.",
];

/// What a bot remembers between decisions.
#[derive(Debug, Clone, Default)]
pub struct Memory {
    done: HashSet<(u32, Phase)>,
    rerolls: u32,
    talked: u32,
    turn: u32,
}

impl Memory {
    fn once(&mut self, view: &ClientView, phase: Phase) -> bool {
        self.done.insert((view.turn_number, phase))
    }
}

impl Policy {
    fn first_choice(&self, view: &ClientView, me: Seat) -> Strategy {
        match self.kind {
            PolicyKind::Disagree => Strategy::ASSIGNABLE[me.index() % Strategy::ASSIGNABLE.len()],
            PolicyKind::Agree | PolicyKind::Reroller => {
                if view.is_reader() {
                    view.task.as_ref().map_or(Strategy::Other, |t| t.strategy)
                } else {
                    view.self_explanation.as_deref().map_or(Strategy::Other, read_explanation)
                }
            }
        }
    }

    fn argument(&self, view: &ClientView, strategy: Strategy) -> Argument {
        let se_len = view.self_explanation.as_deref().map_or(0, |s| s.chars().count());
        let span = Span::new(0, se_len.min(12));
        let reasons = view.reasons.reasons_for(strategy);
        match reasons.iter().find(|r| r.code != miboard_core::config::OTHER_REASON) {
            Some(r) if strategy != Strategy::Other => Argument::new(strategy, &[r.code.as_str()], span),
            _ => Argument::new(strategy, &[miboard_core::config::OTHER_REASON], span).with_freetext("unsure"),
        }
    }

    /// The next request this bot makes, if any. Marks it as made.
    pub fn decide(&self, view: &ClientView, mem: &mut Memory) -> Option<WireMessage> {
        let me = view.seat?;
        let phase = view.phase?;
        if view.is_over() {
            return None;
        }
        if mem.turn != view.turn_number {
            *mem = Memory {
                turn: view.turn_number,
                done: std::mem::take(&mut mem.done),
                ..Memory::default()
            };
        }
        let control = match phase {
            Phase::ReaderCompose if view.is_reader() => {
                let task = view.task.as_ref()?;
                if self.kind == PolicyKind::Reroller && mem.rerolls < 2 {
                    mem.rerolls += 1;
                    if mem.rerolls == 1 {
                        Control::RerollStrategy {}
                    } else {
                        Control::RerollValue {}
                    }
                } else if mem.once(view, phase) {
                    Control::SubmitSe {
                        text: canned_explanation(task.strategy).to_string(),
                    }
                } else {
                    return None;
                }
            }
            Phase::Identification if mem.once(view, phase) => Control::SubmitArgument {
                argument: self.argument(view, self.first_choice(view, me)),
            },
            Phase::Discussion => match self.discussion {
                DiscussionStyle::Silent => return None,
                DiscussionStyle::Talk if mem.talked < 2 => {
                    let text = TALK[((self.seed as usize) + me.index() + mem.talked as usize) % TALK.len()];
                    mem.talked += 1;
                    let mut m = WireMessage::chat(text);
                    m.game_id = view.game_id.clone();
                    return Some(m);
                }
                _ if mem.once(view, phase) => Control::DiscussionPass {},
                _ => return None,
            },
            Phase::Revote if mem.once(view, phase) => {
                let mine = view.arguments.get(me.index()).map(|a| a.strategy)?;
                Control::RevoteSubmit {
                    strategies: BTreeSet::from([mine]),
                }
            }
            Phase::PowerCardWindow if view.is_reader() => match view.hand.first() {
                Some(card) if self.use_powers => {
                    let target = (*card == PowerCard::Freeze).then(|| Seat((me.index() + 1) % view.roster.len()));
                    Control::UsePower { card: *card, target }
                }
                _ if mem.once(view, phase) => Control::SkipPower {},
                _ => return None,
            },
            Phase::DiceRoll if view.is_reader() && mem.once(view, phase) => Control::RollDice {},
            Phase::EventCardDraw if view.is_reader() && mem.once(view, phase) => Control::DrawEvent {},
            _ => return None,
        };
        let mut m = WireMessage::request(control);
        m.game_id = view.game_id.clone();
        Some(m)
    }
}
