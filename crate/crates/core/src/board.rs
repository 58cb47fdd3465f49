//! Board path, tokens and the two card decks.
//!
//! Decks are stored bottom-first: the top card is the last element.

use serde::{Deserialize, Serialize};

use crate::config::RulesConfig;
use crate::model::Seat;
use crate::rng::GameRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "effect")]
pub enum EventCard {
    Forward { spaces: u8 },
    Backward { spaces: u8 },
    DrawPower,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PowerCard {
    ExtraTurn,
    RollTwoDice,
    /// The frozen player skips their next turn as reader.
    Freeze,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Board {
    path_length: u32,
    tokens: Vec<u32>,
    event_deck: Vec<EventCard>,
    event_discard: Vec<EventCard>,
    power_deck: Vec<PowerCard>,
    power_discard: Vec<PowerCard>,
    held_powers: Vec<Vec<PowerCard>>,
}

impl Board {
    pub fn new(players: usize, rules: &RulesConfig, rng: &mut GameRng) -> Self {
        let mut event_deck = rules.event_deck.cards();
        rng.shuffle(&mut event_deck);
        let mut power_deck = rules.power_deck.cards();
        rng.shuffle(&mut power_deck);
        Board {
            path_length: rules.path_length,
            tokens: vec![0; players],
            event_deck,
            event_discard: Vec::new(),
            power_deck,
            power_discard: Vec::new(),
            held_powers: vec![Vec::new(); players],
        }
    }

    pub fn path_length(&self) -> u32 {
        self.path_length
    }

    pub fn token(&self, seat: Seat) -> u32 {
        self.tokens[seat.index()]
    }

    pub fn tokens(&self) -> &[u32] {
        &self.tokens
    }

    pub fn hand(&self, seat: Seat) -> &[PowerCard] {
        &self.held_powers[seat.index()]
    }

    pub fn event_deck(&self) -> &[EventCard] {
        &self.event_deck
    }

    pub fn event_discard(&self) -> &[EventCard] {
        &self.event_discard
    }

    pub fn power_deck(&self) -> &[PowerCard] {
        &self.power_deck
    }

    pub fn power_discard(&self) -> &[PowerCard] {
        &self.power_discard
    }

    /// Every power card in the game: deck, discard and all hands.
    pub fn all_power_cards(&self) -> impl Iterator<Item = &PowerCard> {
        self.power_deck
            .iter()
            .chain(&self.power_discard)
            .chain(self.held_powers.iter().flatten())
    }

    /// Moves a token by `delta` squares, clamped to `[0, path_length]`.
    /// Returns `(from, to)`.
    pub fn displace(&mut self, seat: Seat, delta: i64) -> (u32, u32) {
        let from = self.tokens[seat.index()];
        let to = (from as i64 + delta).clamp(0, self.path_length as i64) as u32;
        self.tokens[seat.index()] = to;
        (from, to)
    }

    pub fn at_finish(&self, seat: Seat) -> bool {
        self.tokens[seat.index()] == self.path_length
    }

    /// Takes the top event card and places it on the discard pile. An empty
    /// deck is refilled from the shuffled discard first.
    pub fn draw_event(&mut self, rng: &mut GameRng) -> EventCard {
        if self.event_deck.is_empty() {
            std::mem::swap(&mut self.event_deck, &mut self.event_discard);
            rng.shuffle(&mut self.event_deck);
        }
        let card = self.event_deck.pop().expect("event deck composition is non-empty");
        self.event_discard.push(card);
        card
    }

    /// Moves the top power card into `seat`'s hand. Returns `None` when every
    /// power card is already held.
    pub fn draw_power(&mut self, seat: Seat, rng: &mut GameRng) -> Option<PowerCard> {
        if self.power_deck.is_empty() {
            std::mem::swap(&mut self.power_deck, &mut self.power_discard);
            rng.shuffle(&mut self.power_deck);
        }
        let card = self.power_deck.pop()?;
        self.held_powers[seat.index()].push(card);
        Some(card)
    }

    pub fn holds(&self, seat: Seat, card: PowerCard) -> bool {
        self.held_powers[seat.index()].contains(&card)
    }

    /// Moves one copy of `card` from the hand to the power discard.
    pub fn discard_power(&mut self, seat: Seat, card: PowerCard) -> bool {
        let hand = &mut self.held_powers[seat.index()];
        match hand.iter().position(|c| *c == card) {
            Some(i) => {
                hand.remove(i);
                self.power_discard.push(card);
                true
            }
            None => false,
        }
    }
}

#[cfg(test)]
impl Board {
    pub(crate) fn set_hand_for_test(&mut self, seat: Seat, hand: Vec<PowerCard>) {
        for card in &hand {
            let i = self.power_deck.iter().position(|c| c == card).expect("card in deck");
            self.power_deck.remove(i);
        }
        self.held_powers[seat.index()] = hand;
    }

    pub(crate) fn push_event_for_test(&mut self, card: EventCard) {
        let i = self.event_deck.iter().position(|c| *c == card).expect("card in deck");
        self.event_deck.remove(i);
        self.event_deck.push(card);
    }
}
