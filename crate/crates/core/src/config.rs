//! Tunable rules of a game.
//!
//! The shipped defaults live in `data/rules.toml`. Deployments override any
//! subset of keys; unspecified keys keep their default value.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::board::{EventCard, PowerCard};
use crate::error::GameError;
use crate::model::Strategy;

const DEFAULT_RULES: &str = include_str!("../data/rules.toml");

/// Reason code that marks the catch-all "Other" reason of a taxonomy.
pub const OTHER_REASON: &str = "other";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reason {
    pub code: String,
    pub label: String,
}

/// Reasons a player may cite for each strategy.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Taxonomy(pub BTreeMap<Strategy, Vec<Reason>>);

impl Taxonomy {
    pub fn reasons_for(&self, strategy: Strategy) -> &[Reason] {
        self.0.get(&strategy).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn missing(&self) -> Vec<Strategy> {
        Strategy::ALL
            .into_iter()
            .filter(|s| self.reasons_for(*s).is_empty())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventDeckComposition {
    /// Copies of Forward(1), Forward(2), Forward(3).
    pub forward: [u32; 3],
    /// Copies of Backward(1), Backward(2), Backward(3).
    pub backward: [u32; 3],
    pub draw_power: u32,
}

impl EventDeckComposition {
    pub fn cards(&self) -> Vec<EventCard> {
        let mut cards = Vec::new();
        for (i, n) in self.forward.iter().enumerate() {
            cards.extend(std::iter::repeat_n(EventCard::Forward { spaces: i as u8 + 1 }, *n as usize));
        }
        for (i, n) in self.backward.iter().enumerate() {
            cards.extend(std::iter::repeat_n(EventCard::Backward { spaces: i as u8 + 1 }, *n as usize));
        }
        cards.extend(std::iter::repeat_n(EventCard::DrawPower, self.draw_power as usize));
        cards
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerDeckComposition {
    pub extra_turn: u32,
    pub roll_two_dice: u32,
    pub freeze: u32,
}

impl PowerDeckComposition {
    pub fn cards(&self) -> Vec<PowerCard> {
        let mut cards = Vec::new();
        cards.extend(std::iter::repeat_n(PowerCard::ExtraTurn, self.extra_turn as usize));
        cards.extend(std::iter::repeat_n(PowerCard::RollTwoDice, self.roll_two_dice as usize));
        cards.extend(std::iter::repeat_n(PowerCard::Freeze, self.freeze as usize));
        cards
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RulesConfig {
    /// Number of squares; a token on square `path_length` has won.
    pub path_length: u32,
    pub point_values: Vec<u32>,
    pub strategy_reroll_cost: i32,
    pub value_reroll_cost: i32,
    /// Award for selecting an accepted strategy that is not the task strategy.
    pub flat_award: i32,
    pub unanimity_bonus: i32,
    pub convince_bonus: i32,
    /// Whether the revote pays acceptance points in addition to convince
    /// bonuses.
    pub revote_acceptance_points: bool,
    /// Whether every first-round owner of an adopted strategy is credited.
    /// When false, credit is paid only if the strategy had a single owner.
    pub convince_every_owner: bool,
    pub max_contributions: u32,
    pub discussion_secs: u64,
    pub event_deck: EventDeckComposition,
    pub power_deck: PowerDeckComposition,
    pub reasons: Taxonomy,
}

impl Default for RulesConfig {
    fn default() -> Self {
        toml::from_str(DEFAULT_RULES).expect("bundled rules.toml is valid")
    }
}

impl RulesConfig {
    /// Defaults with `overrides` deep-merged on top.
    pub fn with_overrides(overrides: toml::Table) -> Result<Self, GameError> {
        let mut base: toml::Table = toml::from_str(DEFAULT_RULES).expect("bundled rules.toml is valid");
        merge(&mut base, overrides);
        let rules: RulesConfig = toml::Value::Table(base)
            .try_into()
            .map_err(|e: toml::de::Error| GameError::InvalidConfig(e.to_string()))?;
        rules.validate()?;
        Ok(rules)
    }

    pub fn validate(&self) -> Result<(), GameError> {
        let bad = |why: &str| Err(GameError::InvalidConfig(why.to_string()));
        if self.path_length == 0 {
            return bad("path_length must be positive");
        }
        if self.point_values.len() < 2 {
            return bad("point_values needs at least two values so a reroll can change it");
        }
        let mut distinct = self.point_values.clone();
        distinct.sort_unstable();
        distinct.dedup();
        if distinct.len() != self.point_values.len() {
            return bad("point values must be distinct");
        }
        if self.point_values.contains(&0) {
            return bad("point values must be positive");
        }
        if self.event_deck.cards().is_empty() {
            return bad("the event deck is empty");
        }
        if self.max_contributions == 0 {
            return bad("max_contributions must be positive");
        }
        let missing = self.reasons.missing();
        if !missing.is_empty() {
            return Err(GameError::InvalidConfig(format!("no reasons configured for {missing:?}")));
        }
        Ok(())
    }

    /// Half of a task's points, rounded down.
    pub fn half_points(&self, value: u32) -> i32 {
        (value / 2) as i32
    }
}

fn merge(base: &mut toml::Table, overrides: toml::Table) {
    for (key, value) in overrides {
        match (base.get_mut(&key), value) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => merge(b, o),
            (_, v) => {
                base.insert(key, v);
            }
        }
    }
}
