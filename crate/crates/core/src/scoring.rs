//! Point awards for the two voting rounds.
//!
//! A strategy is accepted when strictly more than half of the players chose
//! it. The first round pays only when every player chose the same strategy;
//! any disagreement defers scoring to the revote.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::config::RulesConfig;
use crate::model::{Seat, Strategy, TaskAssignment};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", content = "strategy")]
pub enum FirstVoteOutcome {
    Unanimous(Strategy),
    Disagreement,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FirstVoteScore {
    pub outcome: FirstVoteOutcome,
    pub deltas: Vec<i32>,
}

fn is_majority(count: usize, players: usize) -> bool {
    2 * count > players
}

/// Strategies chosen by a strict majority of the given selections.
pub fn accepted<'a>(selections: impl IntoIterator<Item = &'a BTreeSet<Strategy>>, players: usize) -> BTreeSet<Strategy> {
    let mut counts = [0usize; 6];
    for set in selections {
        for s in set {
            counts[*s as usize] += 1;
        }
    }
    Strategy::ALL
        .into_iter()
        .filter(|s| is_majority(counts[*s as usize], players))
        .collect()
}

/// Points a player earns for having selected the accepted strategy `s`.
fn acceptance_award(s: Strategy, is_reader: bool, task: &TaskAssignment, rules: &RulesConfig) -> i32 {
    if s == task.strategy {
        if is_reader {
            task.value as i32
        } else {
            rules.half_points(task.value)
        }
    } else {
        rules.flat_award
    }
}

pub fn score_first_vote(votes: &[Strategy], reader: Seat, task: &TaskAssignment, rules: &RulesConfig) -> FirstVoteScore {
    let n = votes.len();
    let mut deltas = vec![0; n];
    let unanimous = votes.first().filter(|first| votes.iter().all(|v| v == *first));
    let Some(&agreed) = unanimous else {
        return FirstVoteScore {
            outcome: FirstVoteOutcome::Disagreement,
            deltas,
        };
    };
    for (seat, delta) in deltas.iter_mut().enumerate() {
        *delta = acceptance_award(agreed, seat == reader.index(), task, rules) + rules.unanimity_bonus;
    }
    FirstVoteScore {
        outcome: FirstVoteOutcome::Unanimous(agreed),
        deltas,
    }
}

/// Revote points: acceptance awards for every accepted strategy a player
/// selected, plus a convince bonus to each first-round owner of a strategy
/// that another player adopted after originally choosing differently.
pub fn score_revote(
    first: &[Strategy],
    revotes: &[BTreeSet<Strategy>],
    reader: Seat,
    task: &TaskAssignment,
    rules: &RulesConfig,
) -> Vec<i32> {
    let n = first.len();
    let mut deltas = vec![0; n];

    if rules.revote_acceptance_points {
        for s in accepted(revotes, n) {
            for (seat, set) in revotes.iter().enumerate() {
                if set.contains(&s) {
                    deltas[seat] += acceptance_award(s, seat == reader.index(), task, rules);
                }
            }
        }
    }

    for (adopter, set) in revotes.iter().enumerate() {
        for (owner, owned) in first.iter().enumerate() {
            if owner == adopter || *owned == first[adopter] || !set.contains(owned) {
                continue;
            }
            let owners = first.iter().filter(|s| *s == owned).count();
            if rules.convince_every_owner || owners == 1 {
                deltas[owner] += rules.convince_bonus;
            }
        }
    }
    deltas
}

#[cfg(test)]
mod tests {
    use super::*;
    use Strategy::*;

    fn task(strategy: Strategy, value: u32) -> TaskAssignment {
        TaskAssignment {
            strategy,
            value,
            strategy_rerolls: 0,
            value_rerolls: 0,
        }
    }

    fn set(xs: &[Strategy]) -> BTreeSet<Strategy> {
        xs.iter().copied().collect()
    }

    #[test]
    fn unanimous_on_task_strategy() {
        let r = RulesConfig::default();
        let s = score_first_vote(&[Prediction; 3], Seat(2), &task(Prediction, 20), &r);
        assert_eq!(s.outcome, FirstVoteOutcome::Unanimous(Prediction));
        assert_eq!(s.deltas, vec![15, 15, 25]);
    }

    #[test]
    fn unanimous_on_other_strategy() {
        let r = RulesConfig::default();
        let s = score_first_vote(&[Elaboration; 3], Seat(0), &task(Prediction, 20), &r);
        assert_eq!(s.deltas, vec![10, 10, 10]);
    }

    #[test]
    fn disagreement_defers_points() {
        let r = RulesConfig::default();
        let s = score_first_vote(&[Prediction, Prediction, Bridging], Seat(2), &task(Prediction, 20), &r);
        assert_eq!(s.outcome, FirstVoteOutcome::Disagreement);
        assert_eq!(s.deltas, vec![0, 0, 0]);
    }

    #[test]
    fn unanimity_floor() {
        let r = RulesConfig::default();
        let s = score_first_vote(&[Bridging; 4], Seat(1), &task(Bridging, 12), &r);
        assert_eq!(s.deltas, vec![11, 17, 11, 11]);
    }

    #[test]
    fn revote_worked_example() {
        let r = RulesConfig::default();
        // seats: A=0, B=1, R=2
        let first = [Prediction, Prediction, Bridging];
        let revotes = [set(&[Prediction]), set(&[Prediction]), set(&[Prediction, Bridging])];
        let d = score_revote(&first, &revotes, Seat(2), &task(Prediction, 20), &r);
        assert_eq!(d, vec![15, 15, 20]);
    }

    #[test]
    fn revote_two_two_split_pays_nothing() {
        let r = RulesConfig::default();
        let first = [Prediction, Prediction, Bridging, Bridging];
        let revotes: Vec<_> = first.iter().map(|s| set(&[*s])).collect();
        let d = score_revote(&first, &revotes, Seat(0), &task(Prediction, 20), &r);
        assert_eq!(d, vec![0, 0, 0, 0]);
    }

    #[test]
    fn adopting_an_unowned_strategy_earns_no_bonus() {
        let r = RulesConfig::default();
        let first = [Prediction, Bridging, Elaboration];
        let revotes = [set(&[Prediction, Paraphrasing]), set(&[Bridging]), set(&[Elaboration])];
        let d = score_revote(&first, &revotes, Seat(0), &task(Prediction, 20), &r);
        assert_eq!(d, vec![0, 0, 0]);
    }

    #[test]
    fn single_owner_policy() {
        let mut r = RulesConfig::default();
        r.convince_every_owner = false;
        r.revote_acceptance_points = false;
        let first = [Prediction, Prediction, Bridging];
        let revotes = [set(&[Prediction]), set(&[Prediction]), set(&[Prediction])];
        assert_eq!(score_revote(&first, &revotes, Seat(2), &task(Prediction, 20), &r), vec![0, 0, 0]);
        let first = [Prediction, Elaboration, Bridging];
        assert_eq!(score_revote(&first, &revotes, Seat(2), &task(Prediction, 20), &r), vec![10, 0, 0]);
    }

    #[test]
    fn several_strategies_may_be_accepted_in_a_revote() {
        let revotes = [set(&[Prediction, Bridging]), set(&[Prediction, Bridging]), set(&[Elaboration])];
        assert_eq!(accepted(&revotes, 3), set(&[Bridging, Prediction]));
    }
}
