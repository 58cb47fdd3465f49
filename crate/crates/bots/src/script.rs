//! Scenario files.

use std::path::Path;

use miboard_core::Phase;
use serde::{Deserialize, Serialize};

use crate::policy::{DiscussionStyle, PolicyKind};
use crate::HarnessError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Script {
    pub name: String,
    #[serde(default)]
    pub zone: Option<String>,
    #[serde(default)]
    pub discussion: DiscussionStyle,
    #[serde(default = "yes")]
    pub use_powers: bool,
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
    pub bots: Vec<BotSpec>,
    #[serde(default)]
    pub expect: Expect,
    #[serde(default)]
    pub disconnect: Option<Disconnect>,
}

fn yes() -> bool {
    true
}

fn default_max_steps() -> usize {
    20_000
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BotSpec {
    pub name: String,
    pub policy: PolicyKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ResultKind {
    GameOver,
    GameAborted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VoteKind {
    Unanimous,
    Disagreement,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expect {
    pub result: Option<ResultKind>,
    /// Outcome of every scored first vote.
    pub first_vote: Option<VoteKind>,
    /// Every unanimous first vote pays the reader value + 5 and each
    /// guesser half the value, rounded down, + 5.
    #[serde(default)]
    pub unanimity_schedule: bool,
    /// Every scored turn reaches the revote through the discussion timer.
    #[serde(default)]
    pub timeout_every_round: bool,
    /// Phases every scored turn passes through, in order.
    pub turn_phases: Option<Vec<Phase>>,
    /// Final scores equal the sum of the broadcast score deltas.
    #[serde(default)]
    pub scores_add_up: bool,
}

/// Drop bot `bot` once everyone is in `phase` of turn `turn`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Disconnect {
    pub bot: usize,
    pub turn: u32,
    pub phase: Phase,
}

impl Script {
    pub fn parse(src: &str) -> Result<Script, HarnessError> {
        let script: Script = toml::from_str(src).map_err(|e| HarnessError::Script(e.to_string()))?;
        if !(3..=4).contains(&script.bots.len()) {
            return Err(HarnessError::Script(format!(
                "a game needs 3 or 4 bots, got {}",
                script.bots.len()
            )));
        }
        if let Some(d) = script.disconnect {
            if d.bot >= script.bots.len() {
                return Err(HarnessError::Script(format!("no bot {} to disconnect", d.bot)));
            }
        }
        Ok(script)
    }

    pub fn load(path: &Path) -> Result<Script, HarnessError> {
        let src = std::fs::read_to_string(path).map_err(|e| HarnessError::Script(format!("{}: {e}", path.display())))?;
        Script::parse(&src)
    }
}
