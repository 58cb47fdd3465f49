//! Scripted headless players.
//!
//! Bots connect over the ordinary WebSocket protocol and follow fixed
//! decision tables, driven in lockstep by [`harness::run`].

use thiserror::Error;

pub mod client;
pub mod harness;
pub mod policy;
pub mod script;
pub mod transcript;

pub use harness::{run, write_transcripts, Outcome};
pub use script::Script;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("step {step}: assertion failed: {detail}")]
    AssertionFailed { step: usize, detail: String },
    #[error("step {step}: timed out waiting for {what}")]
    Timeout { step: usize, what: String },
    #[error("cannot connect to {url}: {reason}")]
    Connect { url: String, reason: String },
    #[error("step {step}: connection error: {reason}")]
    Connection { step: usize, reason: String },
    #[error("bad script: {0}")]
    Script(String),
}

impl HarnessError {
    pub(crate) fn closed(step: usize, bot: &str) -> Self {
        HarnessError::Connection {
            step,
            reason: format!("{bot} is disconnected"),
        }
    }
}
