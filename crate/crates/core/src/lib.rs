//! Rules engine, matchmaking, wire protocol and event log of MiBoard.
//!
//! Everything in this crate is synchronous and free of I/O except the
//! `persistence` module, which reads corpora and reads/writes log files.

pub mod board;
pub mod command;
pub mod config;
pub mod error;
pub mod game;
pub mod hash;
pub mod matchmaking;
pub mod model;
pub mod persistence;
pub mod protocol;
pub mod rng;
pub mod scoring;
pub mod text;

pub use board::{Board, EventCard, PowerCard};
pub use command::Command;
pub use config::RulesConfig;
pub use error::GameError;
pub use game::{GameEvent, GameSetup, GameState, Phase, PlayerDescriptor};
pub use model::{Argument, Seat, Span, Strategy, TaskAssignment};
pub use text::TextDocument;
