use thiserror::Error;

use crate::game::Phase;

/// Why the rules engine refused a command. A refused command leaves the
/// game state untouched.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("a game needs 3 or 4 players, got {0}")]
    InvalidPlayerCount(usize),
    #[error("invalid text: {0}")]
    InvalidText(String),
    #[error("player id {0:?} appears twice")]
    DuplicatePlayer(String),
    #[error("invalid rules configuration: {0}")]
    InvalidConfig(String),
    #[error("not allowed during {actual:?} (needs {expected:?})")]
    WrongPhase { expected: Phase, actual: Phase },
    #[error("the game is already over")]
    GameOver,
    #[error("only the reader may do that")]
    NotReader,
    #[error("the command needs an acting player")]
    NoActor,
    #[error("no player in seat {0}")]
    NoSuchPlayer(usize),
    #[error("every target sentence of the text has been used")]
    TextExhausted,
    #[error("the self-explanation is empty")]
    EmptySelfExplanation,
    #[error("already submitted")]
    AlreadySubmitted,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("not every player has submitted an argument")]
    MissingArguments,
    #[error("discussion contribution limit reached")]
    ContributionLimitReached,
    #[error("you passed on the rest of the discussion")]
    Forfeited,
    #[error("select at least one strategy")]
    EmptySelection,
    #[error("not every player has revoted")]
    MissingRevotes,
    #[error("that power card is not in your hand")]
    CardNotHeld,
    #[error("freeze must target another player in the game")]
    InvalidFreezeTarget,
}

impl GameError {
    /// Stable identifier used in `Rejected` frames and the event log.
    pub fn code(&self) -> &'static str {
        match self {
            GameError::InvalidPlayerCount(_) => "InvalidPlayerCount",
            GameError::InvalidText(_) => "InvalidText",
            GameError::DuplicatePlayer(_) => "DuplicatePlayer",
            GameError::InvalidConfig(_) => "InvalidConfig",
            GameError::WrongPhase { .. } => "WrongPhase",
            GameError::GameOver => "GameOver",
            GameError::NotReader => "NotReader",
            GameError::NoActor => "NoActor",
            GameError::NoSuchPlayer(_) => "NoSuchPlayer",
            GameError::TextExhausted => "TextExhausted",
            GameError::EmptySelfExplanation => "EmptySelfExplanation",
            GameError::AlreadySubmitted => "AlreadySubmitted",
            GameError::InvalidArgument(_) => "InvalidArgument",
            GameError::MissingArguments => "MissingArguments",
            GameError::ContributionLimitReached => "ContributionLimitReached",
            GameError::Forfeited => "Forfeited",
            GameError::EmptySelection => "EmptySelection",
            GameError::MissingRevotes => "MissingRevotes",
            GameError::CardNotHeld => "CardNotHeld",
            GameError::InvalidFreezeTarget => "InvalidFreezeTarget",
        }
    }
}
