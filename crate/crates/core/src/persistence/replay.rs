//! Rebuilding a game from its log.

use std::path::Path;

use super::log::{read_log, EventRecord};
use super::PersistError;
use crate::game::{GameSetup, GameState};
use crate::hash::state_hash;
use crate::model::Seat;

/// Folds `records` through a fresh game built from `setup`, checking the
/// state hash after every record. Refused commands must be refused again
/// with the same error code and leave the hash unchanged.
pub fn replay(setup: &GameSetup, records: &[EventRecord]) -> Result<GameState, PersistError> {
    let mut state = GameState::new(setup).map_err(|_| PersistError::CorruptLog(0))?;
    for (i, record) in records.iter().enumerate() {
        let seq = i as u64 + 1;
        if record.seq != seq {
            return Err(PersistError::CorruptLog(seq));
        }
        let command = record.command().map_err(|_| PersistError::CorruptLog(seq))?;
        let actor = match &record.actor {
            Some(id) => Some(state.seat_of(id).ok_or(PersistError::CorruptLog(seq))?),
            None => None::<Seat>,
        };
        let outcome = state.apply(actor, &command);
        let rejected = outcome.err().map(|e| e.code().to_string());
        if rejected != record.rejected || state_hash(&state) != record.post_state_hash {
            return Err(PersistError::HashMismatch(seq));
        }
    }
    Ok(state)
}

/// Replays a log file, also checking the genesis hash.
pub fn replay_file(path: &Path) -> Result<GameState, PersistError> {
    let (genesis, records) = read_log(path)?;
    let initial = GameState::new(&genesis.setup).map_err(|_| PersistError::CorruptLog(0))?;
    if state_hash(&initial) != genesis.post_state_hash {
        return Err(PersistError::HashMismatch(0));
    }
    replay(&genesis.setup, &records)
}
