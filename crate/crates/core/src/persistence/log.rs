//! Append-only JSON Lines game logs.
//!
//! A log file is named `<game_id>.log`. Its first line is the `NewGame`
//! record holding the full [`GameSetup`]; every later line is an
//! [`EventRecord`] for one command, numbered densely from 1.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::PersistError;
use crate::command::Command;
use crate::error::GameError;
use crate::game::{GameEvent, GameSetup, GameState};
use crate::hash::state_hash;
use crate::model::Seat;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenesisRecord {
    pub seq: u64,
    pub wall_time: u64,
    pub game_id: String,
    pub room_id: String,
    pub setup: GameSetup,
    pub post_state_hash: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventRecord {
    pub seq: u64,
    /// Milliseconds on the server clock.
    pub wall_time: u64,
    pub game_id: String,
    pub room_id: String,
    /// Player id, or `None` for commands the server injected.
    pub actor: Option<String>,
    pub code: String,
    pub payload: serde_json::Value,
    pub post_state_hash: String,
    /// Error code when the engine refused the command.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rejected: Option<String>,
}

impl EventRecord {
    /// Rebuilds the logged command.
    pub fn command(&self) -> Result<Command, serde_json::Error> {
        let mut obj = serde_json::Map::new();
        obj.insert("code".into(), self.code.clone().into());
        if !self.payload.is_null() {
            obj.insert("payload".into(), self.payload.clone());
        }
        serde_json::from_value(serde_json::Value::Object(obj))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "record")]
pub enum LogLine {
    NewGame(GenesisRecord),
    Event(EventRecord),
}

pub fn log_path(dir: &Path, game_id: &str) -> PathBuf {
    dir.join(format!("{game_id}.log"))
}

/// Writes lines to a log, flushing each one whole.
pub struct LogWriter {
    sink: Box<dyn Write + Send>,
    path: PathBuf,
}

impl LogWriter {
    /// Creates `<dir>/<game_id>.log`. Fails if it already exists, so a log is
    /// never rewritten.
    pub fn create(dir: &Path, game_id: &str) -> Result<LogWriter, PersistError> {
        std::fs::create_dir_all(dir).map_err(PersistError::io(dir))?;
        let path = log_path(dir, game_id);
        let file = OpenOptions::new()
            .append(true)
            .create_new(true)
            .open(&path)
            .map_err(PersistError::io(&path))?;
        Ok(LogWriter {
            sink: Box::new(file),
            path,
        })
    }

    pub fn to_sink(sink: impl Write + Send + 'static) -> LogWriter {
        LogWriter {
            sink: Box::new(sink),
            path: PathBuf::from("<memory>"),
        }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn append(&mut self, line: &LogLine) -> Result<(), PersistError> {
        let mut bytes = serde_json::to_vec(line).expect("log lines always serialize");
        bytes.push(b'\n');
        let path = self.path.clone();
        self.sink.write_all(&bytes).map_err(PersistError::io(&path))?;
        self.sink.flush().map_err(PersistError::io(path))
    }
}

pub fn read_log(path: &Path) -> Result<(GenesisRecord, Vec<EventRecord>), PersistError> {
    let file = File::open(path).map_err(PersistError::io(path))?;
    parse_log(BufReader::new(file))
}

/// Parses a log. A line that cannot be read is reported by the seq it
/// should have had.
pub fn parse_log(reader: impl BufRead) -> Result<(GenesisRecord, Vec<EventRecord>), PersistError> {
    let mut lines = reader.lines();
    let genesis = match lines.next() {
        Some(Ok(line)) => match serde_json::from_str(&line) {
            Ok(LogLine::NewGame(g)) => g,
            _ => return Err(PersistError::CorruptLog(0)),
        },
        _ => return Err(PersistError::CorruptLog(0)),
    };
    let mut records = Vec::new();
    for (i, line) in lines.enumerate() {
        let expected = i as u64 + 1;
        let line = line.map_err(|_| PersistError::CorruptLog(expected))?;
        match serde_json::from_str(&line) {
            Ok(LogLine::Event(r)) if r.seq == expected => records.push(r),
            _ => return Err(PersistError::CorruptLog(expected)),
        }
    }
    Ok((genesis, records))
}

/// Result of one logged command.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Applied {
    pub seq: u64,
    pub outcome: Result<Vec<GameEvent>, GameError>,
}

/// A game whose every command is written to its log before the caller sees
/// the outcome.
pub struct RecordedGame {
    state: GameState,
    room_id: String,
    next_seq: u64,
    writer: LogWriter,
}

impl RecordedGame {
    pub fn start(setup: &GameSetup, room_id: &str, wall_time: u64, mut writer: LogWriter) -> Result<RecordedGame, PersistError> {
        let state = GameState::new(setup).map_err(|e| PersistError::SchemaError {
            entry: setup.game_id.clone(),
            reason: e.to_string(),
        })?;
        writer.append(&LogLine::NewGame(GenesisRecord {
            seq: 0,
            wall_time,
            game_id: setup.game_id.clone(),
            room_id: room_id.to_string(),
            setup: setup.clone(),
            post_state_hash: state_hash(&state),
        }))?;
        Ok(RecordedGame {
            state,
            room_id: room_id.to_string(),
            next_seq: 1,
            writer,
        })
    }

    pub fn state(&self) -> &GameState {
        &self.state
    }

    pub fn writer(&self) -> &LogWriter {
        &self.writer
    }

    pub fn apply(&mut self, actor: Option<Seat>, command: &Command, wall_time: u64) -> Result<Applied, PersistError> {
        let outcome = self.state.apply(actor, command);
        let json = serde_json::to_value(command).expect("commands always serialize");
        let payload = json.get("payload").cloned().unwrap_or(serde_json::Value::Null);
        let seq = self.next_seq;
        let record = EventRecord {
            seq,
            wall_time,
            game_id: self.state.game_id().to_string(),
            room_id: self.room_id.clone(),
            actor: actor.and_then(|s| self.state.players().get(s.index())).map(|p| p.id.clone()),
            code: command.code().to_string(),
            payload,
            post_state_hash: state_hash(&self.state),
            rejected: outcome.as_ref().err().map(|e| e.code().to_string()),
        };
        self.writer.append(&LogLine::Event(record))?;
        self.next_seq += 1;
        Ok(Applied { seq, outcome })
    }
}
