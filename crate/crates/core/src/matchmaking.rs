//! Zones, rooms and the auto-join policy.
//!
//! A zone is a plain value; callers that share it across threads wrap it in
//! [`SharedZone`], which serializes join, start and leave.

use std::collections::HashMap;
use std::sync::{Mutex, MutexGuard};

use serde::Serialize;
use thiserror::Error;

use crate::config::RulesConfig;
use crate::error::GameError;
use crate::game::{GameSetup, GameState, PlayerDescriptor, MAX_PLAYERS, MIN_PLAYERS};
use crate::persistence::corpus::Corpus;
use crate::rng::GameRng;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatchError {
    #[error("session {0} is already in a room")]
    AlreadyInRoom(String),
    #[error("a game needs at least 3 players")]
    NotEnoughPlayers,
    #[error("the game in this room has already started")]
    AlreadyStarted,
    #[error("session {0} is not a member of this room")]
    NotMember(String),
    #[error("no room {0}")]
    NoSuchRoom(String),
    #[error(transparent)]
    Game(#[from] GameError),
}

impl MatchError {
    pub fn code(&self) -> &'static str {
        match self {
            MatchError::AlreadyInRoom(_) => "AlreadyInRoom",
            MatchError::NotEnoughPlayers => "NotEnoughPlayers",
            MatchError::AlreadyStarted => "AlreadyStarted",
            MatchError::NotMember(_) => "NotMember",
            MatchError::NoSuchRoom(_) => "NoSuchRoom",
            MatchError::Game(e) => e.code(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Member {
    pub session: String,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Room {
    pub room_id: String,
    pub zone_id: String,
    /// Creation counter; earlier rooms are preferred by auto-join.
    pub ordinal: u64,
    pub members: Vec<Member>,
    pub started: bool,
    pub game_id: Option<String>,
}

impl Room {
    pub fn is_open(&self) -> bool {
        !self.started && self.members.len() < MAX_PLAYERS
    }

    pub fn seat_of(&self, session: &str) -> Option<usize> {
        self.members.iter().position(|m| m.session == session)
    }
}

/// What became of a room after a member left.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LeaveOutcome {
    Left { room_id: String },
    /// The last member left and the room was removed.
    RoomClosed { room_id: String },
    /// A member of a started room left; the room is gone and the survivors
    /// are back in the zone without a room.
    Aborted {
        room_id: String,
        game_id: Option<String>,
        survivors: Vec<Member>,
    },
}

/// A freshly started game and the setup it was built from.
#[derive(Debug, Clone)]
pub struct StartedGame {
    pub setup: GameSetup,
    pub state: GameState,
}

#[derive(Debug, Clone, Default)]
pub struct Zone {
    zone_id: String,
    rooms: Vec<Room>,
    next_ordinal: u64,
    by_session: HashMap<String, String>,
}

impl Zone {
    pub fn new(zone_id: impl Into<String>) -> Self {
        Zone {
            zone_id: zone_id.into(),
            ..Zone::default()
        }
    }

    pub fn zone_id(&self) -> &str {
        &self.zone_id
    }

    /// Rooms in creation order.
    pub fn rooms(&self) -> &[Room] {
        &self.rooms
    }

    pub fn room(&self, room_id: &str) -> Option<&Room> {
        self.rooms.iter().find(|r| r.room_id == room_id)
    }

    pub fn room_of(&self, session: &str) -> Option<&Room> {
        self.by_session.get(session).and_then(|id| self.room(id))
    }

    fn room_mut(&mut self, room_id: &str) -> Result<&mut Room, MatchError> {
        self.rooms
            .iter_mut()
            .find(|r| r.room_id == room_id)
            .ok_or_else(|| MatchError::NoSuchRoom(room_id.to_string()))
    }

    /// Puts `session` in the oldest room that has not started and has a free
    /// seat, creating a room if there is none.
    pub fn auto_join(&mut self, session: &str, name: &str) -> Result<&Room, MatchError> {
        if self.by_session.contains_key(session) {
            return Err(MatchError::AlreadyInRoom(session.to_string()));
        }
        let index = match self.rooms.iter().position(Room::is_open) {
            Some(i) => i,
            None => {
                self.next_ordinal += 1;
                self.rooms.push(Room {
                    room_id: format!("r{}", self.next_ordinal),
                    zone_id: self.zone_id.clone(),
                    ordinal: self.next_ordinal,
                    members: Vec::new(),
                    started: false,
                    game_id: None,
                });
                self.rooms.len() - 1
            }
        };
        let room = &mut self.rooms[index];
        room.members.push(Member {
            session: session.to_string(),
            name: name.to_string(),
        });
        self.by_session.insert(session.to_string(), room.room_id.clone());
        Ok(&self.rooms[index])
    }

    /// Checks the start preconditions without changing anything.
    pub fn can_start(&self, room_id: &str, initiator: &str) -> Result<&Room, MatchError> {
        let room = self.room(room_id).ok_or_else(|| MatchError::NoSuchRoom(room_id.to_string()))?;
        if room.seat_of(initiator).is_none() {
            return Err(MatchError::NotMember(initiator.to_string()));
        }
        if room.started {
            return Err(MatchError::AlreadyStarted);
        }
        if room.members.len() < MIN_PLAYERS {
            return Err(MatchError::NotEnoughPlayers);
        }
        Ok(room)
    }

    /// Starts the room's game: picks a text with the seed's text stream,
    /// adopts that entry's reasons, builds the game and closes the room to
    /// further joins, all or nothing.
    pub fn start_game(
        &mut self,
        room_id: &str,
        initiator: &str,
        game_id: &str,
        corpus: &Corpus,
        config: &RulesConfig,
        seed: u64,
    ) -> Result<StartedGame, MatchError> {
        let room = self.can_start(room_id, initiator)?;
        let entry = corpus.pick_random_entry(&mut GameRng::text_stream(seed));
        let mut config = config.clone();
        config.reasons = entry.reasons.clone();
        let setup = GameSetup {
            game_id: game_id.to_string(),
            players: room
                .members
                .iter()
                .map(|m| PlayerDescriptor::new(&m.session, &m.name))
                .collect(),
            text: entry.text.clone(),
            config,
            seed,
        };
        let state = GameState::new(&setup)?;
        let room = self.room_mut(room_id)?;
        room.started = true;
        room.game_id = Some(game_id.to_string());
        Ok(StartedGame { setup, state })
    }

    pub fn leave(&mut self, session: &str) -> Result<LeaveOutcome, MatchError> {
        let room_id = self
            .by_session
            .get(session)
            .cloned()
            .ok_or_else(|| MatchError::NotMember(session.to_string()))?;
        let index = self
            .rooms
            .iter()
            .position(|r| r.room_id == room_id)
            .expect("session index points at a live room");
        let room = &mut self.rooms[index];
        if room.started {
            let room = self.rooms.remove(index);
            for m in &room.members {
                self.by_session.remove(&m.session);
            }
            return Ok(LeaveOutcome::Aborted {
                room_id,
                game_id: room.game_id,
                survivors: room.members.into_iter().filter(|m| m.session != session).collect(),
            });
        }
        room.members.retain(|m| m.session != session);
        self.by_session.remove(session);
        if room.members.is_empty() {
            self.rooms.remove(index);
            Ok(LeaveOutcome::RoomClosed { room_id })
        } else {
            Ok(LeaveOutcome::Left { room_id })
        }
    }

    /// Removes a room whose game is over and returns its members, who are
    /// free to join again.
    pub fn close_room(&mut self, room_id: &str) -> Result<Vec<Member>, MatchError> {
        let index = self
            .rooms
            .iter()
            .position(|r| r.room_id == room_id)
            .ok_or_else(|| MatchError::NoSuchRoom(room_id.to_string()))?;
        let room = self.rooms.remove(index);
        for m in &room.members {
            self.by_session.remove(&m.session);
        }
        Ok(room.members)
    }

    /// Checks the structural invariants; used by tests after every step.
    pub fn check_invariants(&self) -> Result<(), String> {
        let mut seen = HashMap::new();
        for room in &self.rooms {
            if room.members.len() > MAX_PLAYERS {
                return Err(format!("{} has {} members", room.room_id, room.members.len()));
            }
            if room.started && room.members.len() < MIN_PLAYERS {
                return Err(format!("{} started with {} members", room.room_id, room.members.len()));
            }
            for m in &room.members {
                if let Some(other) = seen.insert(m.session.clone(), room.room_id.clone()) {
                    return Err(format!("{} is in {} and {}", m.session, other, room.room_id));
                }
                if self.by_session.get(&m.session) != Some(&room.room_id) {
                    return Err(format!("index disagrees about {}", m.session));
                }
            }
        }
        if seen.len() != self.by_session.len() {
            return Err("index lists sessions that are in no room".into());
        }
        Ok(())
    }
}

/// A zone behind a mutex: each call is one critical section.
#[derive(Debug, Default)]
pub struct SharedZone(Mutex<Zone>);

impl SharedZone {
    pub fn new(zone: Zone) -> Self {
        SharedZone(Mutex::new(zone))
    }

    pub fn lock(&self) -> MutexGuard<'_, Zone> {
        self.0.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
    }

    /// Joins and returns the room id and seat.
    pub fn auto_join(&self, session: &str, name: &str) -> Result<(String, usize), MatchError> {
        let mut zone = self.lock();
        let room = zone.auto_join(session, name)?;
        Ok((room.room_id.clone(), room.members.len() - 1))
    }

    pub fn leave(&self, session: &str) -> Result<LeaveOutcome, MatchError> {
        self.lock().leave(session)
    }
}
