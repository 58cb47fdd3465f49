//! Sessions and matchmaking. Everything here happens under one lock, which
//! is never held across I/O: frames go out through unbounded channels and
//! game work happens in the room tasks.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use miboard_core::config::RulesConfig;
use miboard_core::hash::fnv1a64;
use miboard_core::matchmaking::{LeaveOutcome, Room, Zone};
use miboard_core::persistence::corpus::Corpus;
use miboard_core::protocol::message::{ChatBody, Direction, RosterEntry};
use miboard_core::protocol::{Body, Control, WireMessage};
use parking_lot::Mutex;
use tokio::sync::mpsc;
use tokio::task::JoinHandle;

use crate::clock::Clock;
use crate::frames::Sequencer;
use crate::room::{RoomActor, RoomMsg};

/// Frames waiting to be written to one connection.
pub type Outbox = mpsc::UnboundedSender<WireMessage>;

/// Zone id and room id.
pub type RoomKey = (String, String);

struct Session {
    outbox: Outbox,
    zone: Option<String>,
}

#[derive(Default)]
struct State {
    zones: BTreeMap<String, Zone>,
    sessions: HashMap<String, Session>,
    /// Sequence counters of rooms that have not started.
    seqs: HashMap<RoomKey, Sequencer>,
    games: HashMap<RoomKey, mpsc::UnboundedSender<RoomMsg>>,
    actors: Vec<JoinHandle<()>>,
    next_session: u64,
    next_game: u64,
    games_started: u64,
}

pub struct Lobby {
    state: Mutex<State>,
    corpus: Arc<Corpus>,
    rules: RulesConfig,
    base_seed: u64,
    clock: Clock,
    log_dir: PathBuf,
    default_zone: String,
}

/// Highest `n` among `g<n>.log` files, so a restarted server never reuses a
/// game id.
fn last_game_number(log_dir: &Path) -> u64 {
    std::fs::read_dir(log_dir)
        .into_iter()
        .flatten()
        .filter_map(|e| e.ok())
        .filter_map(|e| {
            let name = e.file_name().into_string().ok()?;
            name.strip_prefix('g')?.strip_suffix(".log")?.parse::<u64>().ok()
        })
        .max()
        .unwrap_or(0)
}

fn roster(room: &Room) -> Vec<RosterEntry> {
    room.members
        .iter()
        .enumerate()
        .map(|(seat, m)| RosterEntry {
            player_id: m.session.clone(),
            name: m.name.clone(),
            seat,
        })
        .collect()
}

impl State {
    fn room_key_of(&self, session: &str) -> Option<(RoomKey, bool)> {
        let zone_id = self.sessions.get(session)?.zone.as_ref()?;
        let room = self.zones.get(zone_id)?.room_of(session)?;
        Some(((zone_id.clone(), room.room_id.clone()), room.started))
    }

    fn outbox(&self, session: &str) -> Option<&Outbox> {
        self.sessions.get(session).map(|s| &s.outbox)
    }

    fn private(&mut self, session: &str, key: Option<&RoomKey>, control: Control) {
        let seq = key.and_then(|k| self.seqs.get(k)).map_or(0, Sequencer::last);
        let msg = Sequencer::starting_at(seq).stamp(None, Some(session), None, Body::Control(control));
        if let Some(tx) = self.outbox(session) {
            let _ = tx.send(msg);
        }
    }

    /// Broadcasts to the members of a room that has not started.
    fn broadcast(&mut self, key: &RoomKey, sender: Option<String>, body: Body) {
        let Some(room) = self.zones.get(&key.0).and_then(|z| z.room(&key.1)) else {
            return;
        };
        let members: Vec<String> = room.members.iter().map(|m| m.session.clone()).collect();
        let msg = self.seqs.entry(key.clone()).or_default().stamp(None, None, sender, body);
        for m in members {
            if let Some(tx) = self.outbox(&m) {
                let _ = tx.send(msg.clone());
            }
        }
    }

    fn roster_update(&mut self, key: &RoomKey) {
        if let Some(room) = self.zones.get(&key.0).and_then(|z| z.room(&key.1)) {
            let c = Control::RosterUpdate {
                members: roster(room),
                started: room.started,
                waiting_on: Vec::new(),
            };
            self.broadcast(key, None, Body::Control(c));
        }
    }
}

impl Lobby {
    pub fn new(zones: &[String], corpus: Corpus, rules: RulesConfig, base_seed: u64, clock: Clock, log_dir: PathBuf) -> Lobby {
        let state = State {
            zones: zones.iter().map(|z| (z.clone(), Zone::new(z.clone()))).collect(),
            next_game: last_game_number(&log_dir) + 1,
            ..State::default()
        };
        Lobby {
            state: Mutex::new(state),
            corpus: Arc::new(corpus),
            rules,
            base_seed,
            clock,
            log_dir,
            default_zone: zones[0].clone(),
        }
    }

    pub fn clock(&self) -> &Clock {
        &self.clock
    }

    /// Registers a connection and returns its session id.
    pub fn connect(&self, outbox: Outbox) -> String {
        let mut st = self.state.lock();
        st.next_session += 1;
        let id = format!("s{}", st.next_session);
        st.sessions.insert(id.clone(), Session { outbox, zone: None });
        id
    }

    fn token(&self, session: &str) -> String {
        format!("{:016x}", fnv1a64(format!("{}:{session}", self.base_seed).as_bytes()))
    }

    /// Sends a protocol-level notice (a decode failure, say) to a session.
    pub fn notify(&self, session: &str, control: Control) {
        let mut st = self.state.lock();
        match st.room_key_of(session) {
            Some((key, true)) => {
                if let Some(tx) = st.games.get(&key) {
                    let _ = tx.send(RoomMsg::Notice {
                        session: session.to_string(),
                        control,
                    });
                }
            }
            Some((key, false)) => st.private(session, Some(&key), control),
            None => st.private(session, None, control),
        }
    }

    pub fn handle(self: &Arc<Self>, session: &str, msg: WireMessage) {
        let mut st = self.state.lock();
        let place = st.room_key_of(session);
        if let Some((key, true)) = &place {
            if let Some(tx) = st.games.get(key) {
                let _ = tx.send(RoomMsg::Request {
                    session: session.to_string(),
                    msg,
                });
                return;
            }
        }
        let key = place.as_ref().map(|(k, _)| k.clone());
        match msg.body {
            Body::Chat(ChatBody { text, .. }) => match &key {
                Some(k) => st.broadcast(
                    k,
                    Some(session.to_string()),
                    Body::Chat(ChatBody {
                        text,
                        contribution: None,
                    }),
                ),
                None => st.private(session, None, Control::rejected("NotInRoom", "join a zone first")),
            },
            Body::Control(Control::JoinZone { name, zone }) => self.join(&mut st, session, key, name, zone),
            Body::Control(Control::StartGame {}) => self.start(&mut st, session, key),
            Body::Control(c) => {
                let outbound = Control::CATALOG
                    .iter()
                    .any(|(code, dir)| *code == c.code() && *dir == Direction::ServerToClient);
                let reject = if outbound {
                    Control::rejected("UnexpectedCode", format!("{} is sent by the server", c.code()))
                } else {
                    Control::rejected("NoSuchGame", "no game is running for this session")
                };
                st.private(session, key.as_ref(), reject);
            }
        }
    }

    fn join(&self, st: &mut State, session: &str, key: Option<RoomKey>, name: String, zone: Option<String>) {
        if key.is_some() {
            let reject = Control::rejected("AlreadyInRoom", format!("session {session} is already in a room"));
            return st.private(session, key.as_ref(), reject);
        }
        let zone_id = zone.unwrap_or_else(|| self.default_zone.clone());
        let Some(z) = st.zones.get_mut(&zone_id) else {
            return st.private(session, None, Control::rejected("NoSuchZone", format!("no zone {zone_id}")));
        };
        let room = match z.auto_join(session, &name) {
            Ok(room) => room,
            Err(e) => return st.private(session, None, Control::rejected(e.code(), e.to_string())),
        };
        let key = (zone_id.clone(), room.room_id.clone());
        let seat = room.members.len() - 1;
        if let Some(s) = st.sessions.get_mut(session) {
            s.zone = Some(zone_id.clone());
        }
        let joined = Control::RoomJoined {
            room_id: key.1.clone(),
            zone_id,
            session_id: session.to_string(),
            player_id: session.to_string(),
            seat,
            token: self.token(session),
        };
        st.private(session, Some(&key), joined);
        st.roster_update(&key);
    }

    fn start(self: &Arc<Self>, st: &mut State, session: &str, key: Option<RoomKey>) {
        let Some(key) = key else {
            return st.private(session, None, Control::rejected("NotInRoom", "join a zone first"));
        };
        let game_id = format!("g{}", st.next_game);
        let seed = self.base_seed.wrapping_add(st.games_started);
        let zone = st.zones.get_mut(&key.0).expect("session zone exists");
        let started = match zone.start_game(&key.1, session, &game_id, &self.corpus, &self.rules, seed) {
            Ok(s) => s,
            Err(e) => return st.private(session, Some(&key), Control::rejected(e.code(), e.to_string())),
        };
        st.next_game += 1;
        st.games_started += 1;
        let members = started
            .setup
            .players
            .iter()
            .map(|p| st.outbox(&p.id).cloned())
            .collect();
        let (tx, rx) = mpsc::unbounded_channel();
        let actor = RoomActor {
            key: key.clone(),
            setup: started.setup,
            state: started.state,
            members,
            seq: st.seqs.remove(&key).unwrap_or_default(),
            clock: self.clock.clone(),
            corpus: self.corpus.clone(),
            log_dir: self.log_dir.clone(),
            lobby: self.clone(),
        };
        st.games.insert(key, tx);
        st.actors.push(tokio::spawn(actor.run(rx)));
        st.actors.retain(|h| !h.is_finished());
    }

    pub fn disconnect(&self, session: &str) {
        let mut st = self.state.lock();
        let Some(entry) = st.sessions.remove(session) else {
            return;
        };
        let Some(zone_id) = entry.zone else {
            return;
        };
        let Some(zone) = st.zones.get_mut(&zone_id) else {
            return;
        };
        match zone.leave(session) {
            Ok(LeaveOutcome::Left { room_id }) => st.roster_update(&(zone_id, room_id)),
            Ok(LeaveOutcome::RoomClosed { room_id }) => {
                st.seqs.remove(&(zone_id, room_id));
            }
            Ok(LeaveOutcome::Aborted { room_id, .. }) => {
                if let Some(tx) = st.games.get(&(zone_id, room_id)) {
                    let _ = tx.send(RoomMsg::Leave {
                        session: session.to_string(),
                    });
                }
            }
            Err(_) => {}
        }
    }

    /// Called by a room task when its game is over.
    pub fn finish(&self, key: &RoomKey) {
        let mut st = self.state.lock();
        st.games.remove(key);
        if let Some(zone) = st.zones.get_mut(&key.0) {
            let _ = zone.close_room(&key.1);
        }
    }

    /// Aborts every running game and returns the room tasks to wait on.
    pub fn shutdown(&self) -> Vec<JoinHandle<()>> {
        let mut st = self.state.lock();
        for tx in st.games.values() {
            let _ = tx.send(RoomMsg::Shutdown);
        }
        std::mem::take(&mut st.actors)
    }

    /// Checks the matchmaking invariants of every zone.
    pub fn check_invariants(&self) -> Result<(), String> {
        let st = self.state.lock();
        st.zones.values().try_for_each(Zone::check_invariants)
    }

    pub fn running_games(&self) -> usize {
        self.state.lock().games.len()
    }
}
