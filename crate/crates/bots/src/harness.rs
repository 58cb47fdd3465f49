//! Lockstep driver: one request at a time, every bot caught up before the
//! next, so a run is a pure function of the script and the server seed.

use std::time::Duration;

use miboard_core::protocol::message::RosterEntry;
use miboard_core::protocol::view::ClientView;
use miboard_core::protocol::{Control, Visibility, WireMessage};
use miboard_core::scoring::FirstVoteOutcome;
use miboard_core::Phase;
use serde::Serialize;

use crate::client::Bot;
use crate::policy::{Policy, PolicyKind};
use crate::script::{ResultKind, Script, VoteKind};
use crate::transcript::{summarize, unanimous_deltas, TurnSummary};
use crate::HarnessError;

/// How long any single frame may take to arrive.
const FRAME_WAIT: Duration = Duration::from_secs(10);

#[derive(Debug, Clone, Serialize)]
pub struct Outcome {
    pub script: String,
    pub seed: u64,
    pub game_id: Option<String>,
    pub steps: usize,
    pub result: Option<ResultKind>,
    pub players: Vec<RosterEntry>,
    pub final_scores: Vec<i32>,
    pub turns: Vec<TurnSummary>,
    #[serde(skip)]
    pub transcripts: Vec<(String, Vec<String>)>,
    #[serde(skip)]
    pub views: Vec<ClientView>,
}

/// `ws://host:port[/ws]` to the socket and control URLs.
pub fn endpoints(server: &str) -> (String, String) {
    let base = server.trim_end_matches('/').trim_end_matches("/ws").to_string();
    let http = if let Some(rest) = base.strip_prefix("wss://") {
        format!("https://{rest}")
    } else if let Some(rest) = base.strip_prefix("ws://") {
        format!("http://{rest}")
    } else {
        base.clone()
    };
    (format!("{base}/ws"), http)
}

struct Run {
    bots: Vec<Bot>,
    http: String,
    client: reqwest::Client,
    step: usize,
}

impl Run {
    fn fail(&self, detail: impl Into<String>) -> HarnessError {
        HarnessError::AssertionFailed {
            step: self.step,
            detail: detail.into(),
        }
    }

    /// Reads `i`'s frames up to the end of the batch its request caused.
    async fn settle(&mut self, i: usize) -> Result<(), HarnessError> {
        let seq = loop {
            let msg = self.bots[i].recv(self.step, FRAME_WAIT).await?;
            match (&msg.visibility, msg.control()) {
                (Visibility::Private(_), Some(Control::Rejected { code, reason })) => {
                    return Err(self.fail(format!("{} was refused: {code} {reason}", self.bots[i].name)))
                }
                (Visibility::Broadcast, Some(Control::RosterUpdate { .. })) => break msg.seq,
                _ => {}
            }
        };
        self.catch_up(seq).await
    }

    async fn catch_up(&mut self, seq: u64) -> Result<(), HarnessError> {
        for b in 0..self.bots.len() {
            let seated = self.bots[b].is_connected() && self.bots[b].view.room_id.is_some();
            while seated && self.bots[b].view.last_seq.is_none_or(|l| l < seq) {
                self.bots[b].recv(self.step, FRAME_WAIT).await?;
            }
        }
        Ok(())
    }

    async fn join(&mut self, i: usize, zone: Option<String>) -> Result<(), HarnessError> {
        let name = self.bots[i].name.clone();
        self.bots[i]
            .send(&WireMessage::request(Control::JoinZone { name, zone }), self.step)
            .await?;
        self.settle(i).await
    }

    /// Lets the discussion timer run out.
    async fn advance_clock(&mut self) -> Result<(), HarnessError> {
        let secs = self.bots[0]
            .frames
            .iter()
            .rev()
            .find_map(|m| match m.control() {
                Some(Control::DiscussionOpened { deadline_secs, .. }) => Some(*deadline_secs),
                _ => None,
            })
            .unwrap_or(120);
        let reply = self
            .client
            .post(format!("{}/control/advance", self.http))
            .json(&serde_json::json!({ "ms": secs * 1000 }))
            .send()
            .await
            .map_err(|e| HarnessError::Connection {
                step: self.step,
                reason: e.to_string(),
            })?;
        // On a wall clock the timer has to run out for real.
        let wait = if reply.status().is_success() {
            FRAME_WAIT
        } else {
            Duration::from_secs(secs) + FRAME_WAIT
        };
        let reader = self.bots.iter().position(Bot::is_connected).unwrap_or(0);
        let seq = loop {
            let msg = self.bots[reader].recv(self.step, wait).await?;
            if let (Visibility::Broadcast, Some(Control::RosterUpdate { .. })) = (&msg.visibility, msg.control()) {
                break msg.seq;
            }
        };
        self.catch_up(seq).await
    }

    async fn drop_bot(&mut self, i: usize) -> Result<(), HarnessError> {
        self.bots[i].disconnect().await;
        for b in 0..self.bots.len() {
            if !self.bots[b].is_connected() {
                continue;
            }
            while self.bots[b].view.aborted.is_none() {
                self.bots[b].recv(self.step, FRAME_WAIT).await?;
            }
        }
        Ok(())
    }
}

/// Plays `script` against the server at `server`. `seed` only varies
/// what chatty bots say; the game itself is seeded by the server.
pub async fn run(script: &Script, server: &str, seed: u64) -> Result<Outcome, HarnessError> {
    let (ws, http) = endpoints(server);
    let mut bots = Vec::new();
    for spec in &script.bots {
        let policy = Policy {
            kind: spec.policy,
            discussion: script.discussion,
            use_powers: script.use_powers,
            seed,
        };
        bots.push(Bot::connect(&ws, &spec.name, policy).await?);
    }
    let mut run = Run {
        bots,
        http,
        client: reqwest::Client::new(),
        step: 0,
    };
    for i in 0..run.bots.len() {
        run.join(i, script.zone.clone()).await?;
    }
    run.bots[0].send(&WireMessage::request(Control::StartGame {}), 0).await?;
    run.settle(0).await?;
    if run.bots.iter().any(|b| b.view.game_id.is_none()) {
        return Err(run.fail("game did not start"));
    }

    let mut dropped = false;
    loop {
        run.step += 1;
        if run.step > script.max_steps {
            return Err(run.fail(format!("no result after {} steps", script.max_steps)));
        }
        let live: Vec<usize> = (0..run.bots.len()).filter(|i| run.bots[*i].is_connected()).collect();
        if live.iter().all(|i| run.bots[*i].view.is_over()) {
            break;
        }
        if let Some(d) = script.disconnect.filter(|_| !dropped) {
            let v = &run.bots[d.bot].view;
            if v.turn_number == d.turn && v.phase == Some(d.phase) {
                dropped = true;
                run.drop_bot(d.bot).await?;
                continue;
            }
        }
        let mut acted = false;
        for i in live.iter().copied() {
            if let Some(msg) = run.bots[i].decide() {
                run.bots[i].send(&msg, run.step).await?;
                run.settle(i).await?;
                acted = true;
                break;
            }
        }
        if acted {
            continue;
        }
        match run.bots[live[0]].view.phase {
            Some(Phase::Discussion) => run.advance_clock().await?,
            phase => return Err(run.fail(format!("nobody can act in {phase:?}"))),
        }
    }

    let witness = run.bots.iter().position(Bot::is_connected).unwrap_or(0);
    let view = run.bots[witness].view.clone();
    let result = match (view.aborted.is_some(), view.is_over()) {
        (true, _) => Some(ResultKind::GameAborted),
        (false, true) => Some(ResultKind::GameOver),
        _ => None,
    };
    let outcome = Outcome {
        script: script.name.clone(),
        seed,
        game_id: view.game_id.clone(),
        steps: run.step,
        result,
        players: view.roster.clone(),
        final_scores: view.scores.clone(),
        turns: summarize(&run.bots[witness].frames),
        transcripts: run.bots.iter().map(|b| (b.name.clone(), b.transcript.clone())).collect(),
        views: run.bots.iter().map(|b| b.view.clone()).collect(),
    };
    check(script, &outcome).map_err(|detail| HarnessError::AssertionFailed {
        step: outcome.steps,
        detail,
    })?;
    Ok(outcome)
}

/// Checks the script's expectations against a finished run.
pub fn check(script: &Script, outcome: &Outcome) -> Result<(), String> {
    let expect = &script.expect;
    if let Some(want) = expect.result {
        if outcome.result != Some(want) {
            return Err(format!("expected {want:?}, got {:?}", outcome.result));
        }
    }
    let scored: Vec<&TurnSummary> = outcome.turns.iter().filter(|t| t.first_vote.is_some()).collect();
    if expect.first_vote.is_some() && scored.is_empty() {
        return Err("no turn was scored".into());
    }
    for t in &scored {
        let turn = t.turn;
        if let Some(want) = expect.first_vote {
            let got = match t.first_vote {
                Some(FirstVoteOutcome::Unanimous(_)) => VoteKind::Unanimous,
                _ => VoteKind::Disagreement,
            };
            if got != want {
                return Err(format!("turn {turn}: first vote {got:?}, expected {want:?}"));
            }
        }
        if expect.unanimity_schedule {
            if let Some(FirstVoteOutcome::Unanimous(_)) = t.first_vote {
                let task = t.task.as_ref().ok_or(format!("turn {turn}: task never revealed"))?;
                let want = unanimous_deltas(outcome.players.len(), t.reader, task.value);
                if t.first_deltas != want {
                    return Err(format!("turn {turn}: deltas {:?}, expected {want:?}", t.first_deltas));
                }
            }
        }
        if expect.timeout_every_round && t.timed_out != Some(true) {
            return Err(format!("turn {turn}: discussion did not time out ({:?})", t.timed_out));
        }
        if let Some(want) = &expect.turn_phases {
            let mut seen = t.phases.iter();
            if !want.iter().all(|p| seen.any(|q| q == p)) {
                return Err(format!("turn {turn}: phases {:?} miss {want:?}", t.phases));
            }
        }
    }
    if expect.scores_add_up {
        if script.bots.iter().any(|b| b.policy == PolicyKind::Reroller) {
            return Err("reroll costs are private; scores_add_up needs a script without rerollers".into());
        }
        let mut sum = vec![0; outcome.players.len()];
        for t in &outcome.turns {
            for (s, d) in sum.iter_mut().zip(t.first_deltas.iter().copied()) {
                *s += d;
            }
            for (s, d) in sum.iter_mut().zip(t.revote_deltas.iter().copied()) {
                *s += d;
            }
        }
        if sum != outcome.final_scores {
            return Err(format!("final scores {:?} but deltas add up to {sum:?}", outcome.final_scores));
        }
    }
    Ok(())
}

/// Writes `<bot>.frames`, one wire frame per line, and `summary.json`.
pub fn write_transcripts(outcome: &Outcome, dir: &std::path::Path) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    for (name, lines) in &outcome.transcripts {
        let mut text = lines.join("\n");
        text.push('\n');
        std::fs::write(dir.join(format!("{name}.frames")), text)?;
    }
    let summary = serde_json::to_string_pretty(outcome).map_err(std::io::Error::other)?;
    std::fs::write(dir.join("summary.json"), summary)
}
