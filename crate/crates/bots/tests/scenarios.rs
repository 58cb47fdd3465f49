use std::path::Path;

use miboard_bots::script::{ResultKind, Script};
use miboard_bots::{run, write_transcripts, Outcome};
use miboard_core::game::AbortReason;
use miboard_server::{Server, ServerConfig};

async fn play(name: &str, seed: u64) -> Outcome {
    let logs = tempfile::tempdir().unwrap();
    let config = ServerConfig {
        port: 0,
        corpus: Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus"),
        log_dir: logs.path().to_path_buf(),
        seed: Some(seed),
        virtual_clock: true,
        ..ServerConfig::default()
    };
    let server = Server::start(config).await.unwrap();
    let script = Script::load(&Path::new(env!("CARGO_MANIFEST_DIR")).join(format!("scripts/{name}.toml"))).unwrap();
    let outcome = run(&script, &server.ws_url(), seed).await;
    server.shutdown().await;
    outcome.unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[tokio::test]
async fn shipped_scripts_meet_their_expectations() {
    for name in ["agree", "disagree", "talk", "disconnect"] {
        for seed in [1, 2] {
            play(name, seed).await;
        }
    }
}

#[tokio::test]
async fn same_seed_same_transcripts() {
    let a = play("talk", 9).await;
    let b = play("talk", 9).await;
    assert_eq!(a.transcripts, b.transcripts);
    let c = play("talk", 10).await;
    assert_ne!(a.transcripts, c.transcripts);
}

#[tokio::test]
async fn dropped_bot_is_named_in_the_abort() {
    let o = play("disconnect", 3).await;
    assert_eq!(o.result, Some(ResultKind::GameAborted));
    let gone = o.views[2].player_id.clone().unwrap();
    for v in &o.views[..2] {
        assert_eq!(v.aborted, Some(AbortReason::PlayerLeft { player: gone.clone() }));
    }
}

#[tokio::test]
async fn transcripts_are_written_one_frame_per_line() {
    let o = play("agree", 4).await;
    let dir = tempfile::tempdir().unwrap();
    write_transcripts(&o, dir.path()).unwrap();
    for (name, frames) in &o.transcripts {
        let text = std::fs::read_to_string(dir.path().join(format!("{name}.frames"))).unwrap();
        assert_eq!(text.lines().count(), frames.len());
        for line in text.lines() {
            miboard_core::protocol::decode(line.as_bytes()).unwrap();
        }
    }
    let summary: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["result"], "GameOver");
}
