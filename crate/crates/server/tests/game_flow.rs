mod support;

use std::time::Duration;

use miboard_core::game::AbortReason;
use miboard_core::protocol::{Control, Visibility, WireMessage};
use miboard_core::{Phase, Strategy};
use support::*;

#[tokio::test]
async fn only_the_reader_may_write_the_self_explanation() {
    let h = Harness::start(1).await;
    let mut c = h.game(3).await;
    let game = c[0].view.game_id.clone().unwrap();
    let before = h.log(&game).len();
    let r = reader(&c);
    let other = (r + 1) % 3;
    c[other].send(Control::SubmitSe { text: "mine".into() }).await;
    assert_eq!(settle(&mut c, other).await, Err("NotYourTurn".to_string()));
    assert_eq!(h.log(&game).len(), before, "refused requests from non-readers are not logged");
    assert_eq!(c[0].view.phase, Some(Phase::ReaderCompose));
}

#[tokio::test]
async fn arguments_stay_sealed_until_everyone_submitted() {
    let h = Harness::start(2).await;
    let mut c = h.game(3).await;
    let r = reader(&c);
    c[r].send(Control::SubmitSe { text: "It says it again.".into() }).await;
    settle(&mut c, r).await.unwrap();
    for i in 0..3 {
        assert!(c.iter().all(|x| !x.saw("ArgumentsRevealed")));
        let arg = c[i].argument(Strategy::Paraphrasing);
        c[i].send(Control::SubmitArgument { argument: arg }).await;
        settle(&mut c, i).await.unwrap();
    }
    for x in &c {
        assert_eq!(x.view.arguments.len(), 3);
        assert!(x.view.arguments.iter().all(|a| a.strategy == Strategy::Paraphrasing));
    }
}

#[tokio::test]
async fn private_frames_reach_only_their_owner() {
    let h = Harness::start(3).await;
    let c = h.game(3).await;
    let r = reader(&c);
    for (i, x) in c.iter().enumerate() {
        let me = x.view.player_id.clone().unwrap();
        for m in &x.frames {
            if let Visibility::Private(to) = &m.visibility {
                assert_eq!(to, &me);
            }
        }
        assert_eq!(x.saw("TaskAssigned"), i == r, "only the reader sees the task");
        assert_eq!(x.view.task.is_some(), i == r);
    }
}

#[tokio::test]
async fn game_commands_need_their_game() {
    let h = Harness::start(4).await;
    let mut lone = h.client().await;
    lone.send(Control::RollDice {}).await;
    assert_eq!(lone.recv_code("Rejected").await.control(), Some(&Control::rejected("NoSuchGame", "no game is running for this session")));

    let mut c = h.game(3).await;
    let r = reader(&c);
    let mut m = WireMessage::request(Control::SubmitSe { text: "x".into() });
    m.game_id = Some("g999".into());
    c[r].send_msg(m).await;
    assert_eq!(settle(&mut c, r).await, Err("NoSuchGame".to_string()));

    c[1].send(Control::GameOver {
        winner: miboard_core::Seat(1),
        scores: vec![],
    })
    .await;
    assert_eq!(settle(&mut c, 1).await, Err("UnexpectedCode".to_string()));
}

#[tokio::test]
async fn malformed_frames_are_refused_and_the_connection_lives_on() {
    let h = Harness::start(5).await;
    let mut c = h.client().await;
    for bad in ["garbage", "5:{}", "12:{\"code\":1}x", ""] {
        c.send_raw(bad).await;
        match c.recv().await.control() {
            Some(Control::Rejected { code, .. }) => assert_eq!(code, "MalformedMessage", "{bad:?}"),
            other => panic!("{bad:?}: {other:?}"),
        }
    }
    c.send(Control::JoinZone {
        name: "after".into(),
        zone: None,
    })
    .await;
    assert!(matches!(c.recv().await.control(), Some(Control::RoomJoined { .. })));
}

#[tokio::test]
async fn unknown_zone_is_refused() {
    let h = Harness::start(6).await;
    let mut c = h.client().await;
    c.send(Control::JoinZone {
        name: "x".into(),
        zone: Some("nowhere".into()),
    })
    .await;
    match c.recv().await.control() {
        Some(Control::Rejected { code, .. }) => assert_eq!(code, "NoSuchZone"),
        other => panic!("{other:?}"),
    }
}

#[tokio::test]
async fn discussion_closes_exactly_at_its_deadline() {
    let h = Harness::start(7).await;
    let mut c = h.game(3).await;
    to_discussion(&mut c).await;
    h.advance(119_999);
    for x in c.iter_mut() {
        assert!(x.silent_for(Duration::from_millis(200)).await, "no timeout before 120 s");
    }
    h.advance(1);
    let opened = c[0].recv_code("RevoteOpened").await;
    assert_eq!(opened.control(), Some(&Control::RevoteOpened { timed_out: true }));
    let game = c[0].view.game_id.clone().unwrap();
    let log = h.log(&game);
    let timeout = log.iter().find(|r| r.code == "DiscussionTimeout").expect("timeout logged");
    assert_eq!(timeout.actor, None);
    assert_eq!(timeout.wall_time, 120_000);
}

#[tokio::test]
async fn passing_ends_the_discussion_and_disarms_the_timer() {
    let h = Harness::start(8).await;
    let mut c = h.game(3).await;
    to_discussion(&mut c).await;
    for i in 0..3 {
        c[i].send(Control::DiscussionPass {}).await;
        settle(&mut c, i).await.unwrap();
    }
    assert_eq!(c[0].view.phase, Some(Phase::Revote));
    assert!(!c[0].view.discussion_timed_out);
    h.advance(500_000);
    for x in c.iter_mut() {
        assert!(x.silent_for(Duration::from_millis(200)).await, "a disarmed timer stays quiet");
    }
    let game = c[0].view.game_id.clone().unwrap();
    assert!(h.log(&game).iter().all(|r| r.code != "DiscussionTimeout"));
}

#[tokio::test]
async fn discussion_chat_is_counted_and_capped() {
    let h = Harness::start(9).await;
    let mut c = h.game(3).await;
    to_discussion(&mut c).await;
    let max = c[0].view.max_contributions;
    for k in 1..=max {
        let mut m = WireMessage::chat(format!("point {k}"));
        m.game_id = c[1].view.game_id.clone();
        c[1].send_msg(m).await;
        settle(&mut c, 1).await.unwrap();
        assert_eq!(c[2].view.contributions[1], k);
    }
    let mut m = WireMessage::chat("one more");
    m.game_id = c[1].view.game_id.clone();
    c[1].send_msg(m).await;
    assert!(settle(&mut c, 1).await.is_err());
}

#[tokio::test]
async fn every_broadcast_is_logged_before_it_arrives() {
    let h = Harness::start(10).await;
    let mut c = h.game(3).await;
    let game = c[0].view.game_id.clone().unwrap();
    let r = reader(&c);
    c[r].send(Control::SubmitSe { text: "Because of the pipes.".into() }).await;
    // Check the log the moment the broadcast lands, before reading on.
    loop {
        let m = c[(r + 1) % 3].recv().await;
        if m.code() == "SEBroadcast" {
            break;
        }
    }
    let log = h.log(&game);
    let rec = log.iter().find(|r| r.code == "SubmitSelfExplanation").expect("logged first");
    assert_eq!(rec.payload["text"], "Because of the pipes.");
}

#[tokio::test]
async fn leaving_mid_game_aborts_it_for_everyone() {
    let h = Harness::start(11).await;
    let mut c = h.game(3).await;
    let game = c[0].view.game_id.clone().unwrap();
    let leaver = c[2].view.player_id.clone().unwrap();
    drop(c.pop());
    for x in c.iter_mut() {
        let m = x.recv_code("GameAborted").await;
        assert_eq!(
            x.view.aborted,
            Some(AbortReason::PlayerLeft { player: leaver.clone() }),
            "{m:?}"
        );
    }
    let log = h.log(&game);
    assert_eq!(log.last().unwrap().code, "Abort");
    for _ in 0..50 {
        if h.server.lobby.running_games() == 0 {
            break;
        }
        tokio::time::sleep(Duration::from_millis(20)).await;
    }
    assert_eq!(h.server.lobby.running_games(), 0);
    h.server.lobby.check_invariants().unwrap();
}

#[tokio::test]
async fn rooms_run_independently() {
    let h = Harness::start(12).await;
    let a = h.game(3).await;
    let b = h.game(3).await;
    let (ga, gb) = (a[0].view.game_id.clone().unwrap(), b[0].view.game_id.clone().unwrap());
    assert_ne!(ga, gb);
    assert_ne!(a[0].view.room_id, b[0].view.room_id);
    assert_eq!(h.server.lobby.running_games(), 2);
    let names_b: Vec<_> = b.iter().map(|x| x.view.player_id.clone().unwrap()).collect();
    for x in &a {
        for m in &x.frames {
            assert!(m.sender.as_ref().is_none_or(|s| !names_b.contains(s)));
            assert!(m.game_id.as_ref().is_none_or(|g| *g == ga));
        }
    }
    h.server.lobby.check_invariants().unwrap();
}

#[tokio::test]
async fn shutdown_aborts_and_logs_running_games() {
    let h = Harness::start(13).await;
    let mut c = h.game(3).await;
    let game = c[0].view.game_id.clone().unwrap();
    let logs = h.logs;
    h.server.shutdown().await;
    let m = c[0].recv_code("GameAborted").await;
    assert!(matches!(m.control(), Some(Control::GameAborted { reason: AbortReason::ServerShutdown, .. })));
    let (_, records) = miboard_core::persistence::log::read_log(&logs.path().join(format!("{game}.log"))).unwrap();
    assert_eq!(records.last().unwrap().code, "Abort");
}
