use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use pareto_elicit::fixtures::{fig3, movie_full};
use pareto_elicit::sim::GroundTruth;
use pareto_elicit::Outcome;
use pareto_elicit_service::http::{Created, ErrorBody, QuestionResponse};
use pareto_elicit_service::session::{ResultView, StateView, Status, VoteReceipt};
use pareto_elicit_service::{router, SessionStore};
use serde_json::{json, Value};
use tower::ServiceExt;

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Vec<u8>) {
    let req = Request::builder().method(method).uri(uri);
    let req = match body {
        Some(v) => req
            .header("content-type", "application/json")
            .body(Body::from(v.to_string()))
            .unwrap(),
        None => req.body(Body::empty()).unwrap(),
    };
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes().to_vec();
    (status, bytes)
}

async fn call_json<T: serde::de::DeserializeOwned>(app: &Router, method: &str, uri: &str, body: Option<Value>) -> T {
    let (status, bytes) = call(app, method, uri, body).await;
    assert!(status.is_success(), "{status}: {}", String::from_utf8_lossy(&bytes));
    serde_json::from_slice(&bytes).unwrap()
}

async fn error(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, ErrorBody) {
    let (status, bytes) = call(app, method, uri, body).await;
    (status, serde_json::from_slice(&bytes).unwrap())
}

fn app() -> Router {
    router(Arc::new(SessionStore::in_memory()), None)
}

/// Answers every question from `truth` until the session ends.
async fn answer_all(app: &Router, id: &str, truth: &GroundTruth) -> usize {
    let u = truth.universe();
    let mut asked = 0;
    loop {
        let q: QuestionResponse = call_json(app, "GET", &format!("/sessions/{id}/question"), None).await;
        let Some(q) = q.question else {
            assert_eq!(q.status, Status::Terminal);
            return asked;
        };
        let x = u.find_object(&q.x).unwrap();
        let y = u.find_object(&q.y).unwrap();
        let c = u.find_criterion(&q.criterion).unwrap();
        let vote = match truth.outcome(x, y, c) {
            Outcome::XBetter => "prefer_x",
            Outcome::YBetter => "prefer_y",
            Outcome::Indifferent => "indifferent",
        };
        let r: VoteReceipt = call_json(
            app,
            "POST",
            &format!("/sessions/{id}/votes"),
            Some(json!({"question_id": q.question_id, "vote": vote, "respondent": "oracle"})),
        )
        .await;
        assert_eq!(r.finalized.unwrap().question_id, q.question_id);
        asked += 1;
    }
}

#[tokio::test]
async fn scripted_session_finds_the_pareto_set() {
    let app = app();
    // price: a best, c worst; quality: c best, b worst
    let created: Created = call_json(
        &app,
        "POST",
        "/sessions",
        Some(json!({"objects": ["a", "b", "c"], "criteria": ["price", "quality"], "seed": 4})),
    )
    .await;
    assert_eq!(created.status, Status::Active);
    let id = created.id;
    let rank = |o: &str, c: &str| match (o, c) {
        ("a", "price") => 0,
        ("b", "price") => 1,
        ("c", "price") => 2,
        ("c", _) => 0,
        ("a", _) => 1,
        _ => 2,
    };
    loop {
        let q: QuestionResponse = call_json(&app, "GET", &format!("/sessions/{id}/question"), None).await;
        let Some(q) = q.question else { break };
        let (rx, ry) = (rank(&q.x, &q.criterion), rank(&q.y, &q.criterion));
        let vote = if rx < ry { "prefer_x" } else { "prefer_y" };
        let _: VoteReceipt = call_json(
            &app,
            "POST",
            &format!("/sessions/{id}/votes"),
            Some(json!({"question_id": q.question_id, "vote": vote})),
        )
        .await;
    }
    let r: ResultView = call_json(&app, "GET", &format!("/sessions/{id}/result"), None).await;
    assert!(r.complete);
    // b is dominated by a on both criteria
    assert_eq!(r.pareto, ["a", "c"]);
    assert_eq!(r.dominated, ["b"]);
    assert_eq!(r.asked, r.outcomes.len());
}

#[tokio::test]
async fn movie_session_confirms_b() {
    let app = app();
    let created: Created =
        call_json(&app, "POST", "/sessions", Some(json!({"fixture": "movie-full", "seed": 1}))).await;
    let id = created.id;
    let fresh: StateView = call_json(&app, "GET", &format!("/sessions/{id}/state"), None).await;
    assert_eq!(fresh.partition.undetermined.len(), 6);
    assert_eq!((fresh.progress.asked, fresh.progress.total), (0, 45));
    assert_eq!(fresh.strategy, pareto_elicit::Strategy::FRQ);

    let asked = answer_all(&app, &id, &movie_full()).await;
    assert_eq!(asked, 17);
    let r: ResultView = call_json(&app, "GET", &format!("/sessions/{id}/result"), None).await;
    assert_eq!(r.pareto, ["b"]);
    let st: StateView = call_json(&app, "GET", &format!("/sessions/{id}/state"), None).await;
    assert_eq!(st.status, Status::Terminal);
    assert_eq!(st.remaining_candidates, 0);
    assert!(st.question.is_none());

    let (status, dot) = call(&app, "GET", &format!("/sessions/{id}/dominance.dot"), None).await;
    assert_eq!(status, StatusCode::OK);
    let dot = String::from_utf8(dot).unwrap();
    for edge in ["\"b\" -> \"c\"", "\"b\" -> \"d\"", "\"b\" -> \"e\"", "\"b\" -> \"f\"", "\"c\" -> \"a\""] {
        assert!(dot.contains(edge), "{edge} missing from\n{dot}");
    }
    assert!(!dot.contains("draft"));
}

#[tokio::test]
async fn cyclic_dominance_shows_in_the_graph() {
    let app = app();
    let created: Created = call_json(
        &app,
        "POST",
        "/sessions",
        Some(json!({"fixture": "fig3", "strategy": "randomq", "seed": 2})),
    )
    .await;
    let id = created.id;
    let (_, draft) = call(&app, "GET", &format!("/sessions/{id}/dominance.dot"), None).await;
    assert!(String::from_utf8(draft).unwrap().contains("draft"));
    assert_eq!(answer_all(&app, &id, &fig3()).await, 9);
    let (_, dot) = call(&app, "GET", &format!("/sessions/{id}/dominance.dot"), None).await;
    let dot = String::from_utf8(dot).unwrap();
    for edge in ["\"x\" -> \"y\"", "\"y\" -> \"z\"", "\"z\" -> \"x\""] {
        assert!(dot.contains(edge), "{dot}");
    }
    let r: ResultView = call_json(&app, "GET", &format!("/sessions/{id}/result"), None).await;
    assert!(r.pareto.is_empty() && r.complete);
}

#[tokio::test]
async fn votes_are_tallied_until_the_threshold_decides() {
    let app = app();
    let created: Created = call_json(
        &app,
        "POST",
        "/sessions",
        Some(json!({"objects": ["p", "q", "r"], "criteria": ["c"], "k_min": 5, "theta": 0.6})),
    )
    .await;
    let id = created.id;
    let qid = created.question.unwrap().question_id;
    let uri = format!("/sessions/{id}/votes");
    for (i, vote) in ["prefer_x", "skip", "prefer_x", "indifferent", "prefer_y"].iter().enumerate() {
        let r: VoteReceipt = call_json(&app, "POST", &uri, Some(json!({"question_id": qid, "vote": vote}))).await;
        assert!(r.finalized.is_none(), "vote {i}");
        // the same question stays open, with the vote counted
        assert_eq!(r.question.as_ref().unwrap().question_id, qid);
    }
    let r: VoteReceipt =
        call_json(&app, "POST", &uri, Some(json!({"question_id": qid, "vote": "prefer_x"}))).await;
    let f = r.finalized.unwrap();
    assert_eq!(f.outcome, Outcome::XBetter);
    assert_ne!(r.question.unwrap().question_id, qid);

    // the old question is gone
    let (status, e) = error(&app, "POST", &uri, Some(json!({"question_id": qid, "vote": "prefer_x"}))).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(e.error, "stale_question");
}

#[tokio::test]
async fn error_statuses() {
    let app = app();
    let (status, e) = error(&app, "GET", "/sessions/nope/state", None).await;
    assert_eq!((status, e.error.as_str()), (StatusCode::NOT_FOUND, "unknown_session"));

    for bad in [
        json!({"objects": ["a", "a"], "criteria": ["c"]}),
        json!({"objects": [], "criteria": ["c"]}),
        json!({"objects": ["a"], "criteria": []}),
        json!({"objects": ["a", "b"], "criteria": ["c"], "theta": 0.4}),
        json!({"objects": ["a", "b"], "criteria": ["c"], "strategy": "sometimes"}),
        json!({"fixture": "nba"}),
    ] {
        let (status, _) = error(&app, "POST", "/sessions", Some(bad.clone())).await;
        assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY, "{bad}");
    }
    let req = Request::builder()
        .method("POST")
        .uri("/sessions")
        .header("content-type", "application/json")
        .body(Body::from("{"))
        .unwrap();
    assert_eq!(app.clone().oneshot(req).await.unwrap().status(), StatusCode::BAD_REQUEST);

    let created: Created =
        call_json(&app, "POST", "/sessions", Some(json!({"objects": ["a", "b"], "criteria": ["c"]}))).await;
    let uri = format!("/sessions/{}/votes", created.id);
    let qid = created.question.unwrap().question_id;
    let _: VoteReceipt = call_json(&app, "POST", &uri, Some(json!({"question_id": qid, "vote": "prefer_y"}))).await;
    let (status, e) = error(&app, "POST", &uri, Some(json!({"question_id": qid, "vote": "prefer_y"}))).await;
    assert_eq!((status, e.error.as_str()), (StatusCode::CONFLICT, "session_terminal"));
    let (status, _) = error(&app, "POST", &uri, Some(json!({"question_id": qid, "vote": "maybe"}))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
}

#[tokio::test]
async fn single_object_session_is_finished_on_creation() {
    let app = app();
    let created: Created =
        call_json(&app, "POST", "/sessions", Some(json!({"objects": ["solo"], "criteria": ["c"]}))).await;
    assert_eq!(created.status, Status::Terminal);
    assert!(created.question.is_none());
    let r: ResultView = call_json(&app, "GET", &format!("/sessions/{}/result", created.id), None).await;
    assert_eq!(r.pareto, ["solo"]);
}

#[tokio::test]
async fn media_urls_reach_the_question() {
    let app = app();
    let created: Created = call_json(
        &app,
        "POST",
        "/sessions",
        Some(json!({"objects": ["a", "b"], "criteria": ["looks"], "media": {"a": "/img/a.png"}})),
    )
    .await;
    let q = created.question.unwrap();
    let a_media = if q.x == "a" { q.x_media } else { q.y_media };
    assert_eq!(a_media.as_deref(), Some("/img/a.png"));
    assert_eq!(q.choices.len(), 4);
}

#[tokio::test]
async fn static_files_are_served_beside_the_api() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("index.html"), "<h1>hi</h1>").unwrap();
    let app = router(Arc::new(SessionStore::in_memory()), Some(dir.path().to_path_buf()));
    let (status, body) = call(&app, "GET", "/index.html", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body, b"<h1>hi</h1>");
    let (status, _) = call(&app, "GET", "/sessions/none/state", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn persisted_sessions_resume_after_restart() {
    let dir = tempfile::tempdir().unwrap();
    let store = Arc::new(SessionStore::persistent(dir.path()).unwrap());
    let app = router(store, None);
    let created: Created = call_json(
        &app,
        "POST",
        "/sessions",
        Some(json!({"objects": ["a", "b", "c", "d"], "criteria": ["u", "v"], "strategy": "randomp", "seed": 9})),
    )
    .await;
    let id = created.id;
    let qid = created.question.unwrap().question_id;
    let _: VoteReceipt = call_json(
        &app,
        "POST",
        &format!("/sessions/{id}/votes"),
        Some(json!({"question_id": qid, "vote": "prefer_x"})),
    )
    .await;
    let before: StateView = call_json(&app, "GET", &format!("/sessions/{id}/state"), None).await;

    let app = router(Arc::new(SessionStore::persistent(dir.path()).unwrap()), None);
    let after: StateView = call_json(&app, "GET", &format!("/sessions/{id}/state"), None).await;
    assert_eq!(after, before);

    // one flipped byte inside the session body is detected
    let path = dir.path().join(format!("{id}.json"));
    let mut bytes = std::fs::read(&path).unwrap();
    let at = bytes.windows(6).position(|w| w == b"\"next_").unwrap() + 1;
    bytes[at] ^= 0x20;
    std::fs::write(&path, bytes).unwrap();
    let err = SessionStore::persistent(dir.path()).unwrap_err();
    assert!(err.to_string().contains("corrupt snapshot"), "{err}");
}

#[tokio::test]
async fn wire_format_field_names() {
    let app = app();
    let (_, body) = call(
        &app,
        "POST",
        "/sessions",
        Some(json!({"objects": ["a", "b"], "criteria": ["c"], "seed": 0})),
    )
    .await;
    let v: Value = serde_json::from_slice(&body).unwrap();
    assert_eq!(v["status"], "active");
    let q = &v["question"];
    for key in ["question_id", "x", "y", "criterion", "choices", "tally"] {
        assert!(!q[key].is_null(), "{key} missing in {q}");
    }
    assert_eq!(q["choices"], json!(["prefer_x", "indifferent", "prefer_y", "skip"]));
    assert_eq!(q["tally"], json!({"prefer_x": 0, "prefer_y": 0, "indifferent": 0, "skipped": 0}));
    let id = v["id"].as_str().unwrap();
    let (_, body) = call(&app, "GET", &format!("/sessions/{id}/state"), None).await;
    let st: Value = serde_json::from_slice(&body).unwrap();
    assert_eq!(st["partition"], json!({"confirmed": [], "undetermined": ["a", "b"], "dominated": []}));
    assert_eq!(st["progress"], json!({"asked": 0, "total": 1}));
    assert_eq!(st["strategy"], "frq");
}
