use std::path::Path;
use std::sync::{Arc, OnceLock};

use lexdrill::server::{router, AppState};
use lexdrill::store::{Store, LOG_FILE};
use lexdrill_core::analysis::{annotate_corpus, parse_corpus};
use lexdrill_core::exercise::{generate_bank, BankConfig, ExerciseBank, Quotas, Solution};
use lexdrill_core::patterns::extract_patterns;
use lexdrill_core::progress::{replay, ProgressRules};
use lexdrill_core::text::{GraphemeClusterInventory, Language, Lexicon};
use reqwest::StatusCode;
use serde_json::{json, Value};
use tokio::sync::RwLock;

fn data(name: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name);
    std::fs::read_to_string(path).unwrap()
}

/// Six exercises per level: one of each type.
fn bank() -> &'static ExerciseBank {
    static BANK: OnceLock<ExerciseBank> = OnceLock::new();
    BANK.get_or_init(|| {
        let lexicon = Lexicon::parse_tsv(Language::Es, &data("es_freq.tsv")).unwrap();
        let (ok, _) = annotate_corpus(&parse_corpus(&data("corpus_es.tsv")).unwrap(), Language::Es);
        let patterns = extract_patterns(&ok, &GraphemeClusterInventory::builtin(Language::Es));
        generate_bank(&lexicon, &patterns, &BankConfig::new(Quotas::per_level(6), 9)).unwrap()
    })
}

struct Api {
    base: String,
    http: reqwest::Client,
    _dir: tempfile::TempDir,
}

impl Api {
    async fn start() -> Self {
        let dir = tempfile::tempdir().unwrap();
        let store = Store::open(dir.path(), None).unwrap();
        let state = Arc::new(AppState {
            bank: bank().clone(),
            store: RwLock::new(store),
        });
        let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
        let base = format!("http://{}", listener.local_addr().unwrap());
        tokio::spawn(async move { axum::serve(listener, router(state, None)).await.unwrap() });
        Api {
            base,
            http: reqwest::Client::new(),
            _dir: dir,
        }
    }

    async fn get(&self, path: &str) -> (StatusCode, Value) {
        let r = self.http.get(format!("{}{path}", self.base)).send().await.unwrap();
        (r.status(), r.json().await.unwrap())
    }

    async fn post(&self, path: &str, body: Value) -> (StatusCode, Value) {
        self.post_raw(path, body.to_string()).await
    }

    async fn post_raw(&self, path: &str, body: String) -> (StatusCode, Value) {
        let r = self
            .http
            .post(format!("{}{path}", self.base))
            .header("content-type", "application/json")
            .body(body)
            .send()
            .await
            .unwrap();
        (r.status(), r.json().await.unwrap())
    }

    async fn player_and_session(&self) -> (String, String) {
        let (s, p) = self
            .post("/api/players", json!({"display_name": "Ana", "age_group": "senior"}))
            .await;
        assert_eq!(s, StatusCode::CREATED);
        let pid = p["id"].as_str().unwrap().to_string();
        let (s, sess) = self.post("/api/sessions", json!({"player_id": pid})).await;
        assert_eq!(s, StatusCode::CREATED);
        (pid, sess["id"].as_str().unwrap().to_string())
    }
}

#[tokio::test]
async fn healthz_reports_the_bank() {
    let api = Api::start().await;
    let (s, h) = api.get("/api/healthz").await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(h["status"], "ok");
    assert_eq!(h["language"], "es");
    assert_eq!(h["exercises"], 30);
    assert_eq!(h["events"], 0);
}

#[tokio::test]
async fn players_and_sessions() {
    let api = Api::start().await;
    let (pid, sid) = api.player_and_session().await;
    assert_eq!((pid.as_str(), sid.as_str()), ("p1", "s1"));

    let (s, p) = api.get("/api/players/p1/progress").await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(p["current_level"], "initial");
    assert_eq!(p["answered"], 0);

    let (s, e) = api
        .post("/api/players", json!({"id": "p1", "display_name": "Otra", "age_group": "junior"}))
        .await;
    assert_eq!((s, e["error"].as_str()), (StatusCode::CONFLICT, Some("duplicate_player")));

    let (s, e) = api
        .post("/api/players", json!({"display_name": "Sam", "language": "en", "age_group": "junior"}))
        .await;
    assert_eq!((s, e["error"].as_str()), (StatusCode::BAD_REQUEST, Some("invalid_request")));

    let (s, e) = api.post("/api/sessions", json!({"player_id": "nobody"})).await;
    assert_eq!((s, e["error"].as_str()), (StatusCode::NOT_FOUND, Some("unknown_player")));

    let (s, e) = api.get("/api/players/nobody/progress").await;
    assert_eq!((s, e["error"].as_str()), (StatusCode::NOT_FOUND, Some("unknown_player")));
}

#[tokio::test]
async fn malformed_requests_are_400() {
    let api = Api::start().await;
    for body in ["{", "[]", r#"{"display_name": "x"}"#, r#"{"display_name": "x", "age_group": "adult"}"#] {
        let (s, e) = api.post_raw("/api/players", body.to_string()).await;
        assert_eq!(s, StatusCode::BAD_REQUEST, "{body}");
        assert_eq!(e["error"], "invalid_request");
    }
    let (_, sid) = api.player_and_session().await;
    api.get(&format!("/api/sessions/{sid}/next")).await;
    let (s, e) = api
        .post(&format!("/api/sessions/{sid}/answers"), json!({"exercise_id": "x"}))
        .await;
    assert_eq!((s, e["error"].as_str()), (StatusCode::BAD_REQUEST, Some("invalid_request")));
}

#[tokio::test]
async fn unknown_routes_and_ids_are_404() {
    let api = Api::start().await;
    let (s, e) = api.get("/api/nothing/here").await;
    assert_eq!((s, e["error"].as_str()), (StatusCode::NOT_FOUND, Some("not_found")));
    let (s, e) = api.get("/api/sessions/s9/next").await;
    assert_eq!((s, e["error"].as_str()), (StatusCode::NOT_FOUND, Some("unknown_session")));

    let (_, sid) = api.player_and_session().await;
    let (s, e) = api
        .post(
            &format!("/api/sessions/{sid}/answers"),
            json!({"exercise_id": "never-issued", "response": {"choice": "a"}}),
        )
        .await;
    assert_eq!((s, e["error"].as_str()), (StatusCode::NOT_FOUND, Some("unknown_exercise")));
}

#[tokio::test]
async fn answers_are_judged_once() {
    let api = Api::start().await;
    let (pid, sid) = api.player_and_session().await;
    let (s, prompt) = api.get(&format!("/api/sessions/{sid}/next")).await;
    assert_eq!(s, StatusCode::OK);
    assert!(prompt.get("solution").is_none() && prompt.get("target").is_none());
    let exercise = bank().get(prompt["id"].as_str().unwrap()).unwrap();

    let path = format!("/api/sessions/{sid}/answers");
    let answer = json!({"exercise_id": exercise.id, "response": exercise.solution});
    let (s, v) = api.post(&path, answer.clone()).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["correct"], true);
    assert_eq!(v["target"], exercise.target.as_str());
    assert_eq!(v["progress"]["player_id"], pid.as_str());
    assert_eq!(v["progress"]["correct"], 1);
    assert_eq!(v["delta"]["window_correct"], 1);

    let (s, e) = api.post(&path, answer).await;
    assert_eq!((s, e["error"].as_str()), (StatusCode::CONFLICT, Some("duplicate_answer")));

    // A wrong edit is judged, not rejected.
    let (_, prompt) = api.get(&format!("/api/sessions/{sid}/next")).await;
    let wrong = json!({"exercise_id": prompt["id"], "response": Solution::Split { at: vec![] }});
    let (s, v) = api.post(&path, wrong).await;
    assert_eq!((s, v["correct"].as_bool()), (StatusCode::OK, Some(false)));
    assert_eq!(v["progress"]["answered"], 2);
}

#[tokio::test]
async fn exhausted_bank_and_superseded_sessions_are_409() {
    let api = Api::start().await;
    let (pid, sid) = api.player_and_session().await;
    let next = format!("/api/sessions/{sid}/next");
    for _ in 0..6 {
        assert_eq!(api.get(&next).await.0, StatusCode::OK);
    }
    let (s, e) = api.get(&next).await;
    assert_eq!((s, e["error"].as_str()), (StatusCode::CONFLICT, Some("bank_exhausted")));

    let (s, _) = api.post("/api/sessions", json!({"player_id": pid})).await;
    assert_eq!(s, StatusCode::CREATED);
    let (s, e) = api.get(&next).await;
    assert_eq!((s, e["error"].as_str()), (StatusCode::CONFLICT, Some("session_inactive")));
}

#[tokio::test]
async fn concurrent_answers_keep_the_log_consistent() {
    let api = Api::start().await;
    let mut sessions = Vec::new();
    for _ in 0..4 {
        sessions.push(api.player_and_session().await.1);
    }
    let mut tasks = Vec::new();
    for sid in sessions {
        let (base, http) = (api.base.clone(), api.http.clone());
        tasks.push(tokio::spawn(async move {
            for _ in 0..6 {
                let prompt: Value = http
                    .get(format!("{base}/api/sessions/{sid}/next"))
                    .send()
                    .await
                    .unwrap()
                    .json()
                    .await
                    .unwrap();
                let exercise = bank().get(prompt["id"].as_str().unwrap()).unwrap();
                let r = http
                    .post(format!("{base}/api/sessions/{sid}/answers"))
                    .json(&json!({"exercise_id": exercise.id, "response": exercise.solution}))
                    .send()
                    .await
                    .unwrap();
                assert_eq!(r.status(), StatusCode::OK);
            }
        }));
    }
    for t in tasks {
        t.await.unwrap();
    }
    let (_, h) = api.get("/api/healthz").await;
    // 4 players + 4 sessions + 24 issues + 24 answers
    assert_eq!(h["events"], 56);

    let log = std::fs::File::open(api._dir.path().join(LOG_FILE)).unwrap();
    let replayed = replay(std::io::BufReader::new(log), ProgressRules::default()).unwrap();
    for pid in ["p1", "p2", "p3", "p4"] {
        let (_, live) = api.get(&format!("/api/players/{pid}/progress")).await;
        assert_eq!(serde_json::to_value(replayed.progress(pid).unwrap()).unwrap(), live);
        assert_eq!(live["correct"], 6);
    }
}

#[tokio::test]
async fn store_reopens_from_log_and_snapshot() {
    let dir = tempfile::tempdir().unwrap();
    let bank = bank();
    let now = chrono::Utc::now();
    let before = {
        let mut store = Store::open(dir.path(), None).unwrap();
        let ev = store
            .tracker()
            .create_player(None, "Eva", Language::Es, lexdrill_core::progress::AgeGroup::Junior, now)
            .unwrap();
        store.commit(&ev).unwrap();
        let ev = store.tracker().start_session("p1", None, now).unwrap();
        store.commit(&ev).unwrap();
        store.snapshot().unwrap();
        let (ev, _) = store.tracker().next_exercise("s1", bank, now).unwrap();
        store.commit(&ev).unwrap();
        store.tracker().clone()
    };
    let reopened = Store::open(dir.path(), None).unwrap();
    assert_eq!(reopened.tracker(), &before);
    assert_eq!(reopened.tracker().events, 3);

    let other = ProgressRules {
        window: 10,
        ..ProgressRules::default()
    };
    assert!(Store::open(dir.path(), Some(other)).is_err());
}
