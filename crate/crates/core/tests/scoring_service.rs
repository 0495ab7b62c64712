mod common;

use std::net::SocketAddr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Duration;

use axum::extract::State;
use axum::http::StatusCode;
use axum::routing::post;
use axum::{Json, Router};
use lexbridge_core::embedding::embed_corpus;
use lexbridge_core::rerank::{
    logistic, read_correspondences, run_linking, PairScorer, RemoteScorer, RerankConfig, RerankError, ScorerKind,
};
use lexbridge_core::retrieval::RetrievalConfig;
use serde_json::{json, Value};

use common::synthetic_corpus;

#[derive(Clone, Copy)]
enum Mode {
    /// Scores in [0, 1]: candidate length over 100, capped.
    InRange,
    /// Raw logits, some outside [0, 1].
    Logits,
    ServerError,
    WrongLength,
}

#[derive(Default)]
struct Observed {
    in_flight: AtomicUsize,
    max_in_flight: AtomicUsize,
    calls: AtomicUsize,
    bodies: Mutex<Vec<Value>>,
}

struct Stub {
    url: String,
    observed: Arc<Observed>,
}

fn in_range(candidate: &str) -> f64 {
    (candidate.chars().count() as f64 / 100.0).min(1.0)
}

fn logit(candidate: &str) -> f64 {
    candidate.chars().count() as f64 / 10.0 - 3.0
}

async fn handle(
    State((mode, obs)): State<(Mode, Arc<Observed>)>,
    Json(body): Json<Value>,
) -> (StatusCode, Json<Value>) {
    let now = obs.in_flight.fetch_add(1, Ordering::SeqCst) + 1;
    obs.max_in_flight.fetch_max(now, Ordering::SeqCst);
    obs.calls.fetch_add(1, Ordering::SeqCst);
    tokio::time::sleep(Duration::from_millis(25)).await;
    let pairs: Vec<(String, String)> = body["pairs"]
        .as_array()
        .map(|a| {
            a.iter()
                .map(|p| {
                    (
                        p["query_text"].as_str().unwrap_or_default().to_string(),
                        p["candidate_text"].as_str().unwrap_or_default().to_string(),
                    )
                })
                .collect()
        })
        .unwrap_or_default();
    obs.bodies.lock().unwrap().push(body);
    obs.in_flight.fetch_sub(1, Ordering::SeqCst);
    match mode {
        Mode::InRange => (
            StatusCode::OK,
            Json(json!({ "scores": pairs.iter().map(|p| in_range(&p.1)).collect::<Vec<_>>() })),
        ),
        Mode::Logits => (
            StatusCode::OK,
            Json(json!({ "scores": pairs.iter().map(|p| logit(&p.1)).collect::<Vec<_>>() })),
        ),
        Mode::ServerError => (
            StatusCode::INTERNAL_SERVER_ERROR,
            Json(json!({ "error": "model not loaded" })),
        ),
        Mode::WrongLength => (StatusCode::OK, Json(json!({ "scores": [0.5] }))),
    }
}

fn spawn_stub(mode: Mode) -> Stub {
    let observed = Arc::new(Observed::default());
    let state = (mode, observed.clone());
    let (tx, rx) = std::sync::mpsc::channel::<SocketAddr>();
    std::thread::spawn(move || {
        let rt = tokio::runtime::Builder::new_multi_thread()
            .worker_threads(4)
            .enable_all()
            .build()
            .unwrap();
        rt.block_on(async move {
            let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
            tx.send(listener.local_addr().unwrap()).unwrap();
            let app = Router::new().route("/score", post(handle)).with_state(state);
            axum::serve(listener, app).await.unwrap();
        });
    });
    let addr = rx.recv().unwrap();
    Stub {
        url: format!("http://{addr}/score"),
        observed,
    }
}

#[test]
fn request_and_response_follow_the_wire_protocol() {
    let stub = spawn_stub(Mode::InRange);
    let scorer = RemoteScorer::new(&stub.url).unwrap();
    let pairs = [
        ("query one", "short"),
        ("query one", "a considerably longer candidate text"),
    ];
    let scores = scorer.score(&pairs).unwrap();
    assert_eq!(scores, [in_range(pairs[0].1), in_range(pairs[1].1)]);
    let bodies = stub.observed.bodies.lock().unwrap();
    assert_eq!(
        bodies[0],
        json!({ "pairs": [
            { "query_text": "query one", "candidate_text": "short" },
            { "query_text": "query one", "candidate_text": "a considerably longer candidate text" },
        ]})
    );
    assert!(scorer.tag().starts_with("remote:"));
}

#[test]
fn out_of_range_batches_are_squashed() {
    let stub = spawn_stub(Mode::Logits);
    let scorer = RemoteScorer::new(&stub.url).unwrap();
    let pairs = [
        ("q", "ab"),
        ("q", "a much longer candidate text here"),
        ("q", "middle text"),
    ];
    let scores = scorer.score(&pairs).unwrap();
    for (s, (_, c)) in scores.iter().zip(pairs) {
        assert!((s - logistic(logit(c))).abs() < 1e-12);
        assert!((0.0..=1.0).contains(s));
    }
    assert!(scores[1] > scores[2] && scores[2] > scores[0]);
}

#[test]
fn bad_responses_are_reported() {
    for mode in [Mode::ServerError, Mode::WrongLength] {
        let stub = spawn_stub(mode);
        let scorer = RemoteScorer::new(&stub.url).unwrap();
        let err = scorer.score(&[("q", "a"), ("q", "b")]).unwrap_err();
        assert!(matches!(err, RerankError::ServiceBadResponse(_)), "{err}");
    }
}

fn linking_setup() -> (
    lexbridge_core::corpus::Corpus,
    lexbridge_core::embedding::EmbeddingStore,
) {
    let corpus = synthetic_corpus(11, &[("JP", 12), ("KR", 40), ("FR", 40)], 0.3);
    let store = embed_corpus(&corpus, 64).unwrap();
    (corpus, store)
}

#[test]
fn linking_respects_the_in_flight_bound() {
    let (corpus, store) = linking_setup();
    for bound in [1, 2, 4] {
        let stub = spawn_stub(Mode::InRange);
        let scorer = RemoteScorer::new(&stub.url).unwrap();
        let rerank = RerankConfig {
            scorer: ScorerKind::RemoteService,
            service_endpoint: Some(stub.url.clone()),
            max_in_flight: bound,
            ..Default::default()
        };
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("links.jsonl");
        let linked = run_linking(&corpus, &store, &RetrievalConfig::default(), &rerank, &scorer, &out).unwrap();
        assert_eq!(stub.observed.calls.load(Ordering::SeqCst), 12);
        let max = stub.observed.max_in_flight.load(Ordering::SeqCst);
        assert!((1..=bound).contains(&max), "bound {bound}, observed {max}");
        for rec in &linked.records {
            for l in &rec.links {
                assert_eq!(l.rerank_score, in_range(&corpus.get(&l.provision_id).unwrap().text));
            }
        }
        let (header, records) = read_correspondences(&out).unwrap();
        assert_eq!(header.count, 12);
        assert_eq!(records.len(), 12);
    }
}

#[test]
fn unreachable_service_leaves_no_output() {
    let (corpus, store) = linking_setup();
    let port = std::net::TcpListener::bind("127.0.0.1:0")
        .unwrap()
        .local_addr()
        .unwrap()
        .port();
    let url = format!("http://127.0.0.1:{port}/score");
    let scorer = RemoteScorer::new(&url).unwrap();
    let rerank = RerankConfig {
        scorer: ScorerKind::RemoteService,
        service_endpoint: Some(url),
        ..Default::default()
    };
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("links.jsonl");
    let err = run_linking(&corpus, &store, &RetrievalConfig::default(), &rerank, &scorer, &out).unwrap_err();
    assert!(matches!(err, RerankError::ServiceUnreachable { .. }), "{err}");
    assert!(!out.exists());
}
