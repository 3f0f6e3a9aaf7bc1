mod common;

use std::sync::mpsc::{channel, Receiver, Sender};
use std::sync::{Arc, Mutex};
use std::time::Duration;

use axum::http::{Method, StatusCode};
use common::{Api, FEET_FEEDBACK, WING_PROMPT};
use decomate_core::llm::{ChatRequest, ChatResponse, Transport, TransportError, Usage};
use decomate_service::SessionService;
use serde_json::json;

#[tokio::test]
async fn create_and_fetch() {
    let api = Api::replay();
    let a = api.create("bird", "bird").await;
    let b = api.create("bird", "bird").await;
    assert_ne!(a, b);
    let (status, view) = api.get(&format!("/sessions/{a}")).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(view["state"], "NEW");
    assert_eq!(view["object_name"], "bird");
    assert!(view["normalized_svg"].as_str().unwrap().contains("id=\"el-10\""));
    assert!(view["grouped_svg"].is_null());
}

#[tokio::test]
async fn rejects_bad_input() {
    let api = Api::replay();
    let (status, body) = api.post("/sessions", json!({"svg": "<svg><path", "object_name": "x"})).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["code"], "SvgParseError", "{body}");

    let (status, _) = api.post("/sessions", json!({"object_name": "x"})).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);

    let (status, body) = api.get("/sessions/nope").await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(body["code"], "UnknownSession");

    let (status, _) = api.get("/elsewhere").await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn state_machine_guards() {
    let api = Api::replay();
    let id = api.create("bird", "bird").await;

    let (status, body) = api.post(&format!("/sessions/{id}/refine"), json!({"feedback": FEET_FEEDBACK})).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(body["code"], "NotDecomposed");
    let (status, _) = api.post(&format!("/sessions/{id}/animate"), json!({"global_prompt": WING_PROMPT})).await;
    assert_eq!(status, StatusCode::CONFLICT);
    let (status, _) = api.get(&format!("/sessions/{id}/preview")).await;
    assert_eq!(status, StatusCode::CONFLICT);
    let (status, body) = api.get(&format!("/sessions/{id}/bundle")).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(body["code"], "NotAnimated");

    let (status, body) = api.call(Method::POST, &format!("/sessions/{id}/decompose"), None).await;
    assert_eq!(status, StatusCode::OK, "{body}");
    assert_eq!(body["state"], "DECOMPOSED");

    let (status, preview) = api.get(&format!("/sessions/{id}/preview")).await;
    assert_eq!(status, StatusCode::OK);
    assert!(preview.as_str().unwrap().contains("<svg"));
    let (status, _) = api.get(&format!("/sessions/{id}/bundle")).await;
    assert_eq!(status, StatusCode::CONFLICT);

    let (status, body) = api.post(&format!("/sessions/{id}/refine"), json!({"feedback": "  "})).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["code"], "EmptyFeedback");
    let (status, body) = api.post(&format!("/sessions/{id}/animate"), json!({})).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["code"], "EmptyPrompt");
}

#[tokio::test]
async fn dsl_animation_and_errors() {
    let api = Api::replay();
    let id = api.create("bird", "bird").await;
    api.call(Method::POST, &format!("/sessions/{id}/decompose"), None).await;

    let (status, body) = api
        .post(&format!("/sessions/{id}/animate"), json!({"dsl": "anim wing rotate"}))
        .await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["code"], "DslParseError");
    assert_eq!(body["details"]["line"], 1);
    assert_eq!(body["details"]["column"], 11);

    let (status, body) = api
        .post(&format!("/sessions/{id}/animate"), json!({"dsl": "anim ghost: rotate from 0deg to 9deg dur 100"}))
        .await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["code"], "ValidationFailed");

    let dsl = "anim wing: rotate from -10deg to 10deg dur 600 ease ease-in-out repeat infinite alternate";
    let (status, body) = api.post(&format!("/sessions/{id}/animate"), json!({"dsl": dsl})).await;
    assert_eq!(status, StatusCode::OK, "{body}");
    assert_eq!(body["state"], "ANIMATED");
    assert_eq!(body["bundle"]["manifest"]["groups"], json!(["wing"]));

    let (status, body) = api.get(&format!("/sessions/{id}/bundle")).await;
    assert_eq!(status, StatusCode::OK);
    let dir = std::path::PathBuf::from(body["directory"].as_str().unwrap());
    for f in ["index.html", "style.css", "anim.js", "manifest.json"] {
        assert!(dir.join(f).is_file(), "{f}");
    }
}

#[tokio::test]
async fn history_reselects_and_state_follows_grouping() {
    let api = Api::replay();
    let id = api.create("bird", "bird").await;
    api.call(Method::POST, &format!("/sessions/{id}/decompose"), None).await;
    let (status, body) = api.post(&format!("/sessions/{id}/refine"), json!({"feedback": FEET_FEEDBACK})).await;
    assert_eq!(status, StatusCode::OK, "{body}");
    assert_eq!(body["history_index"], 1);

    let dsl = "anim foot-left: translateY from 0px to -2px dur 300";
    let (status, _) = api.post(&format!("/sessions/{id}/animate"), json!({"dsl": dsl})).await;
    assert_eq!(status, StatusCode::OK);

    // back to the grouping without foot-left: the motion no longer applies
    let (status, body) = api.post(&format!("/sessions/{id}/decompose"), json!({"history_index": 0})).await;
    assert_eq!(status, StatusCode::OK, "{body}");
    assert_eq!(body["state"], "DECOMPOSED");
    assert_eq!(body["history_index"], 2);
    let (_, view) = api.get(&format!("/sessions/{id}")).await;
    assert_eq!(view["grouping_history"].as_array().unwrap().len(), 3);
    assert_eq!(view["grouping_history"][2], view["grouping_history"][0]);

    let (status, body) = api.post(&format!("/sessions/{id}/decompose"), json!({"history_index": 9})).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["code"], "InvalidHistoryIndex");
}

#[tokio::test]
async fn missing_fixture_is_a_gateway_error() {
    let api = Api::replay();
    let id = api.create("car", "car").await;
    let (status, body) = api.call(Method::POST, &format!("/sessions/{id}/decompose"), None).await;
    assert_eq!(status, StatusCode::BAD_GATEWAY);
    assert_eq!(body["code"], "LlmFailure");
    assert_eq!(body["details"]["digest"].as_str().unwrap().len(), 64);
    let (_, view) = api.get(&format!("/sessions/{id}")).await;
    assert_eq!(view["state"], "NEW");
}

struct Gate {
    release: Mutex<Receiver<()>>,
    entered: Mutex<Sender<()>>,
    reply: String,
}

impl Transport for Gate {
    fn complete(&self, _req: &ChatRequest) -> Result<ChatResponse, TransportError> {
        self.entered.lock().unwrap().send(()).unwrap();
        self.release.lock().unwrap().recv_timeout(Duration::from_secs(10)).unwrap();
        Ok(ChatResponse {
            text: self.reply.clone(),
            usage: Usage::default(),
            provider_id: "gate".into(),
        })
    }
}

#[tokio::test(flavor = "multi_thread", worker_threads = 2)]
async fn concurrent_mutation_is_rejected() {
    let (release_tx, release_rx) = channel();
    let (entered_tx, entered_rx) = channel();
    let reply = std::fs::read_to_string(
        decomate_testkit::corpus::llm_fixture_dir()
            .join("6f375ac14fe8b260d035acaf92fbaf412b8b90a51f660b19608e5aa42df768ef.txt"),
    )
    .unwrap();
    let api = Arc::new(Api::with_transport(Arc::new(Gate {
        release: Mutex::new(release_rx),
        entered: Mutex::new(entered_tx),
        reply,
    })));
    let id = api.create("bird", "bird").await;

    let first = {
        let (api, id) = (api.clone(), id.clone());
        tokio::spawn(async move { api.call(Method::POST, &format!("/sessions/{id}/decompose"), None).await })
    };
    tokio::task::spawn_blocking(move || entered_rx.recv_timeout(Duration::from_secs(10)).unwrap())
        .await
        .unwrap();

    let (status, body) = api.call(Method::POST, &format!("/sessions/{id}/decompose"), None).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(body["code"], "InFlight");
    let (status, _) = api.get(&format!("/sessions/{id}")).await;
    assert_eq!(status, StatusCode::OK);

    release_tx.send(()).unwrap();
    let (status, body) = first.await.unwrap();
    assert_eq!(status, StatusCode::OK, "{body}");
}

#[tokio::test]
async fn sessions_survive_reopen() {
    let api = Api::replay();
    let id = api.create("bird", "bird").await;
    api.call(Method::POST, &format!("/sessions/{id}/decompose"), None).await;
    api.post(&format!("/sessions/{id}/refine"), json!({"feedback": FEET_FEEDBACK})).await;
    let (status, _) = api.post(&format!("/sessions/{id}/animate"), json!({"global_prompt": WING_PROMPT})).await;
    assert_eq!(status, StatusCode::OK);
    let (_, before) = api.get(&format!("/sessions/{id}")).await;

    let reopened = SessionService::open(api.dir.path(), api.service_transport()).unwrap();
    let after = serde_json::to_value(reopened.view(&id).unwrap()).unwrap();
    assert_eq!(before, after);
    assert_eq!(reopened.get(&id).unwrap(), api.service.get(&id).unwrap());
}
