#![allow(dead_code)]

use std::sync::Arc;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use decomate_core::llm::{ReplayTransport, Transport};
use decomate_service::{router, SessionService};
use decomate_testkit::corpus;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tempfile::TempDir;
use tower::ServiceExt;

pub struct Api {
    pub router: Router,
    pub service: Arc<SessionService>,
    pub dir: TempDir,
}

impl Api {
    pub fn replay() -> Self {
        Api::with_transport(Arc::new(ReplayTransport::new(corpus::llm_fixture_dir())))
    }

    pub fn with_transport(transport: Arc<dyn Transport>) -> Self {
        let dir = tempfile::tempdir().unwrap();
        let service = Arc::new(SessionService::open(dir.path(), transport).unwrap());
        Api {
            router: router(service.clone()),
            service,
            dir,
        }
    }

    /// Returns the status and the body, parsed as JSON when possible.
    pub async fn call(&self, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
        let mut req = Request::builder().method(method).uri(uri);
        let body = match body {
            Some(v) => {
                req = req.header("content-type", "application/json");
                Body::from(v.to_string())
            }
            None => Body::empty(),
        };
        let resp = self.router.clone().oneshot(req.body(body).unwrap()).await.unwrap();
        let status = resp.status();
        let bytes = resp.into_body().collect().await.unwrap().to_bytes();
        let text = String::from_utf8_lossy(&bytes).into_owned();
        (status, serde_json::from_str(&text).unwrap_or(Value::String(text)))
    }

    pub async fn get(&self, uri: &str) -> (StatusCode, Value) {
        self.call(Method::GET, uri, None).await
    }

    pub async fn post(&self, uri: &str, body: Value) -> (StatusCode, Value) {
        self.call(Method::POST, uri, Some(body)).await
    }

    pub async fn create(&self, drawing: &str, object: &str) -> String {
        let (status, body) = self
            .post("/sessions", json!({"svg": corpus::svg(drawing), "object_name": object}))
            .await;
        assert_eq!(status, StatusCode::CREATED, "{body}");
        body["id"].as_str().unwrap().to_string()
    }
}

pub const WING_PROMPT: &str = "make the wings flap slowly with elastic easing";
pub const FEET_FEEDBACK: &str = "split the left and right feet";

impl Api {
    pub fn service_transport(&self) -> Arc<dyn Transport> {
        Arc::new(ReplayTransport::new(corpus::llm_fixture_dir()))
    }
}
