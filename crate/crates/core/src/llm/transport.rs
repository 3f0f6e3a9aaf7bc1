use std::collections::VecDeque;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Duration;

use base64::Engine;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::request::{ChatRequest, ChatResponse, Usage, UserPart};

pub const DEFAULT_ENDPOINT: &str = "https://api.anthropic.com/v1/messages";
pub const DEFAULT_API_KEY_ENV: &str = "ANTHROPIC_API_KEY";
pub const DEFAULT_MODEL: &str = "claude-sonnet-4-20250514";
const API_VERSION: &str = "2023-06-01";
const EXCERPT_LEN: usize = 300;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum TransportError {
    #[error("request timed out")]
    TransportTimeout,
    #[error("no replay fixture for request digest {0}")]
    FixtureMissing(String),
    #[error("provider returned status {status}: {body}")]
    ProviderError { status: u16, body: String },
    #[error("network error: {0}")]
    Network(String),
    #[error("scripted transport has no responses left")]
    ScriptExhausted,
    #[error("transport misconfigured: {0}")]
    Config(String),
    #[error("fixture i/o failed: {0}")]
    Io(String),
}

/// Anything that answers chat requests. Implementations are shareable
/// across threads.
pub trait Transport: Send + Sync {
    fn complete(&self, req: &ChatRequest) -> Result<ChatResponse, TransportError>;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransportMode {
    Live,
    Replay,
    Scripted,
}

impl std::str::FromStr for TransportMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "live" => Ok(TransportMode::Live),
            "replay" => Ok(TransportMode::Replay),
            "scripted" => Ok(TransportMode::Scripted),
            _ => Err(format!("unknown transport mode {s:?} (live, replay, scripted)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransportConfig {
    pub mode: TransportMode,
    pub endpoint_url: String,
    pub api_key_env_name: String,
    pub model: String,
    pub fixture_dir: Option<PathBuf>,
    pub timeout_ms: u64,
    pub max_retries: u32,
    /// Responses served in order by scripted mode.
    #[serde(default)]
    pub script: Vec<String>,
}

impl Default for TransportConfig {
    fn default() -> Self {
        TransportConfig {
            mode: TransportMode::Replay,
            endpoint_url: DEFAULT_ENDPOINT.to_string(),
            api_key_env_name: DEFAULT_API_KEY_ENV.to_string(),
            model: DEFAULT_MODEL.to_string(),
            fixture_dir: None,
            timeout_ms: 120_000,
            max_retries: 2,
            script: Vec::new(),
        }
    }
}

/// Builds the transport selected by `cfg.mode`.
pub fn build_transport(cfg: &TransportConfig) -> Result<Box<dyn Transport>, TransportError> {
    match cfg.mode {
        TransportMode::Live => Ok(Box::new(LiveTransport::from_config(cfg)?)),
        TransportMode::Replay => {
            let dir = cfg
                .fixture_dir
                .clone()
                .ok_or_else(|| TransportError::Config("replay mode needs a fixture directory".into()))?;
            Ok(Box::new(ReplayTransport::new(dir)))
        }
        TransportMode::Scripted => Ok(Box::new(ScriptedTransport::new(cfg.script.clone()))),
    }
}

pub fn transport_complete(cfg: &TransportConfig, req: &ChatRequest) -> Result<ChatResponse, TransportError> {
    build_transport(cfg)?.complete(req)
}

/// Serves `<fixture_dir>/<digest>.txt`.
pub struct ReplayTransport {
    dir: PathBuf,
}

impl ReplayTransport {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        ReplayTransport { dir: dir.into() }
    }

    pub fn fixture_path(dir: &Path, digest: &str) -> PathBuf {
        dir.join(format!("{digest}.txt"))
    }
}

impl Transport for ReplayTransport {
    fn complete(&self, req: &ChatRequest) -> Result<ChatResponse, TransportError> {
        let digest = req.digest();
        match std::fs::read_to_string(Self::fixture_path(&self.dir, &digest)) {
            Ok(text) => Ok(ChatResponse {
                text,
                usage: Usage::default(),
                provider_id: "replay".to_string(),
            }),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Err(TransportError::FixtureMissing(digest)),
            Err(e) => Err(TransportError::Io(e.to_string())),
        }
    }
}

/// Pops queued responses in order and keeps every request it saw.
#[derive(Default)]
pub struct ScriptedTransport {
    queue: Mutex<VecDeque<String>>,
    seen: Mutex<Vec<ChatRequest>>,
}

impl ScriptedTransport {
    pub fn new<S: Into<String>>(responses: impl IntoIterator<Item = S>) -> Self {
        ScriptedTransport {
            queue: Mutex::new(responses.into_iter().map(Into::into).collect()),
            seen: Mutex::new(Vec::new()),
        }
    }

    pub fn push(&self, response: impl Into<String>) {
        self.queue.lock().expect("script lock").push_back(response.into());
    }

    pub fn requests(&self) -> Vec<ChatRequest> {
        self.seen.lock().expect("script lock").clone()
    }

    pub fn calls(&self) -> usize {
        self.seen.lock().expect("script lock").len()
    }
}

impl Transport for ScriptedTransport {
    fn complete(&self, req: &ChatRequest) -> Result<ChatResponse, TransportError> {
        self.seen.lock().expect("script lock").push(req.clone());
        let text = self
            .queue
            .lock()
            .expect("script lock")
            .pop_front()
            .ok_or(TransportError::ScriptExhausted)?;
        Ok(ChatResponse {
            text,
            usage: Usage::default(),
            provider_id: "scripted".to_string(),
        })
    }
}

/// Forwards to `inner` and stores each successful response as a replay
/// fixture.
pub struct RecordingTransport<T> {
    inner: T,
    dir: PathBuf,
}

impl<T: Transport> RecordingTransport<T> {
    pub fn new(inner: T, dir: impl Into<PathBuf>) -> Self {
        RecordingTransport { inner, dir: dir.into() }
    }
}

impl<T: Transport> Transport for RecordingTransport<T> {
    fn complete(&self, req: &ChatRequest) -> Result<ChatResponse, TransportError> {
        let resp = self.inner.complete(req)?;
        std::fs::create_dir_all(&self.dir).map_err(|e| TransportError::Io(e.to_string()))?;
        std::fs::write(ReplayTransport::fixture_path(&self.dir, &req.digest()), &resp.text)
            .map_err(|e| TransportError::Io(e.to_string()))?;
        Ok(resp)
    }
}

/// HTTPS messages API client. The API key is read from the environment on
/// each call and never stored.
pub struct LiveTransport {
    agent: ureq::Agent,
    endpoint_url: String,
    api_key_env_name: String,
    model: String,
    max_retries: u32,
}

impl LiveTransport {
    pub fn from_config(cfg: &TransportConfig) -> Result<Self, TransportError> {
        if cfg.endpoint_url.is_empty() {
            return Err(TransportError::Config("live mode needs an endpoint url".into()));
        }
        if cfg.api_key_env_name.is_empty() {
            return Err(TransportError::Config("live mode needs an api key variable name".into()));
        }
        let agent = ureq::AgentBuilder::new()
            .timeout(Duration::from_millis(cfg.timeout_ms.max(1)))
            .build();
        Ok(LiveTransport {
            agent,
            endpoint_url: cfg.endpoint_url.clone(),
            api_key_env_name: cfg.api_key_env_name.clone(),
            model: cfg.model.clone(),
            max_retries: cfg.max_retries,
        })
    }

    fn body(&self, req: &ChatRequest) -> Value {
        let b64 = base64::engine::general_purpose::STANDARD;
        let content: Vec<Value> = req
            .user_parts
            .iter()
            .map(|p| match p {
                UserPart::Text { text } => json!({"type": "text", "text": text}),
                UserPart::Image { media_type, data } => json!({
                    "type": "image",
                    "source": {"type": "base64", "media_type": media_type, "data": b64.encode(data)},
                }),
            })
            .collect();
        let mut messages = vec![json!({"role": "user", "content": content})];
        for turn in &req.followups {
            messages.push(json!({"role": turn.role.as_str(), "content": turn.text}));
        }
        json!({
            "model": self.model,
            "max_tokens": req.max_output_tokens,
            "temperature": req.temperature,
            "system": req.system_text,
            "messages": messages,
        })
    }
}

fn excerpt(s: &str) -> String {
    s.chars().take(EXCERPT_LEN).collect()
}

fn parse_messages_response(v: &Value) -> ChatResponse {
    let text = v["content"]
        .as_array()
        .map(|blocks| {
            blocks
                .iter()
                .filter(|b| b["type"] == "text")
                .filter_map(|b| b["text"].as_str())
                .collect::<Vec<_>>()
                .join("")
        })
        .unwrap_or_default();
    ChatResponse {
        text,
        usage: Usage {
            input_tokens: v["usage"]["input_tokens"].as_u64().unwrap_or(0),
            output_tokens: v["usage"]["output_tokens"].as_u64().unwrap_or(0),
        },
        provider_id: v["id"].as_str().unwrap_or("live").to_string(),
    }
}

impl Transport for LiveTransport {
    fn complete(&self, req: &ChatRequest) -> Result<ChatResponse, TransportError> {
        let key = std::env::var(&self.api_key_env_name)
            .map_err(|_| TransportError::Config(format!("environment variable {} is not set", self.api_key_env_name)))?;
        let body = self.body(req);
        let mut attempt = 0;
        loop {
            let result = self
                .agent
                .post(&self.endpoint_url)
                .set("x-api-key", &key)
                .set("anthropic-version", API_VERSION)
                .set("content-type", "application/json")
                .send_json(&body);
            let err = match result {
                Ok(resp) => {
                    let v: Value = resp
                        .into_json()
                        .map_err(|e| TransportError::Network(format!("unreadable response body: {e}")))?;
                    return Ok(parse_messages_response(&v));
                }
                Err(ureq::Error::Status(status, resp)) => {
                    let body = resp.into_string().unwrap_or_default();
                    let transient = status == 429 || status >= 500;
                    let err = TransportError::ProviderError {
                        status,
                        body: excerpt(&body),
                    };
                    if !transient {
                        return Err(err);
                    }
                    err
                }
                Err(ureq::Error::Transport(t)) => {
                    let msg = t.to_string();
                    if msg.contains("timed out") {
                        TransportError::TransportTimeout
                    } else {
                        TransportError::Network(msg)
                    }
                }
            };
            if attempt >= self.max_retries {
                return Err(err);
            }
            attempt += 1;
            std::thread::sleep(Duration::from_millis(250 << attempt.min(6)));
        }
    }
}
