use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use decomate_core::llm::{RepairError, TransportError};
use decomate_core::motion::DslError;
use decomate_core::pipeline::PipelineError;
use decomate_core::svg::SvgError;

/// The closed set of machine-readable error codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ErrorCode {
    InvalidRequest,
    SvgParseError,
    UnknownSession,
    NotDecomposed,
    NotAnimated,
    InFlight,
    EmptyFeedback,
    EmptyPrompt,
    DslParseError,
    ValidationFailed,
    InvalidHistoryIndex,
    LlmFailure,
    Internal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApiError {
    pub status: u16,
    pub code: ErrorCode,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub details: Option<Value>,
}

impl ApiError {
    pub fn new(status: StatusCode, code: ErrorCode, message: impl Into<String>) -> Self {
        ApiError {
            status: status.as_u16(),
            code,
            message: message.into(),
            details: None,
        }
    }

    pub fn with_details(mut self, details: Value) -> Self {
        self.details = Some(details);
        self
    }

    pub fn invalid_request(message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, ErrorCode::InvalidRequest, message)
    }

    pub fn unknown_session(id: &str) -> Self {
        ApiError::new(StatusCode::NOT_FOUND, ErrorCode::UnknownSession, format!("no session {id:?}"))
    }

    pub fn not_decomposed() -> Self {
        ApiError::new(StatusCode::CONFLICT, ErrorCode::NotDecomposed, "session has not been decomposed yet")
    }

    pub fn in_flight() -> Self {
        ApiError::new(
            StatusCode::CONFLICT,
            ErrorCode::InFlight,
            "another change to this session is in progress",
        )
    }

    pub fn internal(message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, ErrorCode::Internal, message)
    }
}

impl std::fmt::Display for ApiError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} {:?}: {}", self.status, self.code, self.message)
    }
}

impl std::error::Error for ApiError {}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        (status, Json(self)).into_response()
    }
}

pub fn svg_details(e: &SvgError) -> Value {
    match e {
        SvgError::MalformedXml { offset, message } => {
            json!({"kind": "MalformedXml", "offset": offset, "message": message})
        }
        SvgError::UnsupportedFeature(what) => json!({"kind": "UnsupportedFeature", "feature": what}),
        SvgError::EmptyDocument => json!({"kind": "EmptyDocument"}),
        SvgError::InvalidAttribute {
            element,
            attribute,
            message,
        } => json!({"kind": "InvalidAttribute", "element": element, "attribute": attribute, "message": message}),
        SvgError::UnresolvedReference(r) => json!({"kind": "UnresolvedReference", "reference": r}),
    }
}

impl From<SvgError> for ApiError {
    fn from(e: SvgError) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, ErrorCode::SvgParseError, e.to_string()).with_details(svg_details(&e))
    }
}

fn transport_details(e: &TransportError) -> Value {
    match e {
        TransportError::FixtureMissing(digest) => json!({"kind": "FixtureMissing", "digest": digest}),
        TransportError::ProviderError { status, body } => {
            json!({"kind": "ProviderError", "status": status, "body": body})
        }
        TransportError::TransportTimeout => json!({"kind": "TransportTimeout"}),
        other => json!({"kind": "Transport", "message": other.to_string()}),
    }
}

impl From<PipelineError> for ApiError {
    fn from(e: PipelineError) -> Self {
        let message = e.to_string();
        match e {
            PipelineError::Svg(e) => e.into(),
            PipelineError::Llm(RepairError::Transport(t)) => {
                ApiError::new(StatusCode::BAD_GATEWAY, ErrorCode::LlmFailure, message).with_details(transport_details(&t))
            }
            PipelineError::Llm(RepairError::RepairExhausted {
                attempts, last_errors, ..
            }) => ApiError::new(StatusCode::BAD_GATEWAY, ErrorCode::LlmFailure, message)
                .with_details(json!({"kind": "RepairExhausted", "attempts": attempts, "last_errors": last_errors})),
            PipelineError::Dsl(DslError::Parse(p)) => ApiError::new(StatusCode::BAD_REQUEST, ErrorCode::DslParseError, message)
                .with_details(json!({"line": p.line, "column": p.column, "expected": p.expected, "found": p.found})),
            PipelineError::Dsl(DslError::Invalid(report)) => {
                let codes: Vec<String> = report.errors().map(|i| i.code.to_string()).collect();
                ApiError::new(
                    StatusCode::BAD_REQUEST,
                    ErrorCode::ValidationFailed,
                    format!("motion failed validation: {}", codes.join(", ")),
                )
                .with_details(serde_json::to_value(&report).unwrap_or(Value::Null))
            }
            PipelineError::EmptyFeedback => ApiError::new(StatusCode::BAD_REQUEST, ErrorCode::EmptyFeedback, message),
            PipelineError::EmptyPrompt => ApiError::new(StatusCode::BAD_REQUEST, ErrorCode::EmptyPrompt, message),
            PipelineError::Grouping(_) | PipelineError::Codegen(_) => ApiError::internal(message),
        }
    }
}
