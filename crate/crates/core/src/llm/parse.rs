use std::fmt;

use serde::{Deserialize, Serialize, Serializer};
use serde_json::Value;

use crate::grouping::{validate_and_complete, GroupingSpec};
use crate::motion::{validate_motion, MotionSpec};
use crate::report::{IssueCode, ValidationReport};
use crate::svg::SvgDocument;

const MAX_OBJECT_STARTS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorCode {
    NoJsonFound,
    InvalidJson,
    SchemaViolation,
    Validation(IssueCode),
}

impl fmt::Display for ErrorCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ErrorCode::NoJsonFound => f.write_str("NoJsonFound"),
            ErrorCode::InvalidJson => f.write_str("InvalidJson"),
            ErrorCode::SchemaViolation => f.write_str("SchemaViolation"),
            ErrorCode::Validation(c) => write!(f, "{c}"),
        }
    }
}

impl Serialize for ErrorCode {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ErrorCode {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Ok(match s.as_str() {
            "NoJsonFound" => ErrorCode::NoJsonFound,
            "InvalidJson" => ErrorCode::InvalidJson,
            "SchemaViolation" => ErrorCode::SchemaViolation,
            other => ErrorCode::Validation(
                serde_json::from_value(Value::String(other.to_string())).map_err(serde::de::Error::custom)?,
            ),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepairableError {
    pub code: ErrorCode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subject: Option<String>,
    pub message: String,
}

/// Machine-readable reasons a model response was rejected, suitable for
/// feeding back into the conversation.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RepairableErrors(pub Vec<RepairableError>);

impl RepairableErrors {
    pub fn single(code: ErrorCode, message: impl Into<String>) -> Self {
        RepairableErrors(vec![RepairableError {
            code,
            subject: None,
            message: message.into(),
        }])
    }

    pub fn from_report(report: &ValidationReport) -> Self {
        RepairableErrors(
            report
                .errors()
                .map(|i| RepairableError {
                    code: ErrorCode::Validation(i.code),
                    subject: Some(i.subject.clone()),
                    message: i.message.clone(),
                })
                .collect(),
        )
    }

    pub fn has(&self, code: ErrorCode) -> bool {
        self.0.iter().any(|e| e.code == code)
    }

    pub fn codes(&self) -> Vec<ErrorCode> {
        self.0.iter().map(|e| e.code).collect()
    }
}

impl fmt::Display for RepairableErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{}: {}", e.code, e.message)?;
        }
        Ok(())
    }
}

/// Finds the first JSON object in model output: the body of the first
/// fenced code block if it parses, otherwise the first balanced `{...}` span
/// that parses.
pub fn extract_json(text: &str) -> Result<Value, RepairableErrors> {
    if let Some(block) = first_fenced_block(text) {
        if let Ok(v) = serde_json::from_str::<Value>(block.trim()) {
            return Ok(v);
        }
    }
    let mut first_error: Option<String> = None;
    for (start, _) in text.char_indices().filter(|&(_, c)| c == '{').take(MAX_OBJECT_STARTS) {
        let Some(end) = balanced_end(&text[start..]) else {
            first_error.get_or_insert_with(|| "unbalanced braces".to_string());
            continue;
        };
        match serde_json::from_str::<Value>(&text[start..start + end]) {
            Ok(v) => return Ok(v),
            Err(e) => {
                first_error.get_or_insert_with(|| e.to_string());
            }
        }
    }
    Err(match first_error {
        Some(msg) => RepairableErrors::single(ErrorCode::InvalidJson, format!("response JSON does not parse: {msg}")),
        None => RepairableErrors::single(ErrorCode::NoJsonFound, "response contains no JSON object"),
    })
}

fn first_fenced_block(text: &str) -> Option<&str> {
    let open = text.find("```")?;
    let after = &text[open + 3..];
    let body_start = after.find('\n').map_or(after.len(), |i| i + 1);
    let body = &after[body_start..];
    let close = body.find("```")?;
    Some(&body[..close])
}

/// Byte length of the balanced object starting at `s[0] == '{'`, honoring
/// JSON string escapes.
fn balanced_end(s: &str) -> Option<usize> {
    let mut depth = 0usize;
    let mut in_string = false;
    let mut escaped = false;
    for (i, c) in s.char_indices() {
        if in_string {
            if escaped {
                escaped = false;
            } else if c == '\\' {
                escaped = true;
            } else if c == '"' {
                in_string = false;
            }
            continue;
        }
        match c {
            '"' => in_string = true,
            '{' => depth += 1,
            '}' => {
                depth -= 1;
                if depth == 0 {
                    return Some(i + 1);
                }
            }
            _ => {}
        }
    }
    None
}

fn schema<T: serde::de::DeserializeOwned>(v: Value, what: &str) -> Result<T, RepairableErrors> {
    serde_json::from_value(v)
        .map_err(|e| RepairableErrors::single(ErrorCode::SchemaViolation, format!("not a valid {what}: {e}")))
}

/// Grouping from a decomposition or refinement response, validated and
/// completed against `doc`.
pub fn parse_decomposition_response(text: &str, doc: &SvgDocument) -> Result<GroupingSpec, RepairableErrors> {
    let spec: GroupingSpec = schema(extract_json(text)?, "GroupingSpec")?;
    let (completed, report) = validate_and_complete(doc, &spec);
    if !report.ok {
        return Err(RepairableErrors::from_report(&report));
    }
    Ok(completed)
}

pub fn parse_motion_response(text: &str, grouping: &GroupingSpec) -> Result<MotionSpec, RepairableErrors> {
    let spec: MotionSpec = schema(extract_json(text)?, "MotionSpec")?;
    let report = validate_motion(&spec, grouping);
    if !report.ok {
        return Err(RepairableErrors::from_report(&report));
    }
    Ok(spec)
}
