use serde::{Deserialize, Serialize};

use super::parse::RepairableErrors;
use super::request::{ChatRequest, Role, Turn};
use super::transport::{Transport, TransportError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepairPolicy {
    pub max_attempts: u32,
    pub include_validation_errors_in_reprompt: bool,
}

impl Default for RepairPolicy {
    fn default() -> Self {
        RepairPolicy {
            max_attempts: 3,
            include_validation_errors_in_reprompt: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Repaired<T> {
    pub value: T,
    pub attempts: u32,
    /// Raw model responses in order, the last one accepted.
    pub responses: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum RepairError {
    #[error(transparent)]
    Transport(#[from] TransportError),
    #[error("no valid response after {attempts} attempts: {last_errors}")]
    RepairExhausted {
        attempts: u32,
        last_errors: RepairableErrors,
        responses: Vec<String>,
    },
}

fn reprompt(policy: &RepairPolicy, errors: &RepairableErrors) -> String {
    if policy.include_validation_errors_in_reprompt {
        let listed = serde_json::to_string_pretty(errors).unwrap_or_default();
        format!(
            "Your previous response was rejected with these errors:\n```json\n{listed}\n```\n\
             Fix them and respond with the complete corrected JSON object only."
        )
    } else {
        "Your previous response was rejected. Respond with the complete corrected JSON object only.".to_string()
    }
}

/// Sends `request`, parsing each answer with `parse`. On failure the answer
/// and its errors are appended to the conversation and the request is sent
/// again, up to `policy.max_attempts` transport calls in total.
pub fn run_with_repair<T>(
    transport: &dyn Transport,
    policy: &RepairPolicy,
    request: ChatRequest,
    parse: impl Fn(&str) -> Result<T, RepairableErrors>,
) -> Result<Repaired<T>, RepairError> {
    let max = policy.max_attempts.max(1);
    let mut req = request;
    let mut responses = Vec::new();
    let mut attempt = 0;
    loop {
        attempt += 1;
        let resp = transport.complete(&req)?;
        responses.push(resp.text.clone());
        match parse(&resp.text) {
            Ok(value) => {
                return Ok(Repaired {
                    value,
                    attempts: attempt,
                    responses,
                })
            }
            Err(errors) if attempt >= max => {
                return Err(RepairError::RepairExhausted {
                    attempts: attempt,
                    last_errors: errors,
                    responses,
                })
            }
            Err(errors) => {
                req.followups.push(Turn {
                    role: Role::Assistant,
                    text: resp.text,
                });
                req.followups.push(Turn {
                    role: Role::User,
                    text: reprompt(policy, &errors),
                });
            }
        }
    }
}
