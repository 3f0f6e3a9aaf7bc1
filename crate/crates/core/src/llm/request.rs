use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum UserPart {
    Text { text: String },
    Image { media_type: String, data: Vec<u8> },
}

impl UserPart {
    pub fn text(text: impl Into<String>) -> Self {
        UserPart::Text { text: text.into() }
    }

    pub fn png(data: Vec<u8>) -> Self {
        UserPart::Image {
            media_type: "image/png".to_string(),
            data,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    User,
    Assistant,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::User => "user",
            Role::Assistant => "assistant",
        }
    }
}

/// A turn appended after the initial user message, used by the repair loop.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Turn {
    pub role: Role,
    pub text: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub system_text: String,
    pub user_parts: Vec<UserPart>,
    pub temperature: f64,
    pub max_output_tokens: u32,
    #[serde(default)]
    pub followups: Vec<Turn>,
}

impl ChatRequest {
    /// Stable fixture key: SHA-256 over the system text, text parts, image
    /// byte digests, and follow-up turns. Sampling settings are excluded.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        let mut field = |tag: &str, body: &[u8]| {
            h.update(tag.as_bytes());
            h.update((body.len() as u64).to_le_bytes());
            h.update(body);
        };
        field("system", canonical(&self.system_text).as_bytes());
        for part in &self.user_parts {
            match part {
                UserPart::Text { text } => field("text", canonical(text).as_bytes()),
                UserPart::Image { media_type, data } => {
                    field("image", media_type.as_bytes());
                    field("bytes", &Sha256::digest(data));
                }
            }
        }
        for turn in &self.followups {
            field(turn.role.as_str(), canonical(&turn.text).as_bytes());
        }
        hex::encode(h.finalize())
    }

    /// Concatenated text parts, for logging and assertions.
    pub fn text(&self) -> String {
        let texts: Vec<&str> = self
            .user_parts
            .iter()
            .filter_map(|p| match p {
                UserPart::Text { text } => Some(text.as_str()),
                UserPart::Image { .. } => None,
            })
            .collect();
        texts.join("\n\n")
    }
}

fn canonical(s: &str) -> String {
    s.replace("\r\n", "\n")
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Usage {
    pub input_tokens: u64,
    pub output_tokens: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatResponse {
    pub text: String,
    pub usage: Usage,
    pub provider_id: String,
}
