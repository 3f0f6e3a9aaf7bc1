use serde::{Deserialize, Serialize};

use decomate_core::codegen::AnimationBundle;
use decomate_core::grouping::GroupingSpec;
use decomate_core::motion::MotionSpec;
use decomate_core::svg::SvgDocument;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SessionState {
    New,
    Decomposed,
    Animated,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Speaker {
    User,
    Assistant,
    System,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub role: Speaker,
    pub text: String,
    pub timestamp: u64,
}

/// One co-creation session. Histories only grow; the last entry is current.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Session {
    pub id: String,
    /// Unix milliseconds.
    pub created_at: u64,
    pub updated_at: u64,
    pub object_name: String,
    pub original_svg: String,
    pub flattened_doc: SvgDocument,
    pub grouping_history: Vec<GroupingSpec>,
    pub motion_history: Vec<MotionSpec>,
    pub transcript: Vec<TranscriptEntry>,
    pub state: SessionState,
    /// Bundle for the current grouping and motion, when they agree.
    #[serde(default)]
    pub bundle: Option<AnimationBundle>,
}

impl Session {
    pub fn current_grouping(&self) -> Option<&GroupingSpec> {
        self.grouping_history.last()
    }

    pub fn current_motion(&self) -> Option<&MotionSpec> {
        self.motion_history.last()
    }
}

pub fn now_ms() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}
