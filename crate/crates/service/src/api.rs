//! Request and response bodies of the HTTP API.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use decomate_core::codegen::{AnimationBundle, BundleManifest};
use decomate_core::grouping::GroupingSpec;
use decomate_core::motion::MotionSpec;

use crate::session::{Session, SessionState};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CreateSessionRequest {
    pub svg: String,
    #[serde(alias = "object")]
    pub object_name: String,
}

/// With `history_index`, re-selects an earlier grouping instead of asking
/// the model again.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct DecomposeRequest {
    #[serde(default)]
    pub history_index: Option<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RefineRequest {
    pub feedback: String,
}

/// Exactly one source of motion is used, in this order of precedence:
/// `history_index`, `dsl`, then `prompts`/`global_prompt`.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct AnimateRequest {
    #[serde(default)]
    pub prompts: BTreeMap<String, String>,
    #[serde(default)]
    pub global_prompt: Option<String>,
    #[serde(default)]
    pub dsl: Option<String>,
    #[serde(default)]
    pub history_index: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SessionView {
    #[serde(flatten)]
    pub session: Session,
    pub normalized_svg: String,
    #[serde(default)]
    pub grouped_svg: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupingResponse {
    pub session_id: String,
    pub state: SessionState,
    pub history_index: usize,
    pub grouping: GroupingSpec,
    pub grouped_svg: String,
    pub suggestions: BTreeMap<String, Vec<String>>,
    pub attempts: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnimateResponse {
    pub session_id: String,
    pub state: SessionState,
    pub history_index: usize,
    pub motion: MotionSpec,
    pub bundle: AnimationBundle,
    pub attempts: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExportResponse {
    pub directory: String,
    pub files: Vec<String>,
    pub manifest: BundleManifest,
}
