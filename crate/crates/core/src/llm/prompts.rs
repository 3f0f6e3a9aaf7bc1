use std::collections::BTreeMap;
use std::fmt::Write;

use super::request::{ChatRequest, UserPart};
use crate::grouping::{GroupingSpec, REST_GROUP};
use crate::motion::{Easing, MotionSpec, Property, MAX_TRACKS_PER_GROUP, MIN_DURATION_MS};
use crate::svg::{serialize_svg, SvgDocument};

pub const DECOMPOSITION_TEMPERATURE: f64 = 0.2;
pub const MOTION_TEMPERATURE: f64 = 0.5;
const DECOMPOSITION_MAX_TOKENS: u32 = 4096;
const MOTION_MAX_TOKENS: u32 = 4096;

const DECOMPOSITION_SYSTEM: &str = "You segment SVG illustrations into semantic parts for animation. \
Judge parts by what they depict in the picture, not by the file's existing group structure. \
Answer with JSON only.";

const MOTION_SYSTEM: &str = "You author CSS-ready motion for semantic parts of an SVG illustration. \
You describe motion as structured tracks; code is generated from your JSON deterministically. \
Answer with JSON only.";

/// Source of the rendered image attached to decomposition prompts.
pub trait Rasterizer: Send + Sync {
    /// PNG bytes for `svg`, or `None` to send a text-only prompt.
    fn rasterize(&self, svg: &str) -> Option<Vec<u8>>;
}

/// The default: no image.
pub struct NoRasterizer;

impl Rasterizer for NoRasterizer {
    fn rasterize(&self, _svg: &str) -> Option<Vec<u8>> {
        None
    }
}

fn grouping_schema_text() -> String {
    format!(
        "Respond with one JSON object in this schema:\n\
         {{\"object\": \"<object name>\", \"groups\": [{{\"name\": \"<lowercase-slug>\", \"members\": [\"el-0\", \"el-1\"], \"suggestions\": [\"<short animation idea>\"]}}]}}\n\n\
         Rules:\n\
         - members must be element ids that exist in the SVG below.\n\
         - each element id may appear in at most one group.\n\
         - group names are lowercase slugs (letters, digits, hyphens), e.g. \"ear-left\".\n\
         - do not name a group \"{REST_GROUP}\"; elements you leave out are collected there automatically.\n\
         - give every group 1 to 3 animation suggestions."
    )
}

/// Asks for a semantic grouping of a flattened, id-assigned document.
pub fn build_decomposition_request(doc: &SvgDocument, object_name: &str, image: Option<Vec<u8>>) -> ChatRequest {
    let svg = serialize_svg(doc);
    let ids: Vec<String> = doc.walk().iter().map(|n| n.id.to_string()).collect();
    let mut text = String::new();
    let _ = write!(
        text,
        "Object: {object_name}\n\n\
         Decompose this SVG of a {object_name} into meaningful parts that can be animated independently \
         (for a dog: ears, nose, mouth, legs).\n\n{}\n\nElement ids: {}\n\nSVG:\n```svg\n{svg}```",
        grouping_schema_text(),
        ids.join(", ")
    );
    let mut user_parts = vec![UserPart::text(text)];
    if let Some(png) = image {
        user_parts.push(UserPart::png(png));
    }
    ChatRequest {
        system_text: DECOMPOSITION_SYSTEM.to_string(),
        user_parts,
        temperature: DECOMPOSITION_TEMPERATURE,
        max_output_tokens: DECOMPOSITION_MAX_TOKENS,
        followups: Vec::new(),
    }
}

/// The decomposition request plus the current grouping and the user's
/// feedback. The answer replaces the grouping entirely.
pub fn build_refinement_request(
    doc: &SvgDocument,
    object_name: &str,
    current: &GroupingSpec,
    feedback: &str,
    image: Option<Vec<u8>>,
) -> ChatRequest {
    let mut req = build_decomposition_request(doc, object_name, image);
    let current_json = serde_json::to_string_pretty(current).unwrap_or_default();
    req.user_parts.push(UserPart::text(format!(
        "Current grouping:\n```json\n{current_json}\n```\n\n\
         User feedback: \"{feedback}\"\n\n\
         Revise the grouping to follow the feedback. Respond with the complete revised grouping \
         in the same schema; it replaces the current grouping."
    )));
    req
}

fn motion_schema_text() -> String {
    let props: Vec<String> = Property::ALL
        .iter()
        .map(|p| {
            let unit = match p.unit().suffix() {
                "" => "unitless".to_string(),
                s => s.to_string(),
            };
            format!("{} ({unit})", p.name())
        })
        .collect();
    format!(
        "Respond with one JSON object in this schema:\n\
         {{\"tracks\": [{{\"group\": \"<group name>\", \"property\": \"<property>\", \"from\": \"<value>\", \"to\": \"<value>\", \
         \"duration_ms\": 1000, \"delay_ms\": 0, \"iterations\": 1, \"direction\": \"normal\", \"easing\": \"ease\", \"origin\": \"auto\"}}], \
         \"global\": {{\"loop_all\": false}}}}\n\n\
         Rules:\n\
         - properties: {}.\n\
         - values are strings with their unit, e.g. \"-15deg\", \"4px\", \"0.5\".\n\
         - iterations is a positive integer or \"infinite\"; direction is \"normal\" or \"alternate\".\n\
         - easing is one of: {}.\n\
         - origin is \"auto\" (center of the group) or {{\"x\": <number>, \"y\": <number>}} in SVG user units.\n\
         - duration_ms >= {MIN_DURATION_MS}; opacity values lie in [0, 1].\n\
         - at most one track per (group, property) and at most {MAX_TRACKS_PER_GROUP} tracks per group.\n\
         - several transform tracks on one group compose in the fixed order translate, then rotate, then scale.\n\
         - model oscillation (flapping, swinging, bobbing) as from/to with direction \"alternate\" and iterations \"infinite\".",
        props.join(", "),
        Easing::VOCABULARY.join(", ")
    )
}

/// Asks for a MotionSpec from per-group and/or global prompts. A prior spec
/// is included for iteration; the answer replaces it.
pub fn build_motion_request(
    grouping: &GroupingSpec,
    user_prompts: &BTreeMap<String, String>,
    global_prompt: Option<&str>,
    prior: Option<&MotionSpec>,
) -> ChatRequest {
    let mut text = String::new();
    let _ = writeln!(text, "Object: {}\n\nGroups:", grouping.object_name);
    for g in &grouping.groups {
        if g.suggestions.is_empty() {
            let _ = writeln!(text, "- {}", g.name);
        } else {
            let quoted: Vec<String> = g.suggestions.iter().map(|s| format!("\"{s}\"")).collect();
            let _ = writeln!(text, "- {} (suggestions: {})", g.name, quoted.join(", "));
        }
    }
    match (user_prompts.is_empty(), global_prompt) {
        (true, Some(global)) => {
            let _ = writeln!(text, "\nInstruction:\n\"{global}\"");
        }
        _ => {
            text.push_str("\nInstructions:\n");
            if let Some(global) = global_prompt {
                let _ = writeln!(text, "- all groups: \"{global}\"");
            }
            for (group, prompt) in user_prompts {
                let _ = writeln!(text, "- {group}: \"{prompt}\"");
            }
        }
    }
    if let Some(prior) = prior {
        let prior_json = serde_json::to_string_pretty(prior).unwrap_or_default();
        let _ = writeln!(
            text,
            "\nCurrent motion (revise it according to the instructions and return the complete replacement):\n```json\n{prior_json}\n```"
        );
    }
    let _ = write!(text, "\n{}", motion_schema_text());
    ChatRequest {
        system_text: MOTION_SYSTEM.to_string(),
        user_parts: vec![UserPart::text(text)],
        temperature: MOTION_TEMPERATURE,
        max_output_tokens: MOTION_MAX_TOKENS,
        followups: Vec::new(),
    }
}
