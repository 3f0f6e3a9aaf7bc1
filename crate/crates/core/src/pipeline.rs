//! The decompose → refine → animate steps shared by the service and CLI.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::codegen::{emit_bundle, AnimationBundle, CodegenError};
use crate::grouping::{apply_grouping, GroupingError, GroupingSpec};
use crate::llm::{
    build_decomposition_request, build_motion_request, build_refinement_request, parse_decomposition_response,
    parse_motion_response, run_with_repair, NoRasterizer, Rasterizer, RepairError, RepairPolicy, Transport,
};
use crate::motion::{parse_motion_dsl, DslError, MotionSpec};
use crate::svg::{flatten_and_assign_ids, parse_svg, serialize_svg, SvgDocument, SvgError};

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("svg: {0}")]
    Svg(#[from] SvgError),
    #[error("model call failed: {0}")]
    Llm(#[from] RepairError),
    #[error("motion dsl: {0}")]
    Dsl(#[from] DslError),
    #[error("grouping: {0}")]
    Grouping(#[from] GroupingError),
    #[error("codegen: {0}")]
    Codegen(#[from] CodegenError),
    #[error("feedback text is empty")]
    EmptyFeedback,
    #[error("no animation prompt given")]
    EmptyPrompt,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroupingOutcome {
    pub grouping: GroupingSpec,
    pub grouped_doc: SvgDocument,
    pub grouped_svg: String,
    pub attempts: u32,
    pub responses: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnimationOutcome {
    pub motion: MotionSpec,
    pub bundle: AnimationBundle,
    pub attempts: u32,
    pub responses: Vec<String>,
}

/// Parses and flattens raw SVG text.
pub fn load_flat(svg_text: &str) -> Result<SvgDocument, SvgError> {
    Ok(flatten_and_assign_ids(&parse_svg(svg_text)?))
}

/// Rebuilds the grouped document from saved `grouped.svg` text.
pub fn load_grouped(grouped_svg: &str, grouping: &GroupingSpec) -> Result<SvgDocument, PipelineError> {
    Ok(apply_grouping(&load_flat(grouped_svg)?, grouping)?)
}

pub fn group(flat: &SvgDocument, grouping: GroupingSpec, attempts: u32, responses: Vec<String>) -> Result<GroupingOutcome, PipelineError> {
    let grouped_doc = apply_grouping(flat, &grouping)?;
    Ok(GroupingOutcome {
        grouped_svg: serialize_svg(&grouped_doc),
        grouping,
        grouped_doc,
        attempts,
        responses,
    })
}

/// Deterministic animation from motion DSL text; no model involved.
pub fn animate_dsl(grouped: &SvgDocument, grouping: &GroupingSpec, dsl: &str) -> Result<AnimationOutcome, PipelineError> {
    let motion = parse_motion_dsl(dsl, grouping)?;
    let bundle = emit_bundle(grouped, &motion, grouping)?;
    Ok(AnimationOutcome {
        motion,
        bundle,
        attempts: 0,
        responses: Vec::new(),
    })
}

pub struct Pipeline {
    transport: Arc<dyn Transport>,
    policy: RepairPolicy,
    rasterizer: Arc<dyn Rasterizer>,
}

impl Pipeline {
    pub fn new(transport: Arc<dyn Transport>) -> Self {
        Pipeline {
            transport,
            policy: RepairPolicy::default(),
            rasterizer: Arc::new(NoRasterizer),
        }
    }

    pub fn with_policy(mut self, policy: RepairPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn with_rasterizer(mut self, rasterizer: Arc<dyn Rasterizer>) -> Self {
        self.rasterizer = rasterizer;
        self
    }

    pub fn decompose(&self, flat: &SvgDocument, object_name: &str) -> Result<GroupingOutcome, PipelineError> {
        let image = self.rasterizer.rasterize(&serialize_svg(flat));
        let req = build_decomposition_request(flat, object_name, image);
        self.grouping_call(flat, object_name, req)
    }

    /// Natural-language regrouping; the model's answer replaces `current`.
    pub fn refine(
        &self,
        flat: &SvgDocument,
        object_name: &str,
        current: &GroupingSpec,
        feedback: &str,
    ) -> Result<GroupingOutcome, PipelineError> {
        if feedback.trim().is_empty() {
            return Err(PipelineError::EmptyFeedback);
        }
        let image = self.rasterizer.rasterize(&serialize_svg(flat));
        let req = build_refinement_request(flat, object_name, current, feedback.trim(), image);
        self.grouping_call(flat, object_name, req)
    }

    fn grouping_call(
        &self,
        flat: &SvgDocument,
        object_name: &str,
        req: crate::llm::ChatRequest,
    ) -> Result<GroupingOutcome, PipelineError> {
        let out = run_with_repair(self.transport.as_ref(), &self.policy, req, |text| {
            parse_decomposition_response(text, flat)
        })?;
        let mut grouping = out.value;
        grouping.object_name = object_name.to_string();
        group(flat, grouping, out.attempts, out.responses)
    }

    pub fn animate_prompts(
        &self,
        grouped: &SvgDocument,
        grouping: &GroupingSpec,
        prompts: &BTreeMap<String, String>,
        global_prompt: Option<&str>,
        prior: Option<&MotionSpec>,
    ) -> Result<AnimationOutcome, PipelineError> {
        let global_prompt = global_prompt.map(str::trim).filter(|g| !g.is_empty());
        if global_prompt.is_none() && prompts.values().all(|p| p.trim().is_empty()) {
            return Err(PipelineError::EmptyPrompt);
        }
        let req = build_motion_request(grouping, prompts, global_prompt, prior);
        let out = run_with_repair(self.transport.as_ref(), &self.policy, req, |text| {
            parse_motion_response(text, grouping)
        })?;
        let bundle = emit_bundle(grouped, &out.value, grouping)?;
        Ok(AnimationOutcome {
            motion: out.value,
            bundle,
            attempts: out.attempts,
            responses: out.responses,
        })
    }
}
