use std::collections::{BTreeMap, HashMap, HashSet};
use std::io;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use axum::http::StatusCode;
use rand::distributions::Alphanumeric;
use rand::Rng;

use decomate_core::codegen::{emit_bundle, emit_preview_html, write_bundle, AnimationBundle, BUNDLE_FILES};
use decomate_core::grouping::GroupingSpec;
use decomate_core::llm::Transport;
use decomate_core::motion::{validate_motion, MotionSpec};
use decomate_core::pipeline::{self, GroupingOutcome, Pipeline, PipelineError};
use decomate_core::svg::{serialize_svg, SvgDocument};

use crate::api::{AnimateRequest, AnimateResponse, DecomposeRequest, ExportResponse, GroupingResponse, SessionView};
use crate::error::{ApiError, ErrorCode};
use crate::session::{now_ms, Session, SessionState, Speaker, TranscriptEntry};
use crate::store::SessionStore;

const ID_LEN: usize = 16;

/// Session state machine with file-backed persistence. Methods block (model
/// calls, disk writes); async callers should run them on a blocking pool.
pub struct SessionService {
    data_dir: PathBuf,
    store: SessionStore,
    sessions: RwLock<HashMap<String, Session>>,
    in_flight: Mutex<HashSet<String>>,
    pipeline: Pipeline,
}

struct FlightGuard<'a> {
    set: &'a Mutex<HashSet<String>>,
    id: String,
}

impl Drop for FlightGuard<'_> {
    fn drop(&mut self) {
        if let Ok(mut set) = self.set.lock() {
            set.remove(&self.id);
        }
    }
}

fn io_error(e: io::Error) -> ApiError {
    ApiError::internal(format!("storage failure: {e}"))
}

fn new_id() -> String {
    rand::thread_rng()
        .sample_iter(&Alphanumeric)
        .take(ID_LEN)
        .map(char::from)
        .collect()
}

fn note(session: &mut Session, role: Speaker, text: impl Into<String>) {
    session.transcript.push(TranscriptEntry {
        role,
        text: text.into(),
        timestamp: now_ms(),
    });
}

fn grouped_doc(session: &Session, grouping: &GroupingSpec) -> Result<SvgDocument, ApiError> {
    decomate_core::grouping::apply_grouping(&session.flattened_doc, grouping)
        .map_err(|e| ApiError::internal(format!("stored grouping no longer applies: {e}")))
}

impl SessionService {
    pub fn open(data_dir: &Path, transport: Arc<dyn Transport>) -> io::Result<Self> {
        Self::with_pipeline(data_dir, Pipeline::new(transport))
    }

    /// Loads every persisted session from `data_dir`.
    pub fn with_pipeline(data_dir: &Path, pipeline: Pipeline) -> io::Result<Self> {
        let store = SessionStore::open(data_dir)?;
        let sessions = store.load_all()?.into_iter().map(|s| (s.id.clone(), s)).collect();
        Ok(SessionService {
            data_dir: data_dir.to_path_buf(),
            store,
            sessions: RwLock::new(sessions),
            in_flight: Mutex::new(HashSet::new()),
            pipeline,
        })
    }

    pub fn data_dir(&self) -> &Path {
        &self.data_dir
    }

    pub fn export_dir(&self, id: &str) -> PathBuf {
        self.data_dir.join("exports").join(id)
    }

    pub fn session_ids(&self) -> Vec<String> {
        let mut ids: Vec<String> = self.read().keys().cloned().collect();
        ids.sort();
        ids
    }

    fn read(&self) -> std::sync::RwLockReadGuard<'_, HashMap<String, Session>> {
        self.sessions.read().unwrap_or_else(|e| e.into_inner())
    }

    pub fn get(&self, id: &str) -> Result<Session, ApiError> {
        self.read().get(id).cloned().ok_or_else(|| ApiError::unknown_session(id))
    }

    pub fn view(&self, id: &str) -> Result<SessionView, ApiError> {
        let session = self.get(id)?;
        let grouped_svg = match session.current_grouping() {
            Some(g) => Some(serialize_svg(&grouped_doc(&session, g)?)),
            None => None,
        };
        Ok(SessionView {
            normalized_svg: serialize_svg(&session.flattened_doc),
            grouped_svg,
            session,
        })
    }

    /// Marks the session busy, or fails with 409 InFlight.
    fn begin(&self, id: &str) -> Result<(FlightGuard<'_>, Session), ApiError> {
        let session = self.get(id)?;
        let mut set = self.in_flight.lock().unwrap_or_else(|e| e.into_inner());
        if !set.insert(id.to_string()) {
            return Err(ApiError::in_flight());
        }
        Ok((
            FlightGuard {
                set: &self.in_flight,
                id: id.to_string(),
            },
            session,
        ))
    }

    fn commit(&self, mut session: Session) -> Result<Session, ApiError> {
        session.updated_at = now_ms();
        self.store.save(&session).map_err(io_error)?;
        self.sessions
            .write()
            .unwrap_or_else(|e| e.into_inner())
            .insert(session.id.clone(), session.clone());
        Ok(session)
    }

    pub fn create(&self, svg_text: &str, object_name: &str) -> Result<SessionView, ApiError> {
        let object_name = object_name.trim();
        if object_name.is_empty() {
            return Err(ApiError::invalid_request("object_name must not be empty"));
        }
        let flat = pipeline::load_flat(svg_text)?;
        let id = loop {
            let id = new_id();
            if !self.read().contains_key(&id) {
                break id;
            }
        };
        let now = now_ms();
        let mut session = Session {
            id: id.clone(),
            created_at: now,
            updated_at: now,
            object_name: object_name.to_string(),
            original_svg: svg_text.to_string(),
            flattened_doc: flat,
            grouping_history: Vec::new(),
            motion_history: Vec::new(),
            transcript: Vec::new(),
            state: SessionState::New,
            bundle: None,
        };
        note(&mut session, Speaker::System, format!("session created for {object_name:?}"));
        self.commit(session)?;
        self.view(&id)
    }

    pub fn decompose(&self, id: &str, req: &DecomposeRequest) -> Result<GroupingResponse, ApiError> {
        let (_guard, mut session) = self.begin(id)?;
        let outcome = match req.history_index {
            Some(i) => {
                let grouping = session
                    .grouping_history
                    .get(i)
                    .cloned()
                    .ok_or_else(|| bad_index("grouping", i, session.grouping_history.len()))?;
                note(&mut session, Speaker::System, format!("re-selected grouping #{i}"));
                pipeline::group(&session.flattened_doc, grouping, 0, Vec::new())?
            }
            None => {
                let ask = format!("decompose the {} into parts", session.object_name);
                note(&mut session, Speaker::User, ask);
                self.pipeline.decompose(&session.flattened_doc, &session.object_name)?
            }
        };
        self.finish_grouping(session, outcome)
    }

    pub fn refine(&self, id: &str, feedback: &str) -> Result<GroupingResponse, ApiError> {
        let (_guard, mut session) = self.begin(id)?;
        let current = session.current_grouping().cloned().ok_or_else(ApiError::not_decomposed)?;
        let outcome = self
            .pipeline
            .refine(&session.flattened_doc, &session.object_name, &current, feedback)?;
        note(&mut session, Speaker::User, feedback.trim());
        self.finish_grouping(session, outcome)
    }

    fn finish_grouping(&self, mut session: Session, outcome: GroupingOutcome) -> Result<GroupingResponse, ApiError> {
        for r in &outcome.responses {
            note(&mut session, Speaker::Assistant, r.clone());
        }
        session.grouping_history.push(outcome.grouping.clone());
        let motion_still_fits = session
            .current_motion()
            .filter(|m| validate_motion(m, &outcome.grouping).ok)
            .cloned();
        match (session.state, motion_still_fits) {
            (SessionState::Animated, Some(motion)) => {
                session.bundle = Some(
                    emit_bundle(&outcome.grouped_doc, &motion, &outcome.grouping)
                        .map_err(|e| ApiError::from(PipelineError::from(e)))?,
                );
            }
            _ => {
                session.state = SessionState::Decomposed;
                session.bundle = None;
            }
        }
        let session = self.commit(session)?;
        Ok(GroupingResponse {
            session_id: session.id.clone(),
            state: session.state,
            history_index: session.grouping_history.len() - 1,
            suggestions: outcome
                .grouping
                .groups
                .iter()
                .map(|g| (g.name.clone(), g.suggestions.clone()))
                .collect::<BTreeMap<_, _>>(),
            grouping: outcome.grouping,
            grouped_svg: outcome.grouped_svg,
            attempts: outcome.attempts,
        })
    }

    pub fn animate(&self, id: &str, req: &AnimateRequest) -> Result<AnimateResponse, ApiError> {
        let (_guard, mut session) = self.begin(id)?;
        let grouping = session.current_grouping().cloned().ok_or_else(ApiError::not_decomposed)?;
        let grouped = grouped_doc(&session, &grouping)?;

        let outcome = if let Some(i) = req.history_index {
            let motion = session
                .motion_history
                .get(i)
                .cloned()
                .ok_or_else(|| bad_index("motion", i, session.motion_history.len()))?;
            let report = validate_motion(&motion, &grouping);
            if !report.ok {
                return Err(ApiError::new(
                    StatusCode::BAD_REQUEST,
                    ErrorCode::ValidationFailed,
                    format!("motion #{i} does not fit the current grouping"),
                )
                .with_details(serde_json::to_value(&report).unwrap_or_default()));
            }
            note(&mut session, Speaker::System, format!("re-selected motion #{i}"));
            let bundle = emit_bundle(&grouped, &motion, &grouping).map_err(|e| ApiError::from(PipelineError::from(e)))?;
            pipeline::AnimationOutcome {
                motion,
                bundle,
                attempts: 0,
                responses: Vec::new(),
            }
        } else if let Some(dsl) = &req.dsl {
            note(&mut session, Speaker::User, dsl.clone());
            pipeline::animate_dsl(&grouped, &grouping, dsl)?
        } else {
            if let Some(g) = &req.global_prompt {
                note(&mut session, Speaker::User, g.clone());
            }
            for (group, prompt) in &req.prompts {
                note(&mut session, Speaker::User, format!("{group}: {prompt}"));
            }
            self.pipeline.animate_prompts(
                &grouped,
                &grouping,
                &req.prompts,
                req.global_prompt.as_deref(),
                session.current_motion(),
            )?
        };

        for r in &outcome.responses {
            note(&mut session, Speaker::Assistant, r.clone());
        }
        session.motion_history.push(outcome.motion.clone());
        session.bundle = Some(outcome.bundle.clone());
        session.state = SessionState::Animated;
        let session = self.commit(session)?;
        Ok(AnimateResponse {
            session_id: session.id.clone(),
            state: session.state,
            history_index: session.motion_history.len() - 1,
            motion: outcome.motion,
            bundle: outcome.bundle,
            attempts: outcome.attempts,
        })
    }

    /// The latest bundle, or the static grouped document before animation.
    fn current_bundle(&self, session: &Session) -> Result<AnimationBundle, ApiError> {
        if let Some(b) = &session.bundle {
            return Ok(b.clone());
        }
        let grouping = session.current_grouping().ok_or_else(ApiError::not_decomposed)?;
        let grouped = grouped_doc(session, grouping)?;
        emit_bundle(&grouped, &MotionSpec::default(), grouping).map_err(|e| ApiError::from(PipelineError::from(e)))
    }

    pub fn preview(&self, id: &str) -> Result<String, ApiError> {
        let session = self.get(id)?;
        Ok(emit_preview_html(&self.current_bundle(&session)?))
    }

    pub fn export(&self, id: &str) -> Result<ExportResponse, ApiError> {
        let session = self.get(id)?;
        let bundle = match (&session.state, &session.bundle) {
            (SessionState::Animated, Some(b)) => b,
            _ => {
                return Err(ApiError::new(
                    StatusCode::CONFLICT,
                    ErrorCode::NotAnimated,
                    "session has no animation to export yet",
                ))
            }
        };
        let dir = self.export_dir(id);
        write_bundle(bundle, &dir).map_err(io_error)?;
        Ok(ExportResponse {
            directory: dir.display().to_string(),
            files: BUNDLE_FILES.iter().map(|f| f.to_string()).collect(),
            manifest: bundle.manifest.clone(),
        })
    }
}

fn bad_index(kind: &str, i: usize, len: usize) -> ApiError {
    ApiError::new(
        StatusCode::BAD_REQUEST,
        ErrorCode::InvalidHistoryIndex,
        format!("{kind} history has {len} entries, index {i} is out of range"),
    )
}
