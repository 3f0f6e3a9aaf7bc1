//! Model access: prompts, transports, response parsing, and repair.

mod parse;
mod prompts;
mod repair;
mod request;
mod transport;

pub use parse::{
    extract_json, parse_decomposition_response, parse_motion_response, ErrorCode, RepairableError, RepairableErrors,
};
pub use prompts::{
    build_decomposition_request, build_motion_request, build_refinement_request, NoRasterizer, Rasterizer,
    DECOMPOSITION_TEMPERATURE, MOTION_TEMPERATURE,
};
pub use repair::{run_with_repair, RepairError, RepairPolicy, Repaired};
pub use request::{ChatRequest, ChatResponse, Role, Turn, Usage, UserPart};
pub use transport::{
    build_transport, transport_complete, LiveTransport, RecordingTransport, ReplayTransport, ScriptedTransport,
    Transport, TransportConfig, TransportError, TransportMode, DEFAULT_API_KEY_ENV, DEFAULT_ENDPOINT, DEFAULT_MODEL,
};
