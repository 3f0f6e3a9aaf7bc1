//! Deterministic HTML/CSS/JS output for a grouped document and its motion.

mod bundle;
mod css;

pub use bundle::{emit_bundle, emit_preview_html, write_bundle, AnimationBundle, BundleManifest, CodegenError, BUNDLE_FILES};
pub use css::{emit_keyframes, keyframes_name, timing_function};
