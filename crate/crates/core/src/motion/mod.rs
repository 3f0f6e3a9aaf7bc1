//! Animation tracks, easings, and the motion DSL.

mod dsl;
mod easing;
mod keyframes;
mod spec;
mod validate;

pub use dsl::{parse_motion_dsl, parse_motion_dsl_unchecked, print_motion_dsl, DslError, DslParseError};
pub use easing::{
    bezier_coord, sample_easing, solve_bezier_x, Easing, EasingParseError, DEFAULT_ELASTIC_AMPLITUDE,
    DEFAULT_ELASTIC_PERIOD,
};
pub use keyframes::{expand_track_keyframes, DEFAULT_SAMPLES};
pub use spec::{Direction, GlobalSettings, Iterations, Keyframe, MotionSpec, Origin, Property, Track, Unit, Value};
pub use validate::{validate_motion, MAX_TRACKS_PER_GROUP, MIN_DURATION_MS};
