//! Semantic groupings over a flattened document.

mod apply;
mod refine;
mod spec;
mod validate;

pub use apply::{apply_grouping, fragment_ids, GroupingError};
pub use refine::{apply_refinement, RefinementEdit, RefinementError, SplitPart};
pub use spec::{is_slug, slugify, GroupSpec, GroupingSpec, REST_GROUP};
pub use validate::validate_and_complete;
