//! Canonical SVG document model: parsing, flattening and serialization.

mod document;
mod flatten;
mod markup;
mod parse;
mod serialize;
mod style;

pub use document::{leaf_sequence, Attrs, Definition, NodeId, NodeKind, SvgDocument, SvgNode};
pub use flatten::flatten_and_assign_ids;
pub(crate) use markup::escape_text;
pub use parse::{parse_svg, SvgError, SVG_NS, XLINK_NS};
pub use serialize::serialize_svg;
