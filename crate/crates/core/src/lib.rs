//! Restructure SVG graphics into animation-ready groups, author motion for
//! each group, and compile the result into a self-contained HTML/CSS/JS bundle.

pub mod codegen;
pub mod geom;
pub mod grouping;
pub mod llm;
pub mod motion;
pub mod num;
pub mod pipeline;
pub mod report;
pub mod svg;
