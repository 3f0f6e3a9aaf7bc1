use std::fmt::Write;

use super::document::{SvgDocument, SvgNode};
use super::markup::escape_attr;
use super::parse::SVG_NS;

/// Deterministic serialization. Node ids are emitted as `id` attributes,
/// all definitions go into one leading `<defs>` block.
pub fn serialize_svg(doc: &SvgDocument) -> String {
    let mut out = String::new();
    out.push_str("<svg xmlns=\"");
    out.push_str(SVG_NS);
    out.push('"');
    for (prefix, uri) in &doc.namespaces {
        let _ = write!(out, " xmlns:{prefix}=\"{}\"", escape_attr(uri));
    }
    for (k, v) in doc.root_attrs.iter() {
        let _ = write!(out, " {k}=\"{}\"", escape_attr(v));
    }
    out.push_str(">\n");
    if !doc.defs.is_empty() {
        out.push_str("  <defs>\n");
        for d in &doc.defs {
            out.push_str("    ");
            out.push_str(&d.markup);
            out.push('\n');
        }
        out.push_str("  </defs>\n");
    }
    for n in &doc.root_children {
        write_node(n, 1, &mut out);
    }
    out.push_str("</svg>\n");
    out
}

pub(crate) fn write_node(n: &SvgNode, depth: usize, out: &mut String) {
    let indent = "  ".repeat(depth);
    let tag = n.kind.tag();
    let _ = write!(out, "{indent}<{tag} id=\"{}\"", escape_attr(n.id.as_str()));
    for (k, v) in n.attrs.iter() {
        let _ = write!(out, " {k}=\"{}\"", escape_attr(v));
    }
    if let Some(content) = &n.content {
        let _ = writeln!(out, ">{content}</{tag}>");
    } else if n.children.is_empty() {
        out.push_str("/>\n");
    } else {
        out.push_str(">\n");
        for c in &n.children {
            write_node(c, depth + 1, out);
        }
        let _ = writeln!(out, "{indent}</{tag}>");
    }
}
