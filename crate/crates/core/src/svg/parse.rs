use std::collections::{BTreeMap, HashSet};

use sha2::{Digest, Sha256};

use super::document::{Attrs, Definition, NodeId, NodeKind, SvgDocument, SvgNode};
use super::markup::{escape_attr, escape_text};
use super::style::needs_atomic;
use crate::geom::{parse_path_data, parse_transform_list, Rect};

pub const SVG_NS: &str = "http://www.w3.org/2000/svg";
pub const XLINK_NS: &str = "http://www.w3.org/1999/xlink";
const XML_NS: &str = "http://www.w3.org/XML/1998/namespace";

/// Elements that make a document non-static or pull in foreign content.
const REJECTED: &[&str] = &[
    "script",
    "animate",
    "animateColor",
    "animateMotion",
    "animateTransform",
    "set",
    "foreignObject",
    "style",
    "iframe",
    "video",
    "audio",
    "canvas",
];

/// Non-rendering definitions, wherever they appear.
const DEFINITION_TAGS: &[&str] = &[
    "linearGradient",
    "radialGradient",
    "clipPath",
    "mask",
    "pattern",
    "filter",
    "symbol",
    "marker",
];

/// Non-rendering metadata that is dropped.
const IGNORED_TAGS: &[&str] = &["title", "desc", "metadata"];

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum SvgError {
    #[error("malformed XML at byte offset {offset}: {message}")]
    MalformedXml { offset: usize, message: String },
    #[error("unsupported SVG feature: <{0}>")]
    UnsupportedFeature(String),
    #[error("empty document")]
    EmptyDocument,
    #[error("invalid `{attribute}` on <{element}>: {message}")]
    InvalidAttribute {
        element: String,
        attribute: String,
        message: String,
    },
    #[error("reference to undefined element #{0}")]
    UnresolvedReference(String),
}

/// Parses SVG text into a document. Every render-tree node receives an id
/// `el-<n>` in pre-order; original ids move to `data-orig-id`.
pub fn parse_svg(text: &str) -> Result<SvgDocument, SvgError> {
    if text.trim().is_empty() {
        return Err(SvgError::EmptyDocument);
    }
    let opts = roxmltree::ParsingOptions {
        allow_dtd: true,
        ..Default::default()
    };
    let xml = roxmltree::Document::parse_with_options(text, opts).map_err(|e| {
        let offset = match e {
            roxmltree::Error::UnexpectedEndOfStream | roxmltree::Error::UnclosedRootNode => text.len(),
            _ => byte_offset(text, e.pos().row as usize, e.pos().col as usize),
        };
        SvgError::MalformedXml {
            offset,
            message: e.to_string(),
        }
    })?;
    let root = xml.root_element();
    if root.tag_name().name() != "svg" || !is_svg_ns(root.tag_name().namespace()) {
        return Err(SvgError::UnsupportedFeature(format!(
            "root element {}",
            root.tag_name().name()
        )));
    }
    for node in root.descendants().filter(|n| n.is_element()) {
        let name = node.tag_name().name();
        if is_svg_ns(node.tag_name().namespace()) && REJECTED.contains(&name) {
            return Err(SvgError::UnsupportedFeature(name.to_string()));
        }
    }

    let ns = Namespaces::collect(&root);
    let referenced = referenced_ids(&root);
    let mut builder = Builder {
        ns: &ns,
        referenced: &referenced,
        defs: Vec::new(),
        def_ids: HashSet::new(),
        next_id: 0,
    };
    let mut root_children = Vec::new();
    for child in root.children().filter(|n| n.is_element()) {
        if let Some(node) = builder.node(child)? {
            root_children.push(node);
        }
    }

    let root_attrs = builder.attrs_of(&root, false);
    let view_box = view_box_of(&root_attrs);
    let doc = SvgDocument {
        view_box,
        root_attrs,
        namespaces: ns.declared(),
        defs: builder.defs,
        root_children,
        source_hash: hex::encode(Sha256::digest(text.as_bytes())),
    };
    check_references(&doc)?;
    Ok(doc)
}

fn is_svg_ns(ns: Option<&str>) -> bool {
    matches!(ns, None | Some(SVG_NS))
}

fn byte_offset(text: &str, row: usize, col: usize) -> usize {
    let mut offset = 0;
    for (i, line) in text.split_inclusive('\n').enumerate() {
        if i + 1 == row {
            return offset
                + line
                    .char_indices()
                    .nth(col.saturating_sub(1))
                    .map_or(line.len(), |(b, _)| b);
        }
        offset += line.len();
    }
    text.len()
}

struct Namespaces {
    by_uri: BTreeMap<String, String>,
}

impl Namespaces {
    fn collect(root: &roxmltree::Node) -> Self {
        let mut by_uri = BTreeMap::new();
        for node in root.descendants().filter(|n| n.is_element()) {
            for ns in node.namespaces() {
                if let Some(prefix) = ns.name() {
                    if prefix != "xml" {
                        by_uri
                            .entry(ns.uri().to_string())
                            .or_insert_with(|| prefix.to_string());
                    }
                }
            }
        }
        Namespaces { by_uri }
    }

    fn qualify(&self, ns: Option<&str>, local: &str) -> String {
        match ns {
            None | Some(SVG_NS) => local.to_string(),
            Some(XML_NS) => format!("xml:{local}"),
            Some(uri) => match self.by_uri.get(uri) {
                Some(prefix) => format!("{prefix}:{local}"),
                None if uri == XLINK_NS => format!("xlink:{local}"),
                None => local.to_string(),
            },
        }
    }

    fn declared(&self) -> Vec<(String, String)> {
        let mut v: Vec<(String, String)> = self
            .by_uri
            .iter()
            .filter(|(uri, _)| uri.as_str() != SVG_NS)
            .map(|(uri, p)| (p.clone(), uri.clone()))
            .collect();
        v.sort();
        v.dedup_by(|a, b| a.0 == b.0);
        v
    }

    /// Serializes a subtree verbatim (comments and processing instructions dropped).
    fn markup(&self, node: roxmltree::Node, out: &mut String) {
        if node.is_text() {
            out.push_str(&escape_text(node.text().unwrap_or("")));
            return;
        }
        if !node.is_element() {
            return;
        }
        let tag = self.qualify(node.tag_name().namespace(), node.tag_name().name());
        out.push('<');
        out.push_str(&tag);
        for a in node.attributes() {
            out.push(' ');
            out.push_str(&self.qualify(a.namespace(), a.name()));
            out.push_str("=\"");
            out.push_str(&escape_attr(a.value()));
            out.push('"');
        }
        if node.has_children() {
            out.push('>');
            for c in node.children() {
                self.markup(c, out);
            }
            out.push_str("</");
            out.push_str(&tag);
            out.push('>');
        } else {
            out.push_str("/>");
        }
    }

    fn inner_markup(&self, node: roxmltree::Node) -> String {
        let mut s = String::new();
        for c in node.children() {
            self.markup(c, &mut s);
        }
        s
    }
}

struct Builder<'a> {
    ns: &'a Namespaces,
    referenced: &'a HashSet<String>,
    defs: Vec<Definition>,
    def_ids: HashSet<String>,
    next_id: usize,
}

impl Builder<'_> {
    fn add_def(&mut self, node: roxmltree::Node) {
        let Some(id) = node.attribute("id") else {
            return;
        };
        if self.def_ids.insert(id.to_string()) {
            let mut markup = String::new();
            self.ns.markup(node, &mut markup);
            self.defs.push(Definition {
                id: id.to_string(),
                markup,
            });
        }
    }

    fn attrs_of(&self, node: &roxmltree::Node, move_id: bool) -> Attrs {
        let mut attrs = Attrs::new();
        let mut orig_id = None;
        for a in node.attributes() {
            let name = self.ns.qualify(a.namespace(), a.name());
            if move_id && name == "id" {
                if !NodeId::is_canonical(a.value()) {
                    orig_id = Some(a.value().to_string());
                }
                continue;
            }
            attrs.set(&name, a.value());
        }
        if let Some(id) = orig_id {
            if !attrs.contains("data-orig-id") {
                attrs.set("data-orig-id", id);
            }
        }
        attrs
    }

    fn node(&mut self, el: roxmltree::Node) -> Result<Option<SvgNode>, SvgError> {
        if !is_svg_ns(el.tag_name().namespace()) {
            return Ok(None);
        }
        let tag = el.tag_name().name();
        if tag == "defs" {
            for c in el.children().filter(|n| n.is_element()) {
                self.add_def(c);
            }
            return Ok(None);
        }
        if DEFINITION_TAGS.contains(&tag) {
            self.add_def(el);
            return Ok(None);
        }
        if IGNORED_TAGS.contains(&tag) {
            return Ok(None);
        }
        let kind = NodeKind::from_tag(tag).ok_or_else(|| SvgError::UnsupportedFeature(tag.to_string()))?;
        // Render-tree elements referenced elsewhere (e.g. by <use>) are
        // also copied into defs so the reference keeps resolving.
        if el.attribute("id").is_some_and(|id| self.referenced.contains(id)) {
            self.add_def(el);
        }

        let attrs = self.attrs_of(&el, true);
        validate_attrs(tag, &attrs)?;
        let id = NodeId::canonical(self.next_id);
        self.next_id += 1;
        let mut node = SvgNode::leaf(id, kind, attrs);
        match kind {
            NodeKind::Group => {
                node.atomic = needs_atomic(&node.attrs);
                for c in el.children().filter(|n| n.is_element()) {
                    if let Some(child) = self.node(c)? {
                        node.children.push(child);
                    }
                }
            }
            NodeKind::Text => node.content = Some(self.ns.inner_markup(el)),
            _ => {}
        }
        Ok(Some(node))
    }
}

fn validate_attrs(tag: &str, attrs: &Attrs) -> Result<(), SvgError> {
    let invalid = |attribute: &str, message: String| SvgError::InvalidAttribute {
        element: tag.to_string(),
        attribute: attribute.to_string(),
        message,
    };
    if let Some(t) = attrs.get("transform") {
        parse_transform_list(t).map_err(|e| invalid("transform", e.to_string()))?;
    }
    if tag == "path" {
        if let Some(d) = attrs.get("d") {
            if !d.trim().is_empty() {
                parse_path_data(d).map_err(|e| invalid("d", e.to_string()))?;
            }
        }
    }
    Ok(())
}

fn view_box_of(attrs: &Attrs) -> Rect {
    if let Some(vb) = attrs.get("viewBox") {
        let nums: Vec<f64> = vb
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .filter_map(|s| s.parse().ok())
            .collect();
        if let [x, y, w, h] = nums[..] {
            return Rect::from_xywh(x, y, w, h);
        }
    }
    let len = |name| {
        attrs
            .get(name)
            .map(|v| v.trim().trim_end_matches("px"))
            .and_then(|v| v.parse::<f64>().ok())
    };
    Rect::from_xywh(0.0, 0.0, len("width").unwrap_or(300.0), len("height").unwrap_or(150.0))
}

/// Ids named by `url(#id)` values or local `href`s anywhere in the input.
fn referenced_ids(root: &roxmltree::Node) -> HashSet<String> {
    let mut out = HashSet::new();
    for node in root.descendants().filter(|n| n.is_element()) {
        for a in node.attributes() {
            collect_refs(a.name(), a.value(), &mut out);
        }
    }
    out
}

fn collect_refs(name: &str, value: &str, out: &mut HashSet<String>) {
    if name == "href" || name.ends_with(":href") {
        if let Some(id) = value.trim().strip_prefix('#') {
            out.insert(id.to_string());
        }
    }
    let mut rest = value;
    while let Some(i) = rest.find("url(") {
        rest = &rest[i + 4..];
        let inner = rest.trim_start().trim_start_matches(['"', '\'']);
        if let Some(id) = inner.strip_prefix('#') {
            let end = id.find([')', '"', '\'']).unwrap_or(id.len());
            out.insert(id[..end].trim().to_string());
        }
    }
}

fn check_references(doc: &SvgDocument) -> Result<(), SvgError> {
    let defined: HashSet<&str> = doc.defs.iter().map(|d| d.id.as_str()).collect();
    let mut wanted = HashSet::new();
    for n in doc.walk() {
        for (k, v) in n.attrs.iter() {
            collect_refs(k, v, &mut wanted);
        }
    }
    for d in &doc.defs {
        // definitions are re-read as XML to find nested references
        if let Ok(x) = roxmltree::Document::parse(&wrap_for_scan(&d.markup, &doc.namespaces)) {
            wanted.extend(referenced_ids(&x.root_element()));
        }
    }
    let mut missing: Vec<_> = wanted.iter().filter(|id| !defined.contains(id.as_str())).collect();
    missing.sort();
    match missing.first() {
        Some(id) => Err(SvgError::UnresolvedReference((*id).clone())),
        None => Ok(()),
    }
}

fn wrap_for_scan(markup: &str, namespaces: &[(String, String)]) -> String {
    let mut s = format!("<svg xmlns=\"{SVG_NS}\"");
    for (p, u) in namespaces {
        s.push_str(&format!(" xmlns:{p}=\"{}\"", escape_attr(u)));
    }
    if !namespaces.iter().any(|(p, _)| p == "xlink") {
        s.push_str(&format!(" xmlns:xlink=\"{XLINK_NS}\""));
    }
    s.push('>');
    s.push_str(markup);
    s.push_str("</svg>");
    s
}
