use std::fmt;

use serde::{Deserialize, Serialize};

use crate::geom::{parse_transform_list, Affine, Rect};

/// Canonical element id of the form `el-<index>`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(String);

impl NodeId {
    pub fn new(value: impl Into<String>) -> Self {
        NodeId(value.into())
    }

    pub fn canonical(index: usize) -> Self {
        NodeId(format!("el-{index}"))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Whether `s` looks like an id this crate assigns.
    pub fn is_canonical(s: &str) -> bool {
        s.strip_prefix("el-")
            .is_some_and(|rest| !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()))
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId(s.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NodeKind {
    Path,
    Rect,
    Circle,
    Ellipse,
    Line,
    Polyline,
    Polygon,
    Text,
    Image,
    Group,
    UseReference,
}

impl NodeKind {
    pub fn tag(self) -> &'static str {
        match self {
            NodeKind::Path => "path",
            NodeKind::Rect => "rect",
            NodeKind::Circle => "circle",
            NodeKind::Ellipse => "ellipse",
            NodeKind::Line => "line",
            NodeKind::Polyline => "polyline",
            NodeKind::Polygon => "polygon",
            NodeKind::Text => "text",
            NodeKind::Image => "image",
            NodeKind::Group => "g",
            NodeKind::UseReference => "use",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        Some(match tag {
            "path" => NodeKind::Path,
            "rect" => NodeKind::Rect,
            "circle" => NodeKind::Circle,
            "ellipse" => NodeKind::Ellipse,
            "line" => NodeKind::Line,
            "polyline" => NodeKind::Polyline,
            "polygon" => NodeKind::Polygon,
            "text" => NodeKind::Text,
            "image" => NodeKind::Image,
            "g" => NodeKind::Group,
            "use" => NodeKind::UseReference,
            _ => return None,
        })
    }
}

/// Attribute map that keeps insertion order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Attrs(Vec<(String, String)>);

impl Attrs {
    pub fn new() -> Self {
        Attrs(Vec::new())
    }

    pub fn get(&self, name: &str) -> Option<&str> {
        self.0
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, v)| v.as_str())
    }

    pub fn contains(&self, name: &str) -> bool {
        self.0.iter().any(|(k, _)| k == name)
    }

    /// Replaces an existing value in place, or appends.
    pub fn set(&mut self, name: &str, value: impl Into<String>) {
        let value = value.into();
        match self.0.iter_mut().find(|(k, _)| k == name) {
            Some(slot) => slot.1 = value,
            None => self.0.push((name.to_string(), value)),
        }
    }

    pub fn remove(&mut self, name: &str) -> Option<String> {
        let idx = self.0.iter().position(|(k, _)| k == name)?;
        Some(self.0.remove(idx).1)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<K: Into<String>, V: Into<String>> FromIterator<(K, V)> for Attrs {
    fn from_iter<I: IntoIterator<Item = (K, V)>>(iter: I) -> Self {
        Attrs(iter.into_iter().map(|(k, v)| (k.into(), v.into())).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SvgNode {
    pub id: NodeId,
    pub kind: NodeKind,
    pub attrs: Attrs,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<SvgNode>,
    /// A group that must not be dissolved.
    #[serde(default)]
    pub atomic: bool,
    /// Verbatim inner markup of `text` elements.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub content: Option<String>,
}

impl SvgNode {
    pub fn leaf(id: NodeId, kind: NodeKind, attrs: Attrs) -> Self {
        SvgNode {
            id,
            kind,
            attrs,
            children: Vec::new(),
            atomic: false,
            content: None,
        }
    }

    /// The node's own `transform` attribute as a matrix.
    pub fn transform(&self) -> Affine {
        self.attrs
            .get("transform")
            .and_then(|t| parse_transform_list(t).ok())
            .unwrap_or(Affine::IDENTITY)
    }

    /// Leaves and atomic groups are the units of semantic grouping.
    pub fn is_item(&self) -> bool {
        self.kind != NodeKind::Group || self.atomic
    }
}

/// A referenced definition (gradient, clip path, filter, ...) kept as markup.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Definition {
    pub id: String,
    pub markup: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SvgDocument {
    pub view_box: Rect,
    /// Attributes of the root `svg` element, verbatim.
    pub root_attrs: Attrs,
    /// Prefixed namespace declarations (`prefix`, `uri`) needed by attributes.
    #[serde(default)]
    pub namespaces: Vec<(String, String)>,
    pub defs: Vec<Definition>,
    pub root_children: Vec<SvgNode>,
    pub source_hash: String,
}

impl SvgDocument {
    /// Equality of everything except the digest of the original input text.
    pub fn structurally_eq(&self, other: &SvgDocument) -> bool {
        self.view_box == other.view_box
            && self.root_attrs == other.root_attrs
            && self.namespaces == other.namespaces
            && self.defs == other.defs
            && self.root_children == other.root_children
    }

    /// Every node in depth-first pre-order (paint order).
    pub fn walk(&self) -> Vec<&SvgNode> {
        fn go<'a>(n: &'a SvgNode, out: &mut Vec<&'a SvgNode>) {
            out.push(n);
            for c in &n.children {
                go(c, out);
            }
        }
        let mut out = Vec::new();
        for n in &self.root_children {
            go(n, &mut out);
        }
        out
    }

    /// Leaves and atomic groups in paint order, descending only into
    /// dissolvable groups.
    pub fn items(&self) -> Vec<&SvgNode> {
        fn go<'a>(n: &'a SvgNode, out: &mut Vec<&'a SvgNode>) {
            if n.is_item() {
                out.push(n);
            } else {
                for c in &n.children {
                    go(c, out);
                }
            }
        }
        let mut out = Vec::new();
        for n in &self.root_children {
            go(n, &mut out);
        }
        out
    }

    pub fn find(&self, id: &NodeId) -> Option<&SvgNode> {
        self.walk().into_iter().find(|n| &n.id == id)
    }

    /// Each item's transform composed with all ancestor transforms, in paint order.
    pub fn composed_item_transforms(&self) -> Vec<(NodeId, Affine)> {
        fn go(n: &SvgNode, ctx: Affine, out: &mut Vec<(NodeId, Affine)>) {
            let m = ctx * n.transform();
            if n.is_item() {
                out.push((n.id.clone(), m));
            } else {
                for c in &n.children {
                    go(c, m, out);
                }
            }
        }
        let mut out = Vec::new();
        for n in &self.root_children {
            go(n, Affine::IDENTITY, &mut out);
        }
        out
    }

    pub fn composed_transform_of(&self, id: &NodeId) -> Option<Affine> {
        fn go(n: &SvgNode, ctx: Affine, id: &NodeId) -> Option<Affine> {
            let m = ctx * n.transform();
            if &n.id == id {
                return Some(m);
            }
            n.children.iter().find_map(|c| go(c, m, id))
        }
        self.root_children
            .iter()
            .find_map(|n| go(n, Affine::IDENTITY, id))
    }
}

/// Leaves and atomic groups, in paint order.
pub fn leaf_sequence(doc: &SvgDocument) -> Vec<NodeId> {
    doc.items().into_iter().map(|n| n.id.clone()).collect()
}
