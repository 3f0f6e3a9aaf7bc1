//! Per-element geometry for bounding boxes of document nodes.

use super::path::{arc_to_cubics, PathData};
use super::{parse_path_data, Affine, Point, Rect};
use crate::svg::{parse_svg, NodeId, NodeKind, SvgDocument, SvgNode};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum BBoxError {
    #[error("unknown node id {0}")]
    UnknownNodeId(NodeId),
    #[error("empty group")]
    EmptyGroup,
}

/// Union of the members' geometric bounding boxes in root user space.
/// Stroke width is not included.
pub fn group_bbox(doc: &SvgDocument, members: &[NodeId]) -> Result<Rect, BBoxError> {
    if members.is_empty() {
        return Err(BBoxError::EmptyGroup);
    }
    let mut out: Option<Rect> = None;
    for id in members {
        let node = doc.find(id).ok_or_else(|| BBoxError::UnknownNodeId(id.clone()))?;
        let ctx = doc
            .composed_transform_of(id)
            .unwrap_or(Affine::IDENTITY)
            * node.transform().inverse_or_identity();
        if let Some(r) = node_bbox(doc, node, &ctx) {
            out = Some(out.map_or(r, |o| o.union(r)));
        }
    }
    // Members without any geometry still anchor at the transformed origin.
    Ok(out.unwrap_or_else(|| {
        let p = doc
            .composed_transform_of(&members[0])
            .unwrap_or(Affine::IDENTITY)
            .apply(Point::default());
        Rect::from_point(p)
    }))
}

/// Bounding box of `node` (its own transform included) under the parent
/// transform `ctx`.
pub fn node_bbox(doc: &SvgDocument, node: &SvgNode, ctx: &Affine) -> Option<Rect> {
    let m = *ctx * node.transform();
    let len = |name: &str| length(node.attrs.get(name));
    match node.kind {
        NodeKind::Circle => {
            let r = len("r");
            Some(ellipse_bbox(&m, len("cx"), len("cy"), r, r))
        }
        NodeKind::Ellipse => {
            let (rx, ry) = ellipse_radii(node);
            Some(ellipse_bbox(&m, len("cx"), len("cy"), rx, ry))
        }
        NodeKind::Group => node
            .children
            .iter()
            .filter_map(|c| node_bbox(doc, c, &m))
            .reduce(Rect::union),
        NodeKind::Image => {
            let r = Rect::from_xywh(len("x"), len("y"), len("width"), len("height"));
            Rect::from_points(r.corners().map(|p| m.apply(p)))
        }
        NodeKind::UseReference => use_bbox(doc, node, &m),
        NodeKind::Text => {
            let x = first_number(node.attrs.get("x"));
            let y = first_number(node.attrs.get("y"));
            let size = node
                .attrs
                .get("font-size")
                .map(|v| length(Some(v)))
                .filter(|s| *s > 0.0)
                .unwrap_or(16.0);
            let chars = node.content.as_deref().map(visible_chars).unwrap_or(0) as f64;
            // Font metrics are unavailable; estimate an average advance.
            let r = Rect::new(x, y - size, x + 0.6 * size * chars, y);
            Rect::from_points(r.corners().map(|p| m.apply(p)))
        }
        _ => node_outline(node).and_then(|p| p.transformed(&m).bbox()),
    }
}

/// Local-coordinate outline of a shape or path element.
pub fn node_outline(node: &SvgNode) -> Option<PathData> {
    let len = |name: &str| length(node.attrs.get(name));
    let mut p = PathData::default();
    match node.kind {
        NodeKind::Path => return node.attrs.get("d").and_then(|d| parse_path_data(d).ok()),
        NodeKind::Rect => {
            let (x, y, w, h) = (len("x"), len("y"), len("width"), len("height"));
            let (rx, ry) = rect_radii(node, w, h);
            if rx > 0.0 && ry > 0.0 {
                p.move_to(Point::new(x + rx, y));
                p.line_to(Point::new(x + w - rx, y));
                corner(&mut p, rx, ry, Point::new(x + w, y + ry));
                p.line_to(Point::new(x + w, y + h - ry));
                corner(&mut p, rx, ry, Point::new(x + w - rx, y + h));
                p.line_to(Point::new(x + rx, y + h));
                corner(&mut p, rx, ry, Point::new(x, y + h - ry));
                p.line_to(Point::new(x, y + ry));
                corner(&mut p, rx, ry, Point::new(x + rx, y));
            } else {
                p.move_to(Point::new(x, y));
                p.line_to(Point::new(x + w, y));
                p.line_to(Point::new(x + w, y + h));
                p.line_to(Point::new(x, y + h));
            }
            p.close();
        }
        NodeKind::Circle | NodeKind::Ellipse => {
            let (rx, ry) = if node.kind == NodeKind::Circle {
                (len("r"), len("r"))
            } else {
                ellipse_radii(node)
            };
            let (cx, cy) = (len("cx"), len("cy"));
            p.move_to(Point::new(cx + rx, cy));
            for end in [
                Point::new(cx, cy + ry),
                Point::new(cx - rx, cy),
                Point::new(cx, cy - ry),
                Point::new(cx + rx, cy),
            ] {
                corner(&mut p, rx, ry, end);
            }
            p.close();
        }
        NodeKind::Line => {
            p.move_to(Point::new(len("x1"), len("y1")));
            p.line_to(Point::new(len("x2"), len("y2")));
        }
        NodeKind::Polyline | NodeKind::Polygon => {
            let nums = numbers(node.attrs.get("points").unwrap_or(""));
            let mut pts = nums.chunks_exact(2).map(|c| Point::new(c[0], c[1]));
            p.move_to(pts.next()?);
            for q in pts {
                p.line_to(q);
            }
            if node.kind == NodeKind::Polygon {
                p.close();
            }
        }
        _ => return None,
    }
    Some(p)
}

fn corner(p: &mut PathData, rx: f64, ry: f64, to: Point) {
    for seg in arc_to_cubics(p.current(), rx, ry, 0.0, false, true, to) {
        p.push(seg);
    }
}

fn ellipse_bbox(m: &Affine, cx: f64, cy: f64, rx: f64, ry: f64) -> Rect {
    let c = m.apply(Point::new(cx, cy));
    let hw = (m.a * rx).hypot(m.c * ry);
    let hh = (m.b * rx).hypot(m.d * ry);
    Rect::new(c.x - hw, c.y - hh, c.x + hw, c.y + hh)
}

fn ellipse_radii(node: &SvgNode) -> (f64, f64) {
    let rx = node.attrs.get("rx").filter(|v| v.trim() != "auto");
    let ry = node.attrs.get("ry").filter(|v| v.trim() != "auto");
    match (rx, ry) {
        (Some(x), Some(y)) => (length(Some(x)), length(Some(y))),
        (Some(x), None) => (length(Some(x)), length(Some(x))),
        (None, Some(y)) => (length(Some(y)), length(Some(y))),
        (None, None) => (0.0, 0.0),
    }
}

fn rect_radii(node: &SvgNode, w: f64, h: f64) -> (f64, f64) {
    let (rx, ry) = ellipse_radii(node);
    (rx.clamp(0.0, w / 2.0), ry.clamp(0.0, h / 2.0))
}

fn use_bbox(doc: &SvgDocument, node: &SvgNode, m: &Affine) -> Option<Rect> {
    let len = |name: &str| length(node.attrs.get(name));
    let placed = *m * Affine::translate(len("x"), len("y"));
    let href = node
        .attrs
        .get("href")
        .or_else(|| node.attrs.get("xlink:href"))
        .and_then(|h| h.strip_prefix('#'));
    let from_def = href
        .and_then(|id| doc.defs.iter().find(|d| d.id == id))
        .and_then(|d| parse_svg(&format!("<svg>{}</svg>", d.markup)).ok())
        .and_then(|inner| {
            inner
                .root_children
                .iter()
                .filter_map(|n| node_bbox(&inner, n, &placed))
                .reduce(Rect::union)
        });
    from_def.or_else(|| {
        let r = Rect::from_xywh(0.0, 0.0, len("width"), len("height"));
        Rect::from_points(r.corners().map(|p| placed.apply(p)))
    })
}

fn length(v: Option<&str>) -> f64 {
    let Some(v) = v else { return 0.0 };
    let v = v.trim();
    let v = v.strip_suffix("px").unwrap_or(v);
    v.trim().parse().unwrap_or(0.0)
}

fn first_number(v: Option<&str>) -> f64 {
    numbers(v.unwrap_or("")).first().copied().unwrap_or(0.0)
}

fn numbers(s: &str) -> Vec<f64> {
    let mut cur = super::lexer::Cursor::new(s);
    let mut out = Vec::new();
    loop {
        cur.skip_comma_ws();
        match cur.number() {
            Some(v) => out.push(v),
            None => return out,
        }
    }
}

fn visible_chars(markup: &str) -> usize {
    let mut in_tag = false;
    let mut n = 0;
    for ch in markup.chars() {
        match ch {
            '<' => in_tag = true,
            '>' => in_tag = false,
            _ if !in_tag => n += 1,
            _ => {}
        }
    }
    n
}

impl Affine {
    /// Inverse matrix, or identity when singular.
    pub fn inverse_or_identity(&self) -> Affine {
        let det = self.a * self.d - self.b * self.c;
        if det == 0.0 || !det.is_finite() {
            return Affine::IDENTITY;
        }
        let inv = 1.0 / det;
        Affine::new(
            self.d * inv,
            -self.b * inv,
            -self.c * inv,
            self.a * inv,
            (self.c * self.f - self.d * self.e) * inv,
            (self.b * self.e - self.a * self.f) * inv,
        )
    }
}
