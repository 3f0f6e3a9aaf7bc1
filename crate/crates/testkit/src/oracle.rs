//! Reference computations used to check the production code.

use std::collections::BTreeMap;

use decomate_core::geom::{parse_transform_list, Affine, CubicBez, Point, Rect};
use decomate_core::svg::{NodeId, NodeKind, SvgDocument, SvgNode};

/// Properties whose value flows from an ancestor to a descendant that does
/// not specify it. `display` is listed because `none` on an ancestor hides
/// the subtree.
pub const INHERITABLE: &[&str] = &[
    "clip-rule",
    "color",
    "color-interpolation",
    "color-interpolation-filters",
    "color-rendering",
    "cursor",
    "direction",
    "display",
    "dominant-baseline",
    "fill",
    "fill-opacity",
    "fill-rule",
    "font",
    "font-family",
    "font-size",
    "font-size-adjust",
    "font-stretch",
    "font-style",
    "font-variant",
    "font-weight",
    "glyph-orientation-horizontal",
    "glyph-orientation-vertical",
    "image-rendering",
    "kerning",
    "letter-spacing",
    "marker",
    "marker-end",
    "marker-mid",
    "marker-start",
    "paint-order",
    "pointer-events",
    "shape-rendering",
    "stroke",
    "stroke-dasharray",
    "stroke-dashoffset",
    "stroke-linecap",
    "stroke-linejoin",
    "stroke-miterlimit",
    "stroke-opacity",
    "stroke-width",
    "text-anchor",
    "text-rendering",
    "visibility",
    "word-spacing",
    "writing-mode",
];

/// What a renderer sees for one item: its full user-space transform, the
/// effective value of every attribute and property, and for atomic groups
/// the contents with ids erased.
#[derive(Clone, Debug, PartialEq)]
pub struct ItemView {
    pub kind: NodeKind,
    pub transform: [f64; 6],
    pub props: BTreeMap<String, String>,
    pub subtree: Option<String>,
}

/// Item views in paint order, computed by walking the tree directly.
pub fn item_views(doc: &SvgDocument) -> Vec<ItemView> {
    let mut out = Vec::new();
    for n in &doc.root_children {
        walk(n, IDENTITY, &BTreeMap::new(), &mut out);
    }
    out
}

const IDENTITY: [f64; 6] = [1.0, 0.0, 0.0, 1.0, 0.0, 0.0];

pub fn mul(l: [f64; 6], r: [f64; 6]) -> [f64; 6] {
    [
        l[0] * r[0] + l[2] * r[1],
        l[1] * r[0] + l[3] * r[1],
        l[0] * r[2] + l[2] * r[3],
        l[1] * r[2] + l[3] * r[3],
        l[0] * r[4] + l[2] * r[5] + l[4],
        l[1] * r[4] + l[3] * r[5] + l[5],
    ]
}

pub fn max_coeff_diff(a: &[f64; 6], b: &[f64; 6]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn own_transform(n: &SvgNode) -> [f64; 6] {
    match n.attrs.get("transform") {
        Some(t) => parse_transform_list(t).expect("transform parses").coeffs(),
        None => IDENTITY,
    }
}

fn style_decls(style: &str) -> Vec<(String, String)> {
    style
        .split(';')
        .filter_map(|d| {
            let (k, v) = d.split_once(':')?;
            let (k, v) = (k.trim(), v.trim());
            (!k.is_empty() && !v.is_empty()).then(|| (k.to_ascii_lowercase(), v.to_string()))
        })
        .collect()
}

fn own_props(n: &SvgNode) -> BTreeMap<String, String> {
    let mut m = BTreeMap::new();
    for (k, v) in n.attrs.iter() {
        if k != "id" && k != "transform" && k != "style" {
            m.insert(k.to_string(), v.to_string());
        }
    }
    if let Some(style) = n.attrs.get("style") {
        for (k, v) in style_decls(style) {
            m.insert(k, v);
        }
    }
    m
}

fn walk(n: &SvgNode, ctx: [f64; 6], inherited: &BTreeMap<String, String>, out: &mut Vec<ItemView>) {
    let m = mul(ctx, own_transform(n));
    let mut props = own_props(n);
    for (k, v) in inherited {
        props.entry(k.clone()).or_insert_with(|| v.clone());
    }
    if n.kind != NodeKind::Group || n.atomic {
        out.push(ItemView {
            kind: n.kind,
            transform: m,
            props,
            subtree: n.atomic.then(|| erase_ids(&n.children)),
        });
        return;
    }
    let pass: BTreeMap<String, String> = props
        .into_iter()
        .filter(|(k, _)| INHERITABLE.contains(&k.as_str()))
        .collect();
    for c in &n.children {
        walk(c, m, &pass, out);
    }
}

fn erase_ids(children: &[SvgNode]) -> String {
    fn strip(n: &SvgNode) -> SvgNode {
        SvgNode {
            id: NodeId::new(""),
            children: n.children.iter().map(strip).collect(),
            ..n.clone()
        }
    }
    format!("{:?}", children.iter().map(strip).collect::<Vec<_>>())
}

/// Compares two documents item by item. Returns the first difference.
pub fn compare_rendering(original: &SvgDocument, candidate: &SvgDocument, tol: f64) -> Result<f64, String> {
    let a = item_views(original);
    let b = item_views(candidate);
    if a.len() != b.len() {
        return Err(format!("item count {} != {}", a.len(), b.len()));
    }
    let mut worst = 0.0f64;
    for (i, (x, y)) in a.iter().zip(&b).enumerate() {
        if x.kind != y.kind {
            return Err(format!("item {i}: kind {:?} != {:?}", x.kind, y.kind));
        }
        let d = max_coeff_diff(&x.transform, &y.transform);
        worst = worst.max(d);
        if d > tol {
            return Err(format!("item {i}: transform differs by {d:e}"));
        }
        if x.props != y.props {
            return Err(format!("item {i}: attributes {:?} != {:?}", x.props, y.props));
        }
        if x.subtree != y.subtree {
            return Err(format!("item {i}: atomic contents differ"));
        }
    }
    Ok(worst)
}

fn bez1(p0: f64, p1: f64, p2: f64, p3: f64, t: f64) -> f64 {
    let mt = 1.0 - t;
    mt * mt * mt * p0 + 3.0 * mt * mt * t * p1 + 3.0 * mt * t * t * p2 + t * t * t * p3
}

/// `cubic-bezier(x1, y1, x2, y2)` at progress `u`, by bisection on x(t).
/// Returns `(t, y(t))`.
pub fn bezier_easing_bisect(x1: f64, y1: f64, x2: f64, y2: f64, u: f64) -> (f64, f64) {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if bez1(0.0, x1, x2, 1.0, mid) < u {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = 0.5 * (lo + hi);
    (t, bez1(0.0, y1, y2, 1.0, t))
}

pub fn bezier_x(x1: f64, x2: f64, t: f64) -> f64 {
    bez1(0.0, x1, x2, 1.0, t)
}

pub fn bezier_y(y1: f64, y2: f64, t: f64) -> f64 {
    bez1(0.0, y1, y2, 1.0, t)
}

/// Extent of a cubic found by dense sampling plus golden-section refinement
/// around the best sample on each side of each axis.
pub fn cubic_extent(c: &CubicBez) -> Rect {
    const N: usize = 256;
    let coord = |t: f64, axis: usize| {
        let p = c.eval(t);
        if axis == 0 {
            p.x
        } else {
            p.y
        }
    };
    let mut r = Rect::from_point(c.p0).include(c.p3);
    for axis in 0..2 {
        for sign in [1.0f64, -1.0] {
            let f = |t: f64| sign * coord(t, axis);
            let best = (0..=N).max_by(|&i, &j| f(i as f64 / N as f64).total_cmp(&f(j as f64 / N as f64))).unwrap();
            let lo = (best as f64 - 1.0).max(0.0) / N as f64;
            let hi = (best as f64 + 1.0).min(N as f64) / N as f64;
            let t = golden_max(&f, lo, hi);
            r = r.include(c.eval(t));
        }
    }
    r
}

fn golden_max(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..100 {
        let a = hi - g * (hi - lo);
        let b = lo + g * (hi - lo);
        if f(a) < f(b) {
            lo = a;
        } else {
            hi = b;
        }
    }
    let mid = 0.5 * (lo + hi);
    [lo, mid, hi].into_iter().max_by(|x, y| f(*x).total_cmp(&f(*y))).unwrap()
}

/// Center parameterization of an SVG arc: `(cx, cy, rx, ry)` with radii
/// scaled up when they cannot span the endpoints.
pub fn arc_center(from: Point, rx: f64, ry: f64, phi_deg: f64, large: bool, sweep: bool, to: Point) -> (f64, f64, f64, f64) {
    let phi = phi_deg.to_radians();
    let (s, c) = phi.sin_cos();
    let hx = (from.x - to.x) / 2.0;
    let hy = (from.y - to.y) / 2.0;
    let xp = c * hx + s * hy;
    let yp = -s * hx + c * hy;
    let (mut rx, mut ry) = (rx.abs(), ry.abs());
    let lam = (xp / rx).powi(2) + (yp / ry).powi(2);
    if lam > 1.0 {
        rx *= lam.sqrt();
        ry *= lam.sqrt();
    }
    let num = (rx * ry).powi(2) - (rx * yp).powi(2) - (ry * xp).powi(2);
    let den = (rx * yp).powi(2) + (ry * xp).powi(2);
    let mut k = (num / den).max(0.0).sqrt();
    if large == sweep {
        k = -k;
    }
    let cxp = k * rx * yp / ry;
    let cyp = -k * ry * xp / rx;
    (
        c * cxp - s * cyp + (from.x + to.x) / 2.0,
        s * cxp + c * cyp + (from.y + to.y) / 2.0,
        rx,
        ry,
    )
}

/// `|r - 1|` for `p` mapped into the unit-circle frame of the ellipse. The
/// distance from `p` to the ellipse is at most this times the larger radius.
pub fn ellipse_radial_error(p: Point, cx: f64, cy: f64, rx: f64, ry: f64, phi_deg: f64) -> f64 {
    let inv = (Affine::translate(cx, cy) * Affine::rotate(phi_deg) * Affine::scale(rx, ry)).coeffs();
    let det = inv[0] * inv[3] - inv[1] * inv[2];
    let (dx, dy) = (p.x - inv[4], p.y - inv[5]);
    let ux = (inv[3] * dx - inv[2] * dy) / det;
    let uy = (-inv[1] * dx + inv[0] * dy) / det;
    (ux.hypot(uy) - 1.0).abs()
}
