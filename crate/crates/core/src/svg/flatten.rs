use super::document::{Attrs, NodeId, NodeKind, SvgDocument, SvgNode};
use super::style::{declarations, needs_atomic, specified, INHERITED};
use crate::geom::Affine;

/// Dissolves every non-atomic group, composing its transform and copying
/// inherited presentation attributes onto its children, then renumbers ids
/// in paint order. Groups that need compositing (opacity, clip, mask,
/// filter) are kept whole and marked atomic.
pub fn flatten_and_assign_ids(doc: &SvgDocument) -> SvgDocument {
    let mut items = Vec::new();
    for n in &doc.root_children {
        flatten_into(n.clone(), Affine::IDENTITY, &mut items);
    }
    let mut next = 0;
    for n in &mut items {
        renumber(n, &mut next);
    }
    SvgDocument {
        view_box: doc.view_box,
        root_attrs: doc.root_attrs.clone(),
        namespaces: doc.namespaces.clone(),
        defs: doc.defs.clone(),
        root_children: items,
        source_hash: doc.source_hash.clone(),
    }
}

fn flatten_into(mut node: SvgNode, ctx: Affine, out: &mut Vec<SvgNode>) {
    if node.kind == NodeKind::Group && !node.atomic && needs_atomic(&node.attrs) {
        node.atomic = true;
    }
    if node.is_item() {
        if !ctx.is_identity() {
            let composed = ctx * node.transform();
            node.attrs.set("transform", composed.to_string());
        }
        out.push(node);
        return;
    }
    let local = ctx * node.transform();
    let inherited = inheritable(&node.attrs);
    for mut child in std::mem::take(&mut node.children) {
        inherit(&mut child.attrs, &inherited);
        flatten_into(child, local, out);
    }
}

fn inheritable(attrs: &Attrs) -> Vec<(&'static str, String)> {
    let decls = attrs.get("style").map(declarations).unwrap_or_default();
    INHERITED
        .iter()
        .filter_map(|&p| specified(attrs, &decls, p).map(|v| (p, v.to_string())))
        .collect()
}

fn inherit(child: &mut Attrs, from_parent: &[(&'static str, String)]) {
    if from_parent.is_empty() {
        return;
    }
    let decls = child.get("style").map(declarations).unwrap_or_default();
    let missing: Vec<_> = from_parent
        .iter()
        .filter(|(p, _)| specified(child, &decls, p).is_none())
        .cloned()
        .collect();
    for (p, v) in missing {
        child.set(p, v);
    }
}

fn renumber(n: &mut SvgNode, next: &mut usize) {
    n.id = NodeId::canonical(*next);
    *next += 1;
    for c in &mut n.children {
        renumber(c, next);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::svg::{leaf_sequence, parse_svg, serialize_svg};

    fn flat(src: &str) -> SvgDocument {
        flatten_and_assign_ids(&parse_svg(src).unwrap())
    }

    #[test]
    fn nested_translations_compose() {
        let d = flat(r#"<svg><g transform="translate(2 3)"><g transform="translate(1 1)"><rect width="1" height="1"/></g></g></svg>"#);
        assert_eq!(d.root_children.len(), 1);
        let r = &d.root_children[0];
        assert_eq!(r.kind, NodeKind::Rect);
        assert_eq!(r.transform(), Affine::translate(3.0, 4.0));
        assert_eq!(r.id.as_str(), "el-0");
    }

    #[test]
    fn fill_is_inherited() {
        let d = flat(r#"<svg><g fill="red"><path d="M0 0h1"/><path d="M0 0h1" fill="blue"/></g></svg>"#);
        assert_eq!(d.root_children[0].attrs.get("fill"), Some("red"));
        assert_eq!(d.root_children[1].attrs.get("fill"), Some("blue"));
    }

    #[test]
    fn style_counts_as_specified() {
        let d = flat(r#"<svg><g style="stroke: green"><path d="M0 0h1" style="stroke:black"/><path d="M0 0h1"/></g></svg>"#);
        assert!(!d.root_children[0].attrs.contains("stroke"));
        assert_eq!(d.root_children[1].attrs.get("stroke"), Some("green"));
    }

    #[test]
    fn translucent_group_kept_atomic() {
        let d = flat(r#"<svg><g opacity="0.5"><circle r="2"/><circle r="2" cx="1"/></g></svg>"#);
        assert_eq!(d.root_children.len(), 1);
        let g = &d.root_children[0];
        assert!(g.atomic);
        assert_eq!(g.children.len(), 2);
        assert_eq!(leaf_sequence(&d), vec![NodeId::from("el-0")]);
    }

    #[test]
    fn atomic_group_between_leaves() {
        let d = flat(r#"<svg><rect/><g opacity=".3"><rect/><rect/></g><rect/></svg>"#);
        let seq = leaf_sequence(&d);
        assert_eq!(seq.len(), 3);
        assert_eq!(seq[1], d.root_children[1].id);
        assert!(d.root_children[1].atomic);
    }

    #[test]
    fn rotate_then_translate_matrix() {
        let d = flat(r#"<svg><g transform="rotate(90)"><rect transform="translate(1 0)"/></g></svg>"#);
        let m = d.root_children[0].transform();
        assert!(m.max_abs_diff(&Affine::new(0.0, 1.0, -1.0, 0.0, 0.0, 1.0)) < 1e-12);
    }

    #[test]
    fn untransformed_leaves_keep_attributes() {
        let src = r#"<svg><g><rect x="1" transform="scale(2)"/></g></svg>"#;
        let d = flat(src);
        assert_eq!(d.root_children[0].attrs.get("transform"), Some("scale(2)"));
    }

    #[test]
    fn flatten_is_idempotent() {
        let d = flat(r#"<svg><g transform="rotate(30)" fill="red"><g opacity="0.4"><rect/></g><circle/></g></svg>"#);
        let again = flatten_and_assign_ids(&d);
        assert!(d.structurally_eq(&again));
        let reparsed = flatten_and_assign_ids(&parse_svg(&serialize_svg(&d)).unwrap());
        assert!(d.structurally_eq(&reparsed));
    }

    #[test]
    fn empty_root() {
        assert!(leaf_sequence(&flat("<svg></svg>")).is_empty());
    }
}
