use std::collections::HashMap;

use super::spec::GroupingSpec;
use super::validate::validate_and_complete;
use crate::report::ValidationReport;
use crate::svg::{Attrs, NodeId, NodeKind, SvgDocument, SvgNode};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum GroupingError {
    #[error("grouping is not a valid partition of the document")]
    InvalidSpec(ValidationReport),
    #[error("document is not flattened: group {0} carries attributes")]
    NotFlattened(NodeId),
}

/// Wraps items into semantic groups without changing paint order. Each
/// maximal run of consecutive items of one group becomes a fragment
/// `<g id="<name>-<k>" class="<name>">`.
pub fn apply_grouping(doc: &SvgDocument, spec: &GroupingSpec) -> Result<SvgDocument, GroupingError> {
    let (completed, report) = validate_and_complete(doc, spec);
    if !report.ok || completed != *spec {
        return Err(GroupingError::InvalidSpec(report));
    }
    let owner: HashMap<&NodeId, &str> = spec
        .groups
        .iter()
        .flat_map(|g| g.members.iter().map(move |m| (m, g.name.as_str())))
        .collect();

    let mut items = Vec::new();
    for n in &doc.root_children {
        collect_items(n, &mut items)?;
    }

    let mut fragments: HashMap<&str, usize> = HashMap::new();
    let mut wrappers: Vec<SvgNode> = Vec::new();
    let mut current: Option<&str> = None;
    for item in items {
        let group = owner[&item.id];
        if current != Some(group) {
            let k = fragments.entry(group).or_insert(0);
            let mut attrs = Attrs::new();
            attrs.set("class", group);
            wrappers.push(SvgNode {
                id: NodeId::new(format!("{group}-{k}")),
                kind: NodeKind::Group,
                attrs,
                children: Vec::new(),
                atomic: false,
                content: None,
            });
            *k += 1;
            current = Some(group);
        }
        wrappers.last_mut().expect("wrapper pushed above").children.push(item.clone());
    }

    Ok(SvgDocument {
        root_children: wrappers,
        ..doc.clone()
    })
}

/// Items of a flat (or previously grouped) document. Only attribute-free
/// wrapper groups may be looked through.
fn collect_items<'a>(n: &'a SvgNode, out: &mut Vec<&'a SvgNode>) -> Result<(), GroupingError> {
    if n.is_item() {
        out.push(n);
        return Ok(());
    }
    if n.attrs.iter().any(|(k, _)| k != "class" && k != "data-orig-id") {
        return Err(GroupingError::NotFlattened(n.id.clone()));
    }
    for c in &n.children {
        collect_items(c, out)?;
    }
    Ok(())
}

/// Fragment wrapper ids of `group` in `doc`, in paint order.
pub fn fragment_ids(doc: &SvgDocument, group: &str) -> Vec<NodeId> {
    doc.walk()
        .into_iter()
        .filter(|n| n.kind == NodeKind::Group && !n.atomic && n.attrs.get("class") == Some(group))
        .map(|n| n.id.clone())
        .collect()
}
