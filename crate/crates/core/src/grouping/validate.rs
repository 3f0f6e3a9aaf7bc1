use std::collections::{HashMap, HashSet};

use super::spec::{slugify, GroupSpec, GroupingSpec, REST_GROUP};
use crate::report::{IssueCode, ValidationReport};
use crate::svg::{leaf_sequence, NodeId, SvgDocument};

/// Checks `spec` against the document's items and completes it into a
/// partition: names are slugged and de-duplicated, unknown and repeated
/// members are errors, and uncovered items land in a trailing `rest` group.
pub fn validate_and_complete(doc: &SvgDocument, spec: &GroupingSpec) -> (GroupingSpec, ValidationReport) {
    let items = leaf_sequence(doc);
    let known: HashSet<&NodeId> = items.iter().collect();
    let mut report = ValidationReport::default();
    let mut seen: HashSet<NodeId> = HashSet::new();
    let mut names: HashMap<String, usize> = HashMap::new();
    let mut groups: Vec<GroupSpec> = Vec::with_capacity(spec.groups.len() + 1);

    for g in &spec.groups {
        let mut name = slugify(&g.name);
        if name != g.name {
            report.warning(
                IssueCode::NameSlugged,
                &g.name,
                format!("group name {:?} normalized to {name:?}", g.name),
            );
        }
        let base = name.clone();
        let mut k = 1;
        while names.contains_key(&name) {
            k += 1;
            name = format!("{base}-{k}");
        }
        if k > 1 {
            report.warning(
                IssueCode::NameSlugged,
                &g.name,
                format!("group name {base:?} already used; renamed to {name:?}"),
            );
        }

        if g.members.is_empty() {
            report.error(IssueCode::EmptyGroup, &name, format!("group {name:?} has no members"));
            continue;
        }
        let mut members = Vec::with_capacity(g.members.len());
        for m in &g.members {
            if !known.contains(m) {
                report.error(
                    IssueCode::UnknownNodeId,
                    m.as_str(),
                    format!("{m} is not a groupable element id (group {name:?})"),
                );
            } else if !seen.insert(m.clone()) {
                report.error(
                    IssueCode::DuplicateMember,
                    m.as_str(),
                    format!("{m} appears in more than one group (again in {name:?})"),
                );
            } else {
                members.push(m.clone());
            }
        }
        if members.is_empty() {
            continue;
        }
        names.insert(name.clone(), groups.len());
        groups.push(GroupSpec {
            name,
            members,
            suggestions: g.suggestions.clone(),
        });
    }

    let uncovered: Vec<NodeId> = items.into_iter().filter(|id| !seen.contains(id)).collect();
    if !uncovered.is_empty() {
        let listed = uncovered.iter().map(NodeId::as_str).collect::<Vec<_>>().join(", ");
        report.warning(
            IssueCode::UncoveredLeaves,
            REST_GROUP,
            format!("elements not in any group were collected into {REST_GROUP:?}: {listed}"),
        );
        match names.get(REST_GROUP) {
            Some(&i) => groups[i].members.extend(uncovered),
            None => groups.push(GroupSpec {
                name: REST_GROUP.to_string(),
                members: uncovered,
                suggestions: Vec::new(),
            }),
        }
    }

    let completed = GroupingSpec {
        object_name: spec.object_name.clone(),
        groups,
    };
    (completed, report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::svg::{flatten_and_assign_ids, parse_svg};

    fn four_leaves() -> SvgDocument {
        flatten_and_assign_ids(&parse_svg("<svg><rect/><rect/><rect/><rect/></svg>").unwrap())
    }

    fn spec(groups: &[(&str, &[&str])]) -> GroupingSpec {
        GroupingSpec {
            object_name: "dog".into(),
            groups: groups
                .iter()
                .map(|(n, m)| GroupSpec {
                    name: n.to_string(),
                    members: m.iter().map(|s| NodeId::from(*s)).collect(),
                    suggestions: vec![],
                })
                .collect(),
        }
    }

    #[test]
    fn full_partition_unchanged() {
        let s = spec(&[("head", &["el-0", "el-1"]), ("tail", &["el-2", "el-3"])]);
        let (out, report) = validate_and_complete(&four_leaves(), &s);
        assert!(report.ok);
        assert!(report.issues.is_empty());
        assert_eq!(out, s);
    }

    #[test]
    fn uncovered_goes_to_rest() {
        let s = spec(&[("head", &["el-0", "el-1", "el-3"])]);
        let (out, report) = validate_and_complete(&four_leaves(), &s);
        assert!(report.ok);
        assert!(report.has(IssueCode::UncoveredLeaves));
        let rest = out.group("rest").unwrap();
        assert_eq!(rest.members, vec![NodeId::from("el-2")]);
    }

    #[test]
    fn duplicate_member_is_error() {
        let s = spec(&[("a", &["el-0", "el-1"]), ("b", &["el-1", "el-2", "el-3"])]);
        let (_, report) = validate_and_complete(&four_leaves(), &s);
        assert!(!report.ok);
        let dup = report.errors().next().unwrap();
        assert_eq!(dup.code, IssueCode::DuplicateMember);
        assert_eq!(dup.subject, "el-1");
    }

    #[test]
    fn unknown_and_empty() {
        let s = spec(&[("a", &["el-0", "el-99"]), ("b", &[])]);
        let (_, report) = validate_and_complete(&four_leaves(), &s);
        assert!(!report.ok);
        assert!(report.has(IssueCode::UnknownNodeId));
        assert!(report.has(IssueCode::EmptyGroup));
    }

    #[test]
    fn names_slugged_and_deduplicated() {
        let s = spec(&[("Left Ear", &["el-0"]), ("left-ear", &["el-1"]), ("rest", &["el-2"])]);
        let (out, report) = validate_and_complete(&four_leaves(), &s);
        assert!(report.ok);
        assert_eq!(out.group_names(), vec!["left-ear", "left-ear-2", "rest"]);
        // existing rest group absorbs uncovered items
        assert_eq!(out.group("rest").unwrap().members.len(), 2);
    }

    #[test]
    fn atomic_children_are_not_groupable() {
        let doc = flatten_and_assign_ids(&parse_svg(r#"<svg><g opacity="0.5"><rect/></g></svg>"#).unwrap());
        let (_, report) = validate_and_complete(&doc, &spec(&[("a", &["el-1"])]));
        assert!(report.has(IssueCode::UnknownNodeId));
    }
}
