use serde::{Deserialize, Serialize};

use super::spec::{is_slug, GroupSpec, GroupingSpec};
use super::validate::validate_and_complete;
use crate::report::ValidationReport;
use crate::svg::{NodeId, SvgDocument};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitPart {
    pub name: String,
    pub members: Vec<NodeId>,
}

/// A structural edit to a grouping.
///
/// `split` moves the listed members of `source` into new groups; members
/// not listed stay in `source`, which disappears if none remain.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum RefinementEdit {
    Split { source: String, parts: Vec<SplitPart> },
    Merge { source: String, target: String },
    Move { members: Vec<NodeId>, target: String },
    Rename { from: String, to: String },
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum RefinementError {
    #[error("unknown group {0:?}")]
    UnknownGroup(String),
    #[error("{0} is not a member of the expected group")]
    UnknownMember(NodeId),
    #[error("group name {0:?} already exists")]
    NameCollision(String),
    #[error("group name {0:?} is not a lowercase slug")]
    InvalidName(String),
    #[error("refined grouping failed validation")]
    Invalid(ValidationReport),
}

/// Applies edits in order and re-validates the result against `doc`.
pub fn apply_refinement(
    doc: &SvgDocument,
    spec: &GroupingSpec,
    edits: &[RefinementEdit],
) -> Result<GroupingSpec, RefinementError> {
    let mut groups = spec.groups.clone();
    for edit in edits {
        apply_edit(&mut groups, edit)?;
    }
    let refined = GroupingSpec {
        object_name: spec.object_name.clone(),
        groups,
    };
    let (completed, report) = validate_and_complete(doc, &refined);
    if !report.ok {
        return Err(RefinementError::Invalid(report));
    }
    Ok(completed)
}

fn index_of(groups: &[GroupSpec], name: &str) -> Result<usize, RefinementError> {
    groups
        .iter()
        .position(|g| g.name == name)
        .ok_or_else(|| RefinementError::UnknownGroup(name.to_string()))
}

fn check_new_name(groups: &[GroupSpec], name: &str, allowed_existing: Option<&str>) -> Result<(), RefinementError> {
    if !is_slug(name) {
        return Err(RefinementError::InvalidName(name.to_string()));
    }
    if Some(name) != allowed_existing && groups.iter().any(|g| g.name == name) {
        return Err(RefinementError::NameCollision(name.to_string()));
    }
    Ok(())
}

fn apply_edit(groups: &mut Vec<GroupSpec>, edit: &RefinementEdit) -> Result<(), RefinementError> {
    match edit {
        RefinementEdit::Split { source, parts } => {
            let idx = index_of(groups, source)?;
            let mut remaining = groups[idx].members.clone();
            let suggestions = groups[idx].suggestions.clone();
            let mut new_groups: Vec<GroupSpec> = Vec::with_capacity(parts.len() + 1);
            for part in parts {
                check_new_name(groups, &part.name, Some(source))?;
                if new_groups.iter().any(|g| g.name == part.name) {
                    return Err(RefinementError::NameCollision(part.name.clone()));
                }
                let mut members = Vec::with_capacity(part.members.len());
                for m in &part.members {
                    let pos = remaining
                        .iter()
                        .position(|r| r == m)
                        .ok_or_else(|| RefinementError::UnknownMember(m.clone()))?;
                    members.push(remaining.remove(pos));
                }
                new_groups.push(GroupSpec {
                    name: part.name.clone(),
                    members,
                    suggestions: suggestions.clone(),
                });
            }
            if !remaining.is_empty() {
                match new_groups.iter_mut().find(|g| &g.name == source) {
                    Some(g) => g.members.extend(remaining),
                    None => new_groups.push(GroupSpec {
                        name: source.clone(),
                        members: remaining,
                        suggestions,
                    }),
                }
            }
            groups.splice(idx..=idx, new_groups);
        }
        RefinementEdit::Merge { source, target } => {
            let s = index_of(groups, source)?;
            let t = index_of(groups, target)?;
            if s == t {
                return Ok(());
            }
            let src = groups.remove(s);
            let t = if s < t { t - 1 } else { t };
            let dst = &mut groups[t];
            dst.members.extend(src.members);
            for sug in src.suggestions {
                if !dst.suggestions.contains(&sug) {
                    dst.suggestions.push(sug);
                }
            }
        }
        RefinementEdit::Move { members, target } => {
            index_of(groups, target)?;
            for m in members {
                let from = groups
                    .iter()
                    .position(|g| g.members.contains(m))
                    .ok_or_else(|| RefinementError::UnknownMember(m.clone()))?;
                groups[from].members.retain(|x| x != m);
                let t = index_of(groups, target)?;
                groups[t].members.push(m.clone());
            }
            groups.retain(|g| !g.members.is_empty());
        }
        RefinementEdit::Rename { from, to } => {
            let idx = index_of(groups, from)?;
            check_new_name(groups, to, Some(from))?;
            groups[idx].name = to.clone();
        }
    }
    Ok(())
}
