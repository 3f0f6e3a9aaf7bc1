use serde::{Deserialize, Serialize};

use crate::svg::NodeId;

/// Name of the group that collects leaves no other group claims.
pub const REST_GROUP: &str = "rest";

/// Named semantic groups partitioning a document's items.
///
/// Wire format: `{"object":"dog","groups":[{"name":"ear-left","members":["el-3"],"suggestions":["gentle flop"]}]}`
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupingSpec {
    #[serde(rename = "object", default)]
    pub object_name: String,
    pub groups: Vec<GroupSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupSpec {
    pub name: String,
    pub members: Vec<NodeId>,
    #[serde(default)]
    pub suggestions: Vec<String>,
}

impl GroupingSpec {
    pub fn group(&self, name: &str) -> Option<&GroupSpec> {
        self.groups.iter().find(|g| g.name == name)
    }

    pub fn group_names(&self) -> Vec<&str> {
        self.groups.iter().map(|g| g.name.as_str()).collect()
    }

    /// All members across groups, in group order.
    pub fn all_members(&self) -> Vec<&NodeId> {
        self.groups.iter().flat_map(|g| g.members.iter()).collect()
    }
}

/// Lowercases and maps every non-alphanumeric run to a single hyphen.
/// Names become CSS class selectors, so the result is `[a-z0-9-]+`.
pub fn slugify(name: &str) -> String {
    let mut out = String::with_capacity(name.len());
    let mut pending_hyphen = false;
    for ch in name.chars() {
        if ch.is_ascii_alphanumeric() {
            if pending_hyphen && !out.is_empty() {
                out.push('-');
            }
            pending_hyphen = false;
            out.push(ch.to_ascii_lowercase());
        } else {
            pending_hyphen = true;
        }
    }
    if out.is_empty() {
        out.push_str("group");
    }
    // "el-<n>" fragment ids would collide with canonical element ids.
    if out == "el" {
        out.push_str("-group");
    }
    // CSS class selectors cannot start with a digit.
    if out.starts_with(|c: char| c.is_ascii_digit()) {
        out.insert_str(0, "g-");
    }
    out
}

pub fn is_slug(name: &str) -> bool {
    slugify(name) == name
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slugs() {
        assert_eq!(slugify("Left Ear"), "left-ear");
        assert_eq!(slugify("  wing__L!! "), "wing-l");
        assert_eq!(slugify("ear-left"), "ear-left");
        assert_eq!(slugify("!!!"), "group");
        assert_eq!(slugify("EL"), "el-group");
        assert_eq!(slugify("3d eye"), "g-3d-eye");
        assert!(is_slug("foot-left"));
        assert!(!is_slug("Foot"));
    }

    #[test]
    fn wire_format() {
        let json = r#"{"object":"dog","groups":[{"name":"ear-left","members":["el-3"],"suggestions":["gentle flop"]}]}"#;
        let spec: GroupingSpec = serde_json::from_str(json).unwrap();
        assert_eq!(spec.object_name, "dog");
        assert_eq!(spec.groups[0].members, vec![NodeId::from("el-3")]);
        assert_eq!(serde_json::to_string(&spec).unwrap(), json);
        let no_suggestions: GroupingSpec =
            serde_json::from_str(r#"{"object":"x","groups":[{"name":"a","members":[]}]}"#).unwrap();
        assert!(no_suggestions.groups[0].suggestions.is_empty());
    }
}
