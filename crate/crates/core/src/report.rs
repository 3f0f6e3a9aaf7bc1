use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

/// Closed set of machine-readable issue codes shared by grouping and
/// motion validation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IssueCode {
    DuplicateMember,
    UnknownNodeId,
    EmptyGroup,
    InvalidName,
    NameSlugged,
    UncoveredLeaves,
    UnknownGroup,
    ValueOutOfRange,
    UnitMismatch,
    DuplicateTrack,
    TooManyTracks,
}

impl fmt::Display for IssueCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Issue {
    pub code: IssueCode,
    pub severity: Severity,
    /// The node id or group name the issue is about.
    pub subject: String,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub issues: Vec<Issue>,
}

impl Default for ValidationReport {
    fn default() -> Self {
        ValidationReport {
            ok: true,
            issues: Vec::new(),
        }
    }
}

impl ValidationReport {
    pub fn error(&mut self, code: IssueCode, subject: impl Into<String>, message: impl Into<String>) {
        self.ok = false;
        self.issues.push(Issue {
            code,
            severity: Severity::Error,
            subject: subject.into(),
            message: message.into(),
        });
    }

    pub fn warning(&mut self, code: IssueCode, subject: impl Into<String>, message: impl Into<String>) {
        self.issues.push(Issue {
            code,
            severity: Severity::Warning,
            subject: subject.into(),
            message: message.into(),
        });
    }

    pub fn errors(&self) -> impl Iterator<Item = &Issue> {
        self.issues.iter().filter(|i| i.severity == Severity::Error)
    }

    pub fn has(&self, code: IssueCode) -> bool {
        self.issues.iter().any(|i| i.code == code)
    }
}
