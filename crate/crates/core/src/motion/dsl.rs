//! Line-oriented motion DSL.
//!
//! ```text
//! loop all
//! anim wing: rotate from -15deg to 15deg dur 800 ease elastic repeat infinite alternate
//! anim body: translateY from 0px to -4px dur 1000 delay 200 origin 50 60
//! ```
//!
//! Blank lines and lines starting with `#` are ignored.

use std::fmt::{self, Write};

use super::easing::Easing;
use super::spec::{Direction, GlobalSettings, Iterations, MotionSpec, Origin, Property, Track, Unit, Value};
use super::validate::validate_motion;
use crate::grouping::GroupingSpec;
use crate::report::ValidationReport;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {column}: expected {expected}, found {found}")]
pub struct DslParseError {
    pub line: usize,
    pub column: usize,
    pub expected: String,
    pub found: String,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum DslError {
    #[error(transparent)]
    Parse(#[from] DslParseError),
    #[error("motion failed validation")]
    Invalid(ValidationReport),
}

/// Parses and validates against `grouping`.
pub fn parse_motion_dsl(text: &str, grouping: &GroupingSpec) -> Result<MotionSpec, DslError> {
    let spec = parse_motion_dsl_unchecked(text)?;
    let report = validate_motion(&spec, grouping);
    if !report.ok {
        return Err(DslError::Invalid(report));
    }
    Ok(spec)
}

/// Syntax only; group names and value ranges are not checked.
pub fn parse_motion_dsl_unchecked(text: &str) -> Result<MotionSpec, DslParseError> {
    let mut spec = MotionSpec {
        tracks: Vec::new(),
        global: GlobalSettings::default(),
    };
    for (idx, raw) in text.lines().enumerate() {
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut p = LineParser::new(idx + 1, raw);
        match p.peek_text() {
            Some("loop") => {
                p.next();
                p.keyword("all")?;
                p.end()?;
                spec.global.loop_all = true;
            }
            Some("anim") => {
                p.next();
                spec.tracks.push(p.track()?);
            }
            _ => return Err(p.error("'anim' or 'loop all'")),
        }
    }
    Ok(spec)
}

/// Canonical text form; `parse_motion_dsl_unchecked` inverts it.
pub fn print_motion_dsl(spec: &MotionSpec) -> String {
    let mut out = String::new();
    if spec.global.loop_all {
        out.push_str("loop all\n");
    }
    for t in &spec.tracks {
        let _ = write!(
            out,
            "anim {}: {} from {} to {} dur {}",
            t.group, t.property, t.from_value, t.to_value, t.duration_ms
        );
        if t.delay_ms != 0 {
            let _ = write!(out, " delay {}", t.delay_ms);
        }
        let _ = write!(out, " ease {}", t.easing);
        if t.iterations != Iterations::Once {
            let _ = write!(out, " repeat {}", t.iterations);
        }
        if t.direction == Direction::Alternate {
            out.push_str(" alternate");
        }
        if let Origin::Point { x, y } = t.origin {
            let _ = write!(out, " origin {x} {y}");
        }
        out.push('\n');
    }
    out
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

impl fmt::Display for Token<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.text)
    }
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let mut tokens = Vec::new();
    let chars: Vec<(usize, char)> = line.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (start, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == ':' {
            tokens.push(Token {
                text: &line[start..start + 1],
                column: i + 1,
            });
            i += 1;
            continue;
        }
        let first = i;
        let mut depth = 0usize;
        while i < chars.len() {
            let ch = chars[i].1;
            if depth == 0 && (ch.is_whitespace() || ch == ':') {
                break;
            }
            match ch {
                '(' => depth += 1,
                ')' => depth = depth.saturating_sub(1),
                _ => {}
            }
            i += 1;
        }
        let end = chars.get(i).map_or(line.len(), |&(b, _)| b);
        tokens.push(Token {
            text: &line[start..end],
            column: first + 1,
        });
    }
    tokens
}

struct LineParser<'a> {
    line: usize,
    end_column: usize,
    tokens: Vec<Token<'a>>,
    pos: usize,
}

impl<'a> LineParser<'a> {
    fn new(line: usize, text: &'a str) -> Self {
        LineParser {
            line,
            end_column: text.trim_end().chars().count() + 1,
            tokens: tokenize(text),
            pos: 0,
        }
    }

    fn peek_text(&self) -> Option<&'a str> {
        self.tokens.get(self.pos).map(|t| t.text)
    }

    fn next(&mut self) -> Option<&Token<'a>> {
        let t = self.tokens.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> DslParseError {
        let (column, found) = match self.tokens.get(self.pos) {
            Some(t) => (t.column, t.to_string()),
            None => (self.end_column, "end of line".to_string()),
        };
        DslParseError {
            line: self.line,
            column,
            expected: expected.to_string(),
            found,
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), DslParseError> {
        if self.peek_text() == Some(kw) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("'{kw}'")))
        }
    }

    fn end(&self) -> Result<(), DslParseError> {
        match self.tokens.get(self.pos) {
            None => Ok(()),
            Some(_) => Err(self.error("end of line")),
        }
    }

    fn parse_with<T>(&mut self, expected: &str, f: impl FnOnce(&str) -> Option<T>) -> Result<T, DslParseError> {
        match self.peek_text().and_then(f) {
            Some(v) => {
                self.pos += 1;
                Ok(v)
            }
            None => Err(self.error(expected)),
        }
    }

    fn millis(&mut self, expected: &str) -> Result<u64, DslParseError> {
        self.parse_with(expected, |s| s.strip_suffix("ms").unwrap_or(s).parse::<u64>().ok())
    }

    fn coordinate(&mut self) -> Result<f64, DslParseError> {
        self.parse_with("coordinate in user units", |s| match s.parse::<Value>() {
            Ok(v) if v.unit != Unit::Deg => Some(v.value),
            _ => None,
        })
    }

    fn track(&mut self) -> Result<Track, DslParseError> {
        let group = self.parse_with("group name", |s| (s != ":").then(|| s.to_string()))?;
        self.keyword(":")?;
        let property = self.parse_with("property name", |s| s.parse::<Property>().ok())?;
        self.keyword("from")?;
        let from = self.parse_with("value such as 0, 4px or -15deg", |s| s.parse::<Value>().ok())?;
        self.keyword("to")?;
        let to = self.parse_with("value such as 0, 4px or -15deg", |s| s.parse::<Value>().ok())?;
        self.keyword("dur")?;
        let duration_ms = self.millis("duration in milliseconds")?;

        let mut track = Track::new(group, property, 0.0, 0.0, duration_ms);
        track.from_value = from;
        track.to_value = to;
        track.apply_default_units();

        let mut seen: Vec<&str> = Vec::new();
        while let Some(option) = self.peek_text() {
            let expected_option = "option (delay, ease, repeat, alternate, origin)";
            if !matches!(option, "delay" | "ease" | "repeat" | "alternate" | "origin") {
                return Err(self.error(expected_option));
            }
            if seen.contains(&option) {
                return Err(self.error(&format!("{expected_option} not already given")));
            }
            seen.push(option);
            self.pos += 1;
            match option {
                "delay" => track.delay_ms = self.millis("delay in milliseconds")?,
                "ease" => track.easing = self.parse_with("easing", |s| s.parse::<Easing>().ok())?,
                "repeat" => {
                    track.iterations = self.parse_with("repeat count or 'infinite'", |s| {
                        if s == "infinite" {
                            Some(Iterations::Infinite)
                        } else {
                            s.parse::<u32>().ok().filter(|&n| n > 0).map(Iterations::count)
                        }
                    })?
                }
                "alternate" => track.direction = Direction::Alternate,
                _ => {
                    let x = self.coordinate()?;
                    let y = self.coordinate()?;
                    track.origin = Origin::Point { x, y };
                }
            }
        }
        Ok(track)
    }
}
