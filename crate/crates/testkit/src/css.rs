//! A strict checker for the CSS subset the generator emits: style rules,
//! `@keyframes`, `@property` and `@media` blocks.

use std::collections::BTreeSet;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CssSummary {
    /// Selectors of top-level style rules, in order.
    pub selectors: Vec<String>,
    pub keyframes: Vec<String>,
    pub custom_properties: Vec<String>,
    /// Names referenced from `animation` declarations.
    pub animation_refs: BTreeSet<String>,
}

pub fn check(css: &str) -> Result<CssSummary, String> {
    let mut p = Parser { s: css, pos: 0 };
    let mut out = CssSummary::default();
    p.ws();
    while !p.done() {
        if p.eat("@keyframes") {
            let name = p.ident()?;
            out.keyframes.push(name);
            p.keyframes_body()?;
        } else if p.eat("@property") {
            let name = p.ident()?;
            if !name.starts_with("--") {
                return Err(format!("@property {name} is not a custom property"));
            }
            p.expect('{')?;
            let decls = p.declarations()?;
            for key in ["syntax", "inherits", "initial-value"] {
                if !decls.iter().any(|(k, _)| k == key) {
                    return Err(format!("@property {name} lacks {key}"));
                }
            }
            out.custom_properties.push(name);
        } else if p.eat("@media") {
            let cond = p.until('{')?;
            if !(cond.starts_with('(') && cond.ends_with(')')) {
                return Err(format!("bad media condition {cond:?}"));
            }
            p.expect('{')?;
            p.ws();
            while !p.eat("}") {
                p.rule(&mut CssSummary::default())?;
                p.ws();
                if p.done() {
                    return Err("unterminated @media".into());
                }
            }
        } else if p.peek() == Some('@') {
            return Err(format!("unexpected at-rule at byte {}", p.pos));
        } else {
            p.rule(&mut out)?;
        }
        p.ws();
    }
    let defined: BTreeSet<&String> = out.keyframes.iter().collect();
    if defined.len() != out.keyframes.len() {
        return Err("duplicate @keyframes name".into());
    }
    for r in &out.animation_refs {
        if !defined.contains(r) {
            return Err(format!("animation references undefined keyframes {r}"));
        }
    }
    for k in &out.keyframes {
        if !out.animation_refs.contains(k) {
            return Err(format!("keyframes {k} is never used"));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    s: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn rest(&self) -> &str {
        &self.s[self.pos..]
    }

    fn done(&self) -> bool {
        self.pos >= self.s.len()
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.s.len() - trimmed.len();
    }

    fn eat(&mut self, lit: &str) -> bool {
        self.ws();
        if self.rest().starts_with(lit) {
            self.pos += lit.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), String> {
        self.ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            Err(format!("expected {c:?} at byte {}, found {:?}", self.pos, self.peek()))
        }
    }

    fn ident(&mut self) -> Result<String, String> {
        self.ws();
        let len = self
            .rest()
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '-' || c == '_'))
            .unwrap_or(self.rest().len());
        if len == 0 {
            return Err(format!("expected identifier at byte {}", self.pos));
        }
        let id = self.rest()[..len].to_string();
        self.pos += len;
        Ok(id)
    }

    fn until(&mut self, c: char) -> Result<String, String> {
        let end = self.rest().find(c).ok_or_else(|| format!("missing {c:?}"))?;
        let text = self.rest()[..end].trim().to_string();
        self.pos += end;
        Ok(text)
    }

    fn rule(&mut self, out: &mut CssSummary) -> Result<(), String> {
        let selector = self.until('{')?;
        if selector.is_empty() || selector.contains(['}', ';']) {
            return Err(format!("bad selector {selector:?}"));
        }
        for part in selector.split(',') {
            check_selector(part.trim())?;
        }
        self.expect('{')?;
        for (k, v) in self.declarations()? {
            if k == "animation" || k == "animation-name" {
                for layer in split_top_level(&v, ',') {
                    if let Some(name) = layer.split_whitespace().next() {
                        out.animation_refs.insert(name.to_string());
                    }
                }
            }
        }
        out.selectors.push(selector);
        Ok(())
    }

    /// Declarations up to and including the closing brace.
    fn declarations(&mut self) -> Result<Vec<(String, String)>, String> {
        let mut out = Vec::new();
        loop {
            if self.eat("}") {
                return Ok(out);
            }
            let name = self.ident()?;
            self.expect(':')?;
            let end = self
                .rest()
                .find([';', '}'])
                .ok_or_else(|| format!("unterminated declaration {name}"))?;
            let value = self.rest()[..end].trim().to_string();
            self.pos += end;
            self.expect(';')?;
            check_value(&name, &value)?;
            out.push((name, value));
        }
    }

    fn keyframes_body(&mut self) -> Result<(), String> {
        self.expect('{')?;
        let mut last = -1.0f64;
        loop {
            if self.eat("}") {
                return Ok(());
            }
            let stop = self.until('{')?;
            for s in stop.split(',') {
                let pct = match s.trim() {
                    "from" => 0.0,
                    "to" => 100.0,
                    t => t
                        .strip_suffix('%')
                        .and_then(|n| n.parse::<f64>().ok())
                        .ok_or_else(|| format!("bad keyframe selector {t:?}"))?,
                };
                if !(0.0..=100.0).contains(&pct) || pct <= last {
                    return Err(format!("keyframe stop {pct} out of order"));
                }
                last = pct;
            }
            self.expect('{')?;
            if self.declarations()?.is_empty() {
                return Err("empty keyframe".into());
            }
        }
    }
}

fn check_selector(sel: &str) -> Result<(), String> {
    let ok = !sel.is_empty()
        && sel
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '.' | '#' | '-' | '_' | ' ' | '*' | '>' | ':' | '[' | ']' | '=' | '"'));
    if ok {
        Ok(())
    } else {
        Err(format!("bad selector {sel:?}"))
    }
}

fn check_value(name: &str, value: &str) -> Result<(), String> {
    if value.is_empty() {
        return Err(format!("{name}: empty value"));
    }
    let lower = value.to_ascii_lowercase();
    if lower.contains("nan") || lower.contains("inf ") || lower.ends_with("inf") {
        return Err(format!("{name}: non-finite value {value:?}"));
    }
    let mut depth = 0i32;
    let mut quote: Option<char> = None;
    for c in value.chars() {
        match (quote, c) {
            (Some(q), c) if c == q => quote = None,
            (Some(_), _) => {}
            (None, '"' | '\'') => quote = Some(c),
            (None, '(') => depth += 1,
            (None, ')') => {
                depth -= 1;
                if depth < 0 {
                    return Err(format!("{name}: unbalanced parentheses in {value:?}"));
                }
            }
            _ => {}
        }
    }
    if depth != 0 || quote.is_some() {
        return Err(format!("{name}: unbalanced value {value:?}"));
    }
    Ok(())
}

fn split_top_level(s: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0, 0);
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}
