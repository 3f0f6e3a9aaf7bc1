//! Tag-balance checker for generated HTML documents.

#[derive(Clone, Debug, PartialEq)]
pub struct Element {
    pub tag: String,
    pub attrs: Vec<(String, String)>,
}

impl Element {
    pub fn attr(&self, name: &str) -> Option<&str> {
        self.attrs.iter().find(|(k, _)| k == name).map(|(_, v)| v.as_str())
    }
}

const VOID: &[&str] = &["area", "base", "br", "col", "embed", "hr", "img", "input", "link", "meta", "source", "track", "wbr"];
const RAW_TEXT: &[&str] = &["script", "style"];

/// Checks that every element is closed in order and returns all start
/// tags in document order.
pub fn check(html: &str) -> Result<Vec<Element>, String> {
    let mut stack: Vec<String> = Vec::new();
    let mut out = Vec::new();
    let mut rest = html;
    let offset = |r: &str| html.len() - r.len();
    while let Some(lt) = rest.find('<') {
        if rest[..lt].contains('>') {
            return Err(format!("stray '>' at byte {}", offset(rest)));
        }
        rest = &rest[lt..];
        if let Some(r) = rest.strip_prefix("<!--") {
            let end = r.find("-->").ok_or("unterminated comment")?;
            rest = &r[end + 3..];
            continue;
        }
        if rest.len() >= 9 && rest[..9].eq_ignore_ascii_case("<!doctype") {
            let end = rest.find('>').ok_or("unterminated doctype")?;
            rest = &rest[end + 1..];
            continue;
        }
        if let Some(r) = rest.strip_prefix("</") {
            let end = r.find('>').ok_or("unterminated end tag")?;
            let name = r[..end].trim().to_string();
            match stack.pop() {
                Some(open) if open == name => {}
                Some(open) => return Err(format!("</{name}> closes <{open}> at byte {}", offset(rest))),
                None => return Err(format!("</{name}> without an open element")),
            }
            rest = &r[end + 1..];
            continue;
        }
        let (el, self_closing, after) = start_tag(&rest[1..]).map_err(|e| format!("{e} at byte {}", offset(rest)))?;
        rest = after;
        let tag = el.tag.clone();
        out.push(el);
        if RAW_TEXT.contains(&tag.as_str()) && !self_closing {
            let close = format!("</{tag}");
            let end = rest.find(&close).ok_or_else(|| format!("unterminated <{tag}>"))?;
            rest = &rest[end..];
            stack.push(tag);
        } else if !self_closing && !VOID.contains(&tag.as_str()) {
            stack.push(tag);
        }
    }
    if rest.contains('>') {
        return Err("stray '>' after the last tag".into());
    }
    match stack.pop() {
        Some(open) => Err(format!("<{open}> is never closed")),
        None => Ok(out),
    }
}

fn start_tag(s: &str) -> Result<(Element, bool, &str), String> {
    let name_len = s
        .find(|c: char| !(c.is_ascii_alphanumeric() || c == '-' || c == ':'))
        .unwrap_or(s.len());
    if name_len == 0 {
        return Err("empty tag name".into());
    }
    let mut el = Element {
        tag: s[..name_len].to_string(),
        attrs: Vec::new(),
    };
    let mut r = &s[name_len..];
    loop {
        r = r.trim_start();
        if let Some(after) = r.strip_prefix("/>") {
            return Ok((el, true, after));
        }
        if let Some(after) = r.strip_prefix('>') {
            return Ok((el, false, after));
        }
        let n = r
            .find(|c: char| c.is_whitespace() || matches!(c, '=' | '>' | '/' | '"' | '\'' | '<'))
            .unwrap_or(r.len());
        if n == 0 {
            return Err(format!("malformed attribute near {:?}", &r[..r.len().min(20)]));
        }
        let name = r[..n].to_string();
        r = r[n..].trim_start();
        let value = if let Some(v) = r.strip_prefix('=') {
            let v = v.trim_start();
            let q = v.chars().next().filter(|c| *c == '"' || *c == '\'').ok_or("unquoted attribute value")?;
            let end = v[1..].find(q).ok_or("unterminated attribute value")?;
            let value = v[1..1 + end].to_string();
            if value.contains('<') {
                return Err(format!("raw '<' inside attribute {name}"));
            }
            r = &v[end + 2..];
            value
        } else {
            String::new()
        };
        if el.attrs.iter().any(|(k, _)| *k == name) {
            return Err(format!("duplicate attribute {name}"));
        }
        el.attrs.push((name, value));
    }
}
