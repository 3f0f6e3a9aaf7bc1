//! Presentation attribute helpers.

use super::Attrs;

/// Properties a child inherits from its parent group when it does not set them.
pub(crate) const INHERITED: &[&str] = &[
    "clip-rule",
    "color",
    "color-interpolation",
    "cursor",
    "direction",
    // not inherited, but `none` on a group hides every descendant
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
    "image-rendering",
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

/// Splits an inline `style` attribute into declarations.
pub(crate) fn declarations(style: &str) -> Vec<(String, String)> {
    style
        .split(';')
        .filter_map(|decl| {
            let (k, v) = decl.split_once(':')?;
            let (k, v) = (k.trim(), v.trim());
            (!k.is_empty()).then(|| (k.to_ascii_lowercase(), v.to_string()))
        })
        .collect()
}

/// A property's specified value, from `style` first, then the attribute.
pub(crate) fn specified<'a>(attrs: &'a Attrs, decls: &'a [(String, String)], name: &str) -> Option<&'a str> {
    decls
        .iter()
        .rev()
        .find(|(k, _)| k == name)
        .map(|(_, v)| v.as_str())
        .or_else(|| attrs.get(name))
}

/// Groups whose effect depends on compositing their children together
/// cannot be dissolved without changing rendering.
pub(crate) fn needs_atomic(attrs: &Attrs) -> bool {
    let decls = attrs.get("style").map(declarations).unwrap_or_default();
    if let Some(op) = specified(attrs, &decls, "opacity") {
        if parse_opacity(op).is_some_and(|v| v < 1.0) {
            return true;
        }
    }
    ["clip-path", "mask", "filter"].iter().any(|p| {
        specified(attrs, &decls, p).is_some_and(|v| {
            let v = v.trim();
            !v.is_empty() && v != "none"
        })
    })
}

fn parse_opacity(v: &str) -> Option<f64> {
    let v = v.trim();
    match v.strip_suffix('%') {
        Some(p) => p.trim().parse::<f64>().ok().map(|x| x / 100.0),
        None => v.parse().ok(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn style_declarations() {
        let d = declarations("fill: red ; stroke:blue;;bad");
        assert_eq!(
            d,
            vec![("fill".into(), "red".into()), ("stroke".into(), "blue".into())]
        );
    }

    #[test]
    fn atomic_triggers() {
        let a: Attrs = [("opacity", "0.5")].into_iter().collect();
        assert!(needs_atomic(&a));
        let a: Attrs = [("opacity", "1")].into_iter().collect();
        assert!(!needs_atomic(&a));
        let a: Attrs = [("style", "opacity:40%")].into_iter().collect();
        assert!(needs_atomic(&a));
        let a: Attrs = [("clip-path", "url(#c)")].into_iter().collect();
        assert!(needs_atomic(&a));
        let a: Attrs = [("filter", "none")].into_iter().collect();
        assert!(!needs_atomic(&a));
    }
}
