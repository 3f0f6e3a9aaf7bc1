use std::collections::BTreeMap;
use std::fmt::Write;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::css::{custom_property, keyframes_block, keyframes_name, timing_function, Target, COMPOSED};
use crate::geom::{group_bbox, Point};
use crate::grouping::{fragment_ids, GroupingSpec};
use crate::motion::{validate_motion, Direction, MotionSpec, Origin, Track};
use crate::num::fmt_num;
use crate::svg::{escape_text, serialize_svg, SvgDocument};

pub const BUNDLE_FILES: [&str; 4] = ["index.html", "style.css", "anim.js", "manifest.json"];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BundleManifest {
    pub object: String,
    /// Animated groups in the order their first track appears.
    pub groups: Vec<String>,
    pub tracks_per_group: BTreeMap<String, usize>,
    pub longest_duration_ms: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnimationBundle {
    pub html: String,
    pub css: String,
    pub js: String,
    pub manifest: BundleManifest,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum CodegenError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

const STAGE_OPEN: &str = "<div class=\"dm-stage\" id=\"dm-stage\">\n";
const STAGE_CLOSE: &str = "</div>\n<button";

const REDUCED_MOTION_CSS: &str = "\
@media (prefers-reduced-motion: reduce) {
  .dm-stage * { animation-play-state: paused !important; }
}
.dm-stage.dm-paused * { animation-play-state: paused !important; }
";

const CONTROLS_JS: &str = r#"(function () {
  var stage = document.getElementById("dm-stage");
  var toggle = document.getElementById("dm-toggle");
  if (!stage || !toggle) return;
  function render() {
    var paused = stage.classList.contains("dm-paused");
    toggle.textContent = paused ? "Play" : "Pause";
    toggle.setAttribute("aria-pressed", paused ? "true" : "false");
  }
  var reduce = window.matchMedia ? window.matchMedia("(prefers-reduced-motion: reduce)") : null;
  if (reduce && reduce.matches) stage.classList.add("dm-paused");
  toggle.addEventListener("click", function () {
    stage.classList.toggle("dm-paused");
    render();
  });
  render();
})();
"#;

/// Builds the bundle for a document produced by `apply_grouping`.
pub fn emit_bundle(doc: &SvgDocument, spec: &MotionSpec, grouping: &GroupingSpec) -> Result<AnimationBundle, CodegenError> {
    let report = validate_motion(spec, grouping);
    if !report.ok {
        let msgs: Vec<&str> = report.errors().map(|i| i.message.as_str()).collect();
        return Err(CodegenError::InvalidInput(msgs.join("; ")));
    }

    let groups = spec.groups();
    let mut css = String::new();
    let composed_groups: Vec<&str> = groups
        .iter()
        .copied()
        .filter(|g| spec.tracks_for(g).filter(|t| t.property.is_transform()).count() > 1)
        .collect();
    for (prop, name, syntax, initial) in COMPOSED {
        let used = composed_groups
            .iter()
            .any(|g| spec.tracks_for(g).any(|t| t.property == prop));
        if used {
            let _ = write!(
                css,
                "@property {name} {{\n  syntax: \"{syntax}\";\n  inherits: false;\n  initial-value: {initial};\n}}\n"
            );
        }
    }

    let mut manifest = BundleManifest {
        object: grouping.object_name.clone(),
        groups: Vec::new(),
        tracks_per_group: BTreeMap::new(),
        longest_duration_ms: 0,
    };

    for group in &groups {
        let tracks: Vec<&Track> = spec.tracks_for(group).collect();
        let members = &grouping.group(group).expect("validated group").members;
        if fragment_ids(doc, group).is_empty() {
            return Err(CodegenError::InvalidInput(format!(
                "document has no fragments for group {group:?}; was it produced by apply_grouping?"
            )));
        }
        let composed = composed_groups.contains(group);
        let target = if composed { Target::Composed } else { Target::Direct };
        for t in &tracks {
            css.push_str(&keyframes_block(t, target));
        }
        css.push_str(&group_rule(doc, spec, group, &tracks, members, composed)?);

        manifest.groups.push(group.to_string());
        manifest.tracks_per_group.insert(group.to_string(), tracks.len());
        for t in &tracks {
            manifest.longest_duration_ms = manifest.longest_duration_ms.max(t.duration_ms);
        }
    }
    css.push_str(REDUCED_MOTION_CSS);

    let svg = serialize_svg(doc);
    let html = page(&grouping.object_name, &svg, Assets::Linked);
    Ok(AnimationBundle {
        html,
        css,
        js: CONTROLS_JS.to_string(),
        manifest,
    })
}

fn group_rule(
    doc: &SvgDocument,
    spec: &MotionSpec,
    group: &str,
    tracks: &[&Track],
    members: &[crate::svg::NodeId],
    composed: bool,
) -> Result<String, CodegenError> {
    let mut decls: Vec<String> = Vec::new();

    let pivots: Vec<&Track> = tracks.iter().copied().filter(|t| t.property.uses_origin()).collect();
    if let Some(first) = pivots.first() {
        if pivots.iter().any(|t| t.origin != first.origin) {
            return Err(CodegenError::InvalidInput(format!(
                "group {group:?} has rotate/scale tracks with different origins"
            )));
        }
        let center = match first.origin {
            Origin::Point { x, y } => Point::new(x, y),
            Origin::Auto => group_bbox(doc, members)
                .map_err(|e| CodegenError::InvalidInput(format!("cannot resolve origin of {group:?}: {e}")))?
                .center(),
        };
        decls.push("transform-box: view-box".to_string());
        decls.push(format!("transform-origin: {}px {}px", fmt_num(center.x), fmt_num(center.y)));
    }

    if composed {
        let parts: Vec<String> = COMPOSED
            .iter()
            .filter(|c| tracks.iter().any(|t| t.property == c.0))
            .map(|c| format!("{}(var({}))", c.0.name(), custom_property(c.0).unwrap_or_default()))
            .collect();
        decls.push(format!("transform: {}", parts.join(" ")));
    }

    let animations: Vec<String> = tracks
        .iter()
        .map(|t| {
            format!(
                "{} {}ms {} {}ms {} {}",
                keyframes_name(t),
                t.duration_ms,
                timing_function(&t.easing),
                t.delay_ms,
                spec.effective_iterations(t),
                match t.direction {
                    Direction::Normal => "normal",
                    Direction::Alternate => "alternate",
                }
            )
        })
        .collect();
    decls.push(format!("animation: {}", animations.join(", ")));

    let mut out = format!(".{group} {{\n");
    for d in decls {
        let _ = writeln!(out, "  {d};");
    }
    out.push_str("}\n");
    Ok(out)
}

enum Assets<'a> {
    Linked,
    Inline { css: &'a str, js: &'a str },
}

fn page(object: &str, svg: &str, assets: Assets<'_>) -> String {
    let mut out = String::new();
    out.push_str("<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n");
    let _ = writeln!(out, "<title>{} animation</title>", escape_text(object));
    match &assets {
        Assets::Linked => out.push_str("<link rel=\"stylesheet\" href=\"style.css\">\n"),
        Assets::Inline { css, .. } => {
            let _ = write!(out, "<style>\n{css}</style>\n");
        }
    }
    out.push_str("</head>\n<body>\n");
    out.push_str(STAGE_OPEN);
    out.push_str(svg);
    out.push_str("</div>\n");
    out.push_str("<button type=\"button\" id=\"dm-toggle\" class=\"dm-toggle\" aria-pressed=\"false\">Pause</button>\n");
    match &assets {
        Assets::Linked => out.push_str("<script src=\"anim.js\"></script>\n"),
        Assets::Inline { js, .. } => {
            let _ = write!(out, "<script>\n{js}</script>\n");
        }
    }
    out.push_str("</body>\n</html>\n");
    out
}

/// One self-contained page with the css and js inlined.
pub fn emit_preview_html(b: &AnimationBundle) -> String {
    let start = b.html.find(STAGE_OPEN).map(|i| i + STAGE_OPEN.len());
    let end = b.html.rfind(STAGE_CLOSE);
    let svg = match (start, end) {
        (Some(s), Some(e)) if s <= e => &b.html[s..e],
        _ => "",
    };
    page(&b.manifest.object, svg, Assets::Inline { css: &b.css, js: &b.js })
}

/// Writes `index.html`, `style.css`, `anim.js`, and `manifest.json` into `dir`.
pub fn write_bundle(b: &AnimationBundle, dir: &Path) -> io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let manifest = serde_json::to_string_pretty(&b.manifest).map_err(io::Error::other)? + "\n";
    for (name, body) in BUNDLE_FILES.iter().zip([&b.html, &b.css, &b.js, &manifest]) {
        std::fs::write(dir.join(name), body)?;
    }
    Ok(())
}
