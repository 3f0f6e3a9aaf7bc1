use std::fmt::Write;

use crate::motion::{expand_track_keyframes, Easing, Keyframe, Property, Track, Value, DEFAULT_SAMPLES};
use crate::num::fmt_num;

/// Custom properties used when several transform tracks share a group,
/// in composition order.
pub(crate) const COMPOSED: [(Property, &str, &str, &str); 6] = [
    (Property::TranslateX, "--dm-tx", "<length>", "0px"),
    (Property::TranslateY, "--dm-ty", "<length>", "0px"),
    (Property::Rotate, "--dm-rot", "<angle>", "0deg"),
    (Property::Scale, "--dm-s", "<number>", "1"),
    (Property::ScaleX, "--dm-sx", "<number>", "1"),
    (Property::ScaleY, "--dm-sy", "<number>", "1"),
];

pub(crate) fn custom_property(p: Property) -> Option<&'static str> {
    COMPOSED.iter().find(|c| c.0 == p).map(|c| c.1)
}

#[derive(Clone, Copy, PartialEq, Eq)]
pub(crate) enum Target {
    /// `transform: rotate(...)` or `opacity: ...` directly.
    Direct,
    /// The track animates its custom property; the group rule composes.
    Composed,
}

pub fn keyframes_name(t: &Track) -> String {
    format!("kf-{}-{}", t.group, t.property)
}

fn css_value(v: Value) -> String {
    format!("{}{}", fmt_num(v.value), v.unit.suffix())
}

/// The CSS timing function for the animation shorthand: the easing itself
/// when CSS supports it, otherwise linear between samples.
pub fn timing_function(e: &Easing) -> String {
    match *e {
        Easing::CubicBezier { x1, y1, x2, y2 } => format!(
            "cubic-bezier({}, {}, {}, {})",
            fmt_num(x1),
            fmt_num(y1),
            fmt_num(x2),
            fmt_num(y2)
        ),
        Easing::ElasticOut { .. } | Easing::BounceOut => "linear".to_string(),
        _ => e.to_string(),
    }
}

fn declaration(t: &Track, v: Value, target: Target) -> String {
    let v = Value::new(v.value, t.property.unit());
    match (t.property, target) {
        (Property::Opacity, _) => format!("opacity: {}", fmt_num(v.value)),
        (p, Target::Composed) => format!("{}: {}", custom_property(p).unwrap_or("--dm-unknown"), css_value(v)),
        (p, Target::Direct) => format!("transform: {}({})", p.name(), css_value(v)),
    }
}

fn stops(t: &Track) -> Vec<Keyframe> {
    if t.easing.is_native() {
        vec![
            Keyframe {
                offset: 0.0,
                value: t.from_value,
            },
            Keyframe {
                offset: 1.0,
                value: t.to_value,
            },
        ]
    } else {
        expand_track_keyframes(t, DEFAULT_SAMPLES)
    }
}

pub(crate) fn keyframes_block(t: &Track, target: Target) -> String {
    let mut out = format!("@keyframes {} {{\n", keyframes_name(t));
    for k in stops(t) {
        let _ = writeln!(out, "  {}% {{ {}; }}", fmt_num(k.offset * 100.0), declaration(t, k.value, target));
    }
    out.push_str("}\n");
    out
}

/// A standalone `@keyframes` block animating `transform` or `opacity`
/// directly. Native easings get two stops; others are sampled.
pub fn emit_keyframes(t: &Track) -> String {
    keyframes_block(t, Target::Direct)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::motion::{Direction, Iterations};

    fn collapse(s: &str) -> String {
        s.split_whitespace().collect::<Vec<_>>().join(" ")
    }

    #[test]
    fn translate_template() {
        let mut t = Track::new("body", Property::TranslateY, 0.0, -4.0, 1000);
        t.easing = Easing::Linear;
        t.direction = Direction::Alternate;
        t.iterations = Iterations::Infinite;
        assert_eq!(
            collapse(&emit_keyframes(&t)),
            "@keyframes kf-body-translateY { 0% { transform: translateY(0px); } 100% { transform: translateY(-4px); } }"
        );
    }

    #[test]
    fn elastic_is_sampled() {
        let mut t = Track::new("wing", Property::Rotate, -15.0, 15.0, 800);
        t.easing = "elastic".parse().unwrap();
        let css = emit_keyframes(&t);
        let expected = expand_track_keyframes(&t, 33);
        let lines: Vec<&str> = css.lines().filter(|l| l.contains('%')).collect();
        assert_eq!(lines.len(), 33);
        for (i, (line, k)) in lines.iter().zip(&expected).enumerate() {
            let pct = fmt_num(i as f64 / 32.0 * 100.0);
            assert_eq!(*line, format!("  {pct}% {{ transform: rotate({}deg); }}", fmt_num(k.value.value)));
        }
        assert_eq!(timing_function(&t.easing), "linear");
    }

    #[test]
    fn steps_passthrough() {
        let mut t = Track::new("eye", Property::Opacity, 0.0, 1.0, 400);
        t.easing = Easing::Steps(4);
        assert_eq!(
            collapse(&emit_keyframes(&t)),
            "@keyframes kf-eye-opacity { 0% { opacity: 0; } 100% { opacity: 1; } }"
        );
        assert_eq!(timing_function(&t.easing), "steps(4)");
    }
}
