//! Random inputs for property and acceptance tests.

use std::fmt::Write;

use decomate_core::geom::Point;
use decomate_core::grouping::{GroupSpec, GroupingSpec};
use decomate_core::motion::{Direction, Easing, GlobalSettings, Iterations, MotionSpec, Origin, Property, Track, Value};
use decomate_core::svg::SvgDocument;
use rand::seq::SliceRandom;
use rand::Rng;

fn coord<R: Rng>(rng: &mut R) -> f64 {
    // two decimals keep the text exact and the numbers readable in failures
    (rng.gen_range(-10000..=10000) as f64) / 100.0
}

/// Path data exercising every command letter in both cases.
pub fn path_d<R: Rng>(rng: &mut R, commands: usize) -> String {
    let mut d = String::new();
    let _ = write!(d, "M{} {}", coord(rng), coord(rng));
    for _ in 0..commands {
        let letter = *b"MLHVCSQTAZ".choose(rng).unwrap() as char;
        let letter = if rng.gen_bool(0.5) { letter } else { letter.to_ascii_lowercase() };
        let _ = match letter.to_ascii_uppercase() {
            'M' | 'L' | 'T' => write!(d, " {letter}{} {}", coord(rng), coord(rng)),
            'H' | 'V' => write!(d, " {letter}{}", coord(rng)),
            'C' => write!(
                d,
                " {letter}{} {} {} {} {} {}",
                coord(rng),
                coord(rng),
                coord(rng),
                coord(rng),
                coord(rng),
                coord(rng)
            ),
            'S' | 'Q' => write!(d, " {letter}{} {} {} {}", coord(rng), coord(rng), coord(rng), coord(rng)),
            'A' => write!(
                d,
                " {letter}{} {} {} {} {} {} {}",
                rng.gen_range(1..=8000) as f64 / 100.0,
                rng.gen_range(1..=8000) as f64 / 100.0,
                rng.gen_range(-180..=180),
                rng.gen_range(0..=1),
                rng.gen_range(0..=1),
                coord(rng),
                coord(rng)
            ),
            _ => write!(d, " {letter}"),
        };
    }
    d
}

#[derive(Clone, Copy, Debug)]
pub struct ArcCase {
    pub from: Point,
    pub rx: f64,
    pub ry: f64,
    pub rotation_deg: f64,
    pub large_arc: bool,
    pub sweep: bool,
    pub to: Point,
}

pub fn arc_case<R: Rng>(rng: &mut R) -> ArcCase {
    let from = Point::new(coord(rng), coord(rng));
    let mut to = Point::new(coord(rng), coord(rng));
    if to == from {
        to.x += 1.0;
    }
    ArcCase {
        from,
        rx: rng.gen_range(0.5..200.0),
        ry: rng.gen_range(0.5..200.0),
        rotation_deg: rng.gen_range(-360.0..360.0),
        large_arc: rng.gen(),
        sweep: rng.gen(),
        to,
    }
}

const NAMES: &[&str] = &["head", "tail", "wing", "leg-front", "leg-back", "body", "eye", "ear", "fin"];

/// A random partition of the document's items into up to five named groups.
pub fn grouping<R: Rng>(doc: &SvgDocument, object: &str, rng: &mut R) -> GroupingSpec {
    let items = doc.items();
    let k = rng.gen_range(1..=items.len().clamp(1, 5));
    let mut names: Vec<&str> = NAMES.to_vec();
    names.shuffle(rng);
    let mut groups: Vec<GroupSpec> = names[..k]
        .iter()
        .map(|n| GroupSpec {
            name: n.to_string(),
            members: Vec::new(),
            suggestions: Vec::new(),
        })
        .collect();
    for item in items {
        let g = rng.gen_range(0..k);
        groups[g].members.push(item.id.clone());
    }
    groups.retain(|g| !g.members.is_empty());
    GroupingSpec {
        object_name: object.to_string(),
        groups,
    }
}

pub fn easing<R: Rng>(rng: &mut R) -> Easing {
    match rng.gen_range(0..9) {
        0 => Easing::Linear,
        1 => Easing::Ease,
        2 => Easing::EaseIn,
        3 => Easing::EaseOut,
        4 => Easing::EaseInOut,
        5 => Easing::CubicBezier {
            x1: rng.gen_range(0.0..=1.0),
            y1: rng.gen_range(-2.0..=3.0),
            x2: rng.gen_range(0.0..=1.0),
            y2: rng.gen_range(-2.0..=3.0),
        },
        6 => Easing::ElasticOut {
            amplitude: rng.gen_range(1.0..3.0),
            period: rng.gen_range(0.1..1.0),
        },
        7 => Easing::BounceOut,
        _ => Easing::Steps(rng.gen_range(1..=12)),
    }
}

fn value<R: Rng>(p: Property, rng: &mut R) -> Value {
    let v = match p {
        Property::TranslateX | Property::TranslateY => rng.gen_range(-4000..=4000) as f64 / 100.0,
        Property::Rotate => rng.gen_range(-360..=360) as f64,
        Property::Scale | Property::ScaleX | Property::ScaleY => rng.gen_range(10..=300) as f64 / 100.0,
        Property::Opacity => rng.gen_range(0..=100) as f64 / 100.0,
    };
    Value::new(v, p.unit())
}

/// Valid motion for a random subset of the grouping's groups. Tracks of one
/// group share an origin.
pub fn motion<R: Rng>(grouping: &GroupingSpec, rng: &mut R) -> MotionSpec {
    let mut tracks = Vec::new();
    for g in &grouping.groups {
        if !rng.gen_bool(0.7) {
            continue;
        }
        let mut props = Property::ALL.to_vec();
        props.shuffle(rng);
        let n = rng.gen_range(1..=4);
        let origin = if rng.gen_bool(0.5) {
            Origin::Auto
        } else {
            Origin::Point {
                x: coord(rng),
                y: coord(rng),
            }
        };
        for &p in &props[..n] {
            let mut t = Track::new(g.name.clone(), p, 0.0, 0.0, rng.gen_range(16..=5000));
            t.from_value = value(p, rng);
            t.to_value = value(p, rng);
            t.delay_ms = rng.gen_range(0..=2000);
            t.iterations = match rng.gen_range(0..3) {
                0 => Iterations::Once,
                1 => Iterations::count(rng.gen_range(1..=5)),
                _ => Iterations::Infinite,
            };
            t.direction = if rng.gen() { Direction::Alternate } else { Direction::Normal };
            t.easing = easing(rng);
            t.origin = origin;
            tracks.push(t);
        }
    }
    MotionSpec {
        tracks,
        global: GlobalSettings { loop_all: rng.gen_bool(0.2) },
    }
}

/// Printable noise biased towards the characters that drive the parsers.
pub fn noise<R: Rng>(rng: &mut R, max_len: usize) -> String {
    const ALPHABET: &[u8] = b"{}[]<>\"':,;=/#-.0123456789eE+ \n\tabcdefghijklmnopqrstuvwxyz`";
    const WORDS: &[&str] = &[
        "```json", "```", "{\"groups\":", "\"tracks\":", "\"name\"", "\"members\"", "el-0", "null", "true",
        "<svg", "</svg>", "<path d=\"", "<g>", "</g>", "anim ", " rotate ", "easing", "infinite", "NaN",
    ];
    let len = rng.gen_range(0..=max_len);
    let mut s = String::with_capacity(len);
    while s.len() < len {
        match rng.gen_range(0..10) {
            0 => s.push_str(WORDS.choose(rng).unwrap()),
            1 => s.push(char::from_u32(rng.gen_range(0x20..0x3000)).unwrap_or('?')),
            _ => s.push(*ALPHABET.choose(rng).unwrap() as char),
        }
    }
    s
}
