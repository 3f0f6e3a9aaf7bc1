use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::easing::Easing;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Property {
    #[serde(rename = "translateX")]
    TranslateX,
    #[serde(rename = "translateY")]
    TranslateY,
    #[serde(rename = "rotate")]
    Rotate,
    #[serde(rename = "scale")]
    Scale,
    #[serde(rename = "scaleX")]
    ScaleX,
    #[serde(rename = "scaleY")]
    ScaleY,
    #[serde(rename = "opacity")]
    Opacity,
}

impl Property {
    pub const ALL: [Property; 7] = [
        Property::TranslateX,
        Property::TranslateY,
        Property::Rotate,
        Property::Scale,
        Property::ScaleX,
        Property::ScaleY,
        Property::Opacity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::TranslateX => "translateX",
            Property::TranslateY => "translateY",
            Property::Rotate => "rotate",
            Property::Scale => "scale",
            Property::ScaleX => "scaleX",
            Property::ScaleY => "scaleY",
            Property::Opacity => "opacity",
        }
    }

    pub fn unit(self) -> Unit {
        match self {
            Property::TranslateX | Property::TranslateY => Unit::Px,
            Property::Rotate => Unit::Deg,
            _ => Unit::None,
        }
    }

    pub fn is_transform(self) -> bool {
        self != Property::Opacity
    }

    /// Rotation and scaling pivot around the track origin.
    pub fn uses_origin(self) -> bool {
        matches!(self, Property::Rotate | Property::Scale | Property::ScaleX | Property::ScaleY)
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Property {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Property::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| format!("unknown property {s:?}"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Unit {
    Px,
    Deg,
    None,
}

impl Unit {
    pub fn suffix(self) -> &'static str {
        match self {
            Unit::Px => "px",
            Unit::Deg => "deg",
            Unit::None => "",
        }
    }
}

/// A number with its unit. On the wire: `"-15deg"`, `"4px"`, `"0.5"`, or a
/// bare JSON number.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Value {
    pub value: f64,
    pub unit: Unit,
}

impl Value {
    pub fn new(value: f64, unit: Unit) -> Self {
        Value { value, unit }
    }

    pub fn px(value: f64) -> Self {
        Value::new(value, Unit::Px)
    }

    pub fn deg(value: f64) -> Self {
        Value::new(value, Unit::Deg)
    }

    pub fn plain(value: f64) -> Self {
        Value::new(value, Unit::None)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.value, self.unit.suffix())
    }
}

impl FromStr for Value {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (num, unit) = if let Some(n) = s.strip_suffix("deg") {
            (n, Unit::Deg)
        } else if let Some(n) = s.strip_suffix("px") {
            (n, Unit::Px)
        } else {
            (s, Unit::None)
        };
        let starts_ok = num.starts_with(|c: char| c.is_ascii_digit() || matches!(c, '-' | '+' | '.'));
        match num.parse::<f64>() {
            Ok(v) if starts_ok && v.is_finite() => Ok(Value::new(v, unit)),
            _ => Err(format!("expected a number with optional px or deg unit, found {s:?}")),
        }
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Value {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Value::plain(v)),
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Iterations {
    #[default]
    Once,
    Count(u32),
    Infinite,
}

impl Iterations {
    pub fn count(n: u32) -> Self {
        if n == 1 {
            Iterations::Once
        } else {
            Iterations::Count(n)
        }
    }

    pub fn as_count(self) -> Option<u32> {
        match self {
            Iterations::Once => Some(1),
            Iterations::Count(n) => Some(n),
            Iterations::Infinite => None,
        }
    }
}

impl fmt::Display for Iterations {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_count() {
            Some(n) => write!(f, "{n}"),
            None => f.write_str("infinite"),
        }
    }
}

impl Serialize for Iterations {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.as_count() {
            Some(n) => s.serialize_u32(n),
            None => s.serialize_str("infinite"),
        }
    }
}

impl<'de> Deserialize<'de> for Iterations {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(u32),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(n) => Ok(Iterations::count(n)),
            Raw::Text(t) if t == "infinite" => Ok(Iterations::Infinite),
            Raw::Text(t) => t
                .parse::<u32>()
                .map(Iterations::count)
                .map_err(|_| serde::de::Error::custom(format!("expected a count or \"infinite\", found {t:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    #[default]
    Normal,
    Alternate,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Normal => "normal",
            Direction::Alternate => "alternate",
        }
    }
}

/// Pivot for rotate and scale tracks, in user units. `Auto` resolves to the
/// center of the group's bounding box.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub enum Origin {
    #[default]
    Auto,
    Point { x: f64, y: f64 },
}

impl Serialize for Origin {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match *self {
            Origin::Auto => s.serialize_str("auto"),
            Origin::Point { x, y } => {
                use serde::ser::SerializeStruct;
                let mut st = s.serialize_struct("Origin", 2)?;
                st.serialize_field("x", &x)?;
                st.serialize_field("y", &y)?;
                st.end()
            }
        }
    }
}

impl<'de> Deserialize<'de> for Origin {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Point { x: f64, y: f64 },
        }
        match Raw::deserialize(d)? {
            Raw::Text(t) if t == "auto" => Ok(Origin::Auto),
            Raw::Text(t) => Err(serde::de::Error::custom(format!("expected \"auto\" or {{x, y}}, found {t:?}"))),
            Raw::Point { x, y } => Ok(Origin::Point { x, y }),
        }
    }
}

fn default_easing() -> Easing {
    Easing::Ease
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "TrackWire")]
pub struct Track {
    pub group: String,
    pub property: Property,
    #[serde(rename = "from")]
    pub from_value: Value,
    #[serde(rename = "to")]
    pub to_value: Value,
    pub duration_ms: u64,
    pub delay_ms: u64,
    pub iterations: Iterations,
    pub direction: Direction,
    pub easing: Easing,
    pub origin: Origin,
}

#[derive(Deserialize)]
struct TrackWire {
    group: String,
    property: Property,
    #[serde(alias = "from_value")]
    from: Value,
    #[serde(alias = "to_value")]
    to: Value,
    duration_ms: u64,
    #[serde(default)]
    delay_ms: u64,
    #[serde(default)]
    iterations: Iterations,
    #[serde(default)]
    direction: Direction,
    #[serde(default = "default_easing")]
    easing: Easing,
    #[serde(default)]
    origin: Origin,
}

impl From<TrackWire> for Track {
    fn from(w: TrackWire) -> Self {
        let mut t = Track {
            group: w.group,
            property: w.property,
            from_value: w.from,
            to_value: w.to,
            duration_ms: w.duration_ms,
            delay_ms: w.delay_ms,
            iterations: w.iterations,
            direction: w.direction,
            easing: w.easing,
            origin: w.origin,
        };
        t.apply_default_units();
        t
    }
}

impl Track {
    pub fn new(group: impl Into<String>, property: Property, from: f64, to: f64, duration_ms: u64) -> Self {
        let unit = property.unit();
        Track {
            group: group.into(),
            property,
            from_value: Value::new(from, unit),
            to_value: Value::new(to, unit),
            duration_ms,
            delay_ms: 0,
            iterations: Iterations::Once,
            direction: Direction::Normal,
            easing: default_easing(),
            origin: Origin::Auto,
        }
    }

    /// Gives unitless values the property's unit, so `0` means `0deg` on a
    /// rotate track.
    pub fn apply_default_units(&mut self) {
        let unit = self.property.unit();
        for v in [&mut self.from_value, &mut self.to_value] {
            if v.unit == Unit::None {
                v.unit = unit;
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlobalSettings {
    #[serde(default)]
    pub loop_all: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MotionSpec {
    pub tracks: Vec<Track>,
    #[serde(default)]
    pub global: GlobalSettings,
}

impl MotionSpec {
    /// Distinct animated group names in first-appearance order.
    pub fn groups(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for t in &self.tracks {
            if !out.contains(&t.group.as_str()) {
                out.push(&t.group);
            }
        }
        out
    }

    pub fn tracks_for<'a>(&'a self, group: &'a str) -> impl Iterator<Item = &'a Track> + 'a {
        self.tracks.iter().filter(move |t| t.group == group)
    }

    pub fn effective_iterations(&self, t: &Track) -> Iterations {
        if self.global.loop_all {
            Iterations::Infinite
        } else {
            t.iterations
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Keyframe {
    pub offset: f64,
    pub value: Value,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wire_round_trip() {
        let json = r#"{"tracks":[{"group":"wing","property":"rotate","from":"-15deg","to":15,
            "duration_ms":800,"iterations":"infinite","direction":"alternate","easing":"elastic"}]}"#;
        let spec: MotionSpec = serde_json::from_str(json).unwrap();
        let t = &spec.tracks[0];
        assert_eq!(t.from_value, Value::deg(-15.0));
        assert_eq!(t.to_value, Value::deg(15.0));
        assert_eq!(t.iterations, Iterations::Infinite);
        assert_eq!(t.origin, Origin::Auto);
        assert!(!spec.global.loop_all);
        let text = serde_json::to_string(&spec).unwrap();
        assert!(text.contains(r#""from":"-15deg""#));
        assert!(text.contains(r#""easing":"elastic-out(1, 0.3)""#));
        let back: MotionSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, spec);
    }

    #[test]
    fn origin_and_iterations_forms() {
        let t: Track = serde_json::from_str(
            r#"{"group":"a","property":"scale","from_value":1,"to_value":"1.2","duration_ms":500,
                "iterations":3,"origin":{"x":10,"y":-2.5}}"#,
        )
        .unwrap();
        assert_eq!(t.iterations, Iterations::Count(3));
        assert_eq!(t.origin, Origin::Point { x: 10.0, y: -2.5 });
        assert_eq!(t.easing, Easing::Ease);
        assert!(serde_json::from_str::<Value>(r#""inf""#).is_err());
        assert!(serde_json::from_str::<Value>(r#""12em""#).is_err());
        assert!(serde_json::from_str::<Origin>(r#""center""#).is_err());
    }
}
